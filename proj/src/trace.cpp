#include "ricmatch/trace.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ricmatch/rng.hpp"

namespace ricmatch {

const char* slice_name(SliceKind s) {
    switch (s) {
        case SliceKind::Embb: return "EMBB";
        case SliceKind::Mtc: return "MTC";
        case SliceKind::Urllc: return "URLLC";
    }
    throw std::logic_error("invalid SliceKind");
}

SliceKind slice_from_name(const std::string& name) {
    if (name == "EMBB") return SliceKind::Embb;
    if (name == "MTC") return SliceKind::Mtc;
    if (name == "URLLC") return SliceKind::Urllc;
    throw DataError("unknown slice label '" + name + "'");
}

void GenConfig::normalize() {
    if (n_rus < 1) throw DataError("n_rus must be >= 1");
    if (samples_per_ru < 0) throw DataError("samples_per_ru must be >= 0");
    if (zero_prob < 0.0 || zero_prob > 1.0) throw DataError("zero_prob must be in [0,1]");
    if (noise_sigma < 0.0) throw DataError("noise_sigma must be >= 0");
    if (load_scale.empty()) load_scale.assign(static_cast<std::size_t>(n_rus), 1.0);
    if (spectral_bias.empty()) spectral_bias.assign(static_cast<std::size_t>(n_rus), 1.0);
    if (load_scale.size() != static_cast<std::size_t>(n_rus) ||
        spectral_bias.size() != static_cast<std::size_t>(n_rus)) {
        throw DataError("load_scale and spectral_bias must have n_rus entries");
    }
    for (double v : load_scale)
        if (v <= 0.0) throw DataError("load_scale entries must be > 0");
    for (double v : spectral_bias)
        if (v <= 0.0) throw DataError("spectral_bias entries must be > 0");
}

namespace {

constexpr const char* kPerUeHeader = "ru_id,slice,mcs,prbs,buffer_bytes,dl_bitrate_bps";
constexpr const char* kPerRuHeader = "ru_id,mcs,prbs,rnti_count,agg_dl_bitrate_bps";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
    throw DataError(what + " at line " + std::to_string(line_no));
}

long long parse_int(const std::string& s, std::size_t line_no, const char* col) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        row_error(line_no, std::string("malformed ") + col + " '" + s + "'");
    }
    if (pos != s.size()) row_error(line_no, std::string("malformed ") + col + " '" + s + "'");
    return v;
}

double parse_real(const std::string& s, std::size_t line_no, const char* col) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        row_error(line_no, std::string("malformed ") + col + " '" + s + "'");
    }
    if (pos != s.size()) row_error(line_no, std::string("malformed ") + col + " '" + s + "'");
    return v;
}

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

Trace parse_csv(std::istream& in, TraceKind kind) {
    Trace trace;
    trace.kind = kind;
    const char* expected = kind == TraceKind::PerUe ? kPerUeHeader : kPerRuHeader;

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input: missing CSV header");
    if (strip_cr(line) != expected) {
        throw DataError("missing column or bad header: expected '" + std::string(expected) +
                        "', got '" + strip_cr(line) + "'");
    }

    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        const std::size_t want = kind == TraceKind::PerUe ? 6 : 5;
        if (f.size() != want) {
            row_error(line_no, "expected " + std::to_string(want) + " columns, got " +
                                   std::to_string(f.size()));
        }
        if (kind == TraceKind::PerUe) {
            UeRecord r;
            r.ru_id = f[0];
            try {
                r.slice = slice_from_name(f[1]);
            } catch (const DataError& e) {
                row_error(line_no, e.what());
            }
            r.mcs = static_cast<int>(parse_int(f[2], line_no, "mcs"));
            if (r.mcs < 0 || r.mcs > 27) row_error(line_no, "mcs out of range [0,27]");
            r.prbs = static_cast<int>(parse_int(f[3], line_no, "prbs"));
            if (r.prbs < 0) row_error(line_no, "prbs must be >= 0");
            r.buffer_bytes = parse_int(f[4], line_no, "buffer_bytes");
            if (r.buffer_bytes < 0) row_error(line_no, "buffer_bytes must be >= 0");
            r.dl_bitrate_bps = parse_real(f[5], line_no, "dl_bitrate_bps");
            if (r.dl_bitrate_bps < 0.0) row_error(line_no, "dl_bitrate_bps must be >= 0");
            if (seen.insert(r.ru_id).second) trace.ru_ids.push_back(r.ru_id);
            trace.ue_records.push_back(std::move(r));
        } else {
            RuRecord r;
            r.ru_id = f[0];
            r.mcs = parse_real(f[1], line_no, "mcs");
            r.prbs = parse_real(f[2], line_no, "prbs");
            if (r.prbs < 0.0) row_error(line_no, "prbs must be >= 0");
            r.rnti_count = parse_int(f[3], line_no, "rnti_count");
            if (r.rnti_count < 0) row_error(line_no, "rnti_count must be >= 0");
            r.agg_dl_bitrate_bps = parse_real(f[4], line_no, "agg_dl_bitrate_bps");
            if (r.agg_dl_bitrate_bps < 0.0) row_error(line_no, "agg_dl_bitrate_bps must be >= 0");
            if (seen.insert(r.ru_id).second) trace.ru_ids.push_back(r.ru_id);
            trace.ru_records.push_back(std::move(r));
        }
    }
    return trace;
}

Trace parse_csv_file(const std::string& path, TraceKind kind) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trace file '" + path + "'");
    Trace t = parse_csv(in, kind);
    t.provenance = path;
    return t;
}

void write_csv(const Trace& trace, std::ostream& out) {
    if (trace.kind == TraceKind::PerUe) {
        out << kPerUeHeader << '\n';
        for (const auto& r : trace.ue_records) {
            out << r.ru_id << ',' << slice_name(r.slice) << ',' << r.mcs << ',' << r.prbs << ','
                << r.buffer_bytes << ',' << fmt_real(r.dl_bitrate_bps) << '\n';
        }
    } else {
        out << kPerRuHeader << '\n';
        for (const auto& r : trace.ru_records) {
            out << r.ru_id << ',' << fmt_real(r.mcs) << ',' << fmt_real(r.prbs) << ','
                << r.rnti_count << ',' << fmt_real(r.agg_dl_bitrate_bps) << '\n';
        }
    }
}

std::string write_csv(const Trace& trace) {
    std::ostringstream ss;
    write_csv(trace, ss);
    return ss.str();
}

namespace {

std::string ru_name(int index) { return "RU" + std::to_string(index + 1); }

double slice_efficiency(SliceKind s) {
    switch (s) {
        case SliceKind::Embb: return 1.0;
        case SliceKind::Mtc: return 0.25;
        case SliceKind::Urllc: return 0.5;
    }
    return 1.0;
}

}  // namespace

Trace gen_homogeneous(const GenConfig& raw) {
    GenConfig cfg = raw;
    cfg.normalize();
    for (std::size_t r = 1; r < cfg.load_scale.size(); ++r) {
        if (cfg.load_scale[r] != cfg.load_scale[0] || cfg.spectral_bias[r] != cfg.spectral_bias[0])
            throw DataError("gen_homogeneous requires all load_scale and spectral_bias equal");
    }
    const double beta = cfg.spectral_bias[0];

    Trace trace;
    trace.kind = TraceKind::PerUe;
    trace.provenance = "gen_homogeneous(seed=" + std::to_string(cfg.seed) + ")";
    for (int r = 0; r < cfg.n_rus; ++r) {
        trace.ru_ids.push_back(ru_name(r));
        StreamRng rng(cfg.seed, static_cast<std::uint64_t>(r));  // one stream per RU
        for (int i = 0; i < cfg.samples_per_ru; ++i) {
            UeRecord rec;
            rec.ru_id = trace.ru_ids.back();
            rec.slice = static_cast<SliceKind>(rng.uniform_int(0, 2));
            rec.mcs = static_cast<int>(rng.uniform_int(0, 27));
            rec.prbs = static_cast<int>(rng.uniform_int(1, 20));
            rec.buffer_bytes = rng.geometric(1e4);
            const bool zero = rng.next_unit() < cfg.zero_prob;
            const double noise =
                cfg.noise_sigma > 0.0 ? std::exp(rng.normal(0.0, cfg.noise_sigma)) : 1.0;
            rec.dl_bitrate_bps = zero ? 0.0
                                      : rec.prbs * kBitsPerPrbUnit * (0.1 + 0.2 * rec.mcs) * beta *
                                            slice_efficiency(rec.slice) * noise;
            trace.ue_records.push_back(std::move(rec));
        }
    }
    return trace;
}

Trace gen_heterogeneous(const GenConfig& raw) {
    GenConfig cfg = raw;
    cfg.normalize();
    if (cfg.n_rus < 2) throw DataError("gen_heterogeneous requires n_rus >= 2");

    Trace trace;
    trace.kind = TraceKind::PerRu;
    trace.provenance = "gen_heterogeneous(seed=" + std::to_string(cfg.seed) + ")";
    for (int r = 0; r < cfg.n_rus; ++r) {
        trace.ru_ids.push_back(ru_name(r));
        const double lambda = cfg.load_scale[static_cast<std::size_t>(r)];
        const double beta = cfg.spectral_bias[static_cast<std::size_t>(r)];
        StreamRng rng(cfg.seed, static_cast<std::uint64_t>(r));
        for (int i = 0; i < cfg.samples_per_ru; ++i) {
            RuRecord rec;
            rec.ru_id = trace.ru_ids.back();
            rec.rnti_count = rng.poisson(10.0 * lambda);
            rec.mcs = std::clamp(rng.normal(14.0 * beta, 3.0), 0.0, 27.0);
            rec.prbs = static_cast<double>(rng.uniform_int(10, 100));
            const double saturation =
                std::min(1.0, static_cast<double>(rec.rnti_count) / (rec.prbs / 2.0));
            const double noise =
                cfg.noise_sigma > 0.0 ? std::exp(rng.normal(0.0, cfg.noise_sigma)) : 1.0;
            rec.agg_dl_bitrate_bps =
                rec.prbs * kBitsPerPrbUnit * (0.1 + 0.2 * rec.mcs) * saturation * noise;
            trace.ru_records.push_back(std::move(rec));
        }
    }
    return trace;
}

std::map<std::string, std::vector<std::size_t>> partition_by_ru(const Trace& trace) {
    std::map<std::string, std::vector<std::size_t>> parts;
    for (const auto& ru : trace.ru_ids) parts[ru];
    if (trace.kind == TraceKind::PerUe) {
        for (std::size_t i = 0; i < trace.ue_records.size(); ++i)
            parts[trace.ue_records[i].ru_id].push_back(i);
    } else {
        for (std::size_t i = 0; i < trace.ru_records.size(); ++i)
            parts[trace.ru_records[i].ru_id].push_back(i);
    }
    return parts;
}

}  // namespace ricmatch
