#ifndef RICMATCH_TRACE_HPP
#define RICMATCH_TRACE_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ricmatch {

/// Raised for malformed input data (CSV, plans, configs). Maps to exit code 2
/// in the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SliceKind : int { Embb = 0, Mtc = 1, Urllc = 2 };

const char* slice_name(SliceKind s);
SliceKind slice_from_name(const std::string& name);

/// One per-UE scheduling sample (Rome-style schema).
struct UeRecord {
    std::string ru_id;
    SliceKind slice = SliceKind::Embb;
    int mcs = 0;               // 0..27
    int prbs = 0;
    long long buffer_bytes = 0;
    double dl_bitrate_bps = 0.0;  // prediction target
};

/// One per-RU aggregate sample (Barcelona-style schema).
struct RuRecord {
    std::string ru_id;
    double mcs = 0.0;          // mean over the aggregation window
    double prbs = 0.0;
    long long rnti_count = 0;
    double agg_dl_bitrate_bps = 0.0;  // prediction target
};

enum class TraceKind { PerUe, PerRu };

struct Trace {
    TraceKind kind = TraceKind::PerUe;
    std::vector<std::string> ru_ids;   // first-appearance order
    std::vector<UeRecord> ue_records;  // populated iff kind == PerUe
    std::vector<RuRecord> ru_records;  // populated iff kind == PerRu
    std::string provenance;

    std::size_t size() const {
        return kind == TraceKind::PerUe ? ue_records.size() : ru_records.size();
    }
};

/// Synthetic scenario configuration. Stands in for the unavailable real traces.
struct GenConfig {
    int n_rus = 4;
    int samples_per_ru = 10000;
    std::uint64_t seed = 0;
    std::vector<double> load_scale;     // lambda_r, one per RU
    std::vector<double> spectral_bias;  // beta_r, one per RU
    double zero_prob = 0.1;             // share of zero-bitrate samples (PerUe)
    double noise_sigma = 0.1;           // lognormal noise on the target

    /// Fills load_scale/spectral_bias with 1.0 where unset and validates sizes.
    void normalize();
};

// Per-PRB bit budget: 12 subcarriers x 14 symbols x 1000 slots/s.
inline constexpr double kBitsPerPrbUnit = 168000.0;

Trace parse_csv(std::istream& in, TraceKind kind);
Trace parse_csv_file(const std::string& path, TraceKind kind);
void write_csv(const Trace& trace, std::ostream& out);
std::string write_csv(const Trace& trace);

/// Per-UE homogeneous scenario: every RU draws from one shared process.
Trace gen_homogeneous(const GenConfig& cfg);

/// Per-RU heterogeneous scenario: load and spectral efficiency differ per RU.
Trace gen_heterogeneous(const GenConfig& cfg);

/// Groups record indices by RU, preserving per-RU record order.
std::map<std::string, std::vector<std::size_t>> partition_by_ru(const Trace& trace);

}  // namespace ricmatch

#endif
