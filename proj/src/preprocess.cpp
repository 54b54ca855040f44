#include "ricmatch/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ricmatch/rng.hpp"

namespace ricmatch {

std::pair<FeatureMatrix, TargetVector> encode_features(const Trace& trace,
                                                       const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw DataError("encode_features: empty record selection");

    FeatureMatrix m;
    TargetVector t;
    m.n_rows = rows.size();
    if (trace.kind == TraceKind::PerUe) {
        m.n_cols = 6;
        m.column_names = {"slice_embb", "slice_mtc", "slice_urllc", "mcs", "prbs", "buffer_bytes"};
        m.values.resize(m.n_rows * m.n_cols, 0.0);
        t.values.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = trace.ue_records.at(rows[i]);
            m.at(i, static_cast<std::size_t>(r.slice)) = 1.0;
            m.at(i, 3) = static_cast<double>(r.mcs);
            m.at(i, 4) = static_cast<double>(r.prbs);
            m.at(i, 5) = static_cast<double>(r.buffer_bytes);
            t.values.push_back(r.dl_bitrate_bps);
        }
    } else {
        m.n_cols = 3;
        m.column_names = {"mcs", "prbs", "rnti_count"};
        m.values.resize(m.n_rows * m.n_cols, 0.0);
        t.values.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = trace.ru_records.at(rows[i]);
            m.at(i, 0) = r.mcs;
            m.at(i, 1) = r.prbs;
            m.at(i, 2) = static_cast<double>(r.rnti_count);
            t.values.push_back(r.agg_dl_bitrate_bps);
        }
    }
    return {std::move(m), std::move(t)};
}

std::pair<FeatureMatrix, TargetVector> encode_features(const Trace& trace) {
    std::vector<std::size_t> all(trace.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return encode_features(trace, all);
}

Normalizer fit_normalizer(NormMode mode, const FeatureMatrix& train_rows) {
    Normalizer norm;
    norm.mode = mode;
    norm.fitted = true;
    if (mode == NormMode::MinMaxFeature) {
        if (train_rows.n_rows == 0) throw DataError("fit_normalizer: no training rows");
        norm.feature_min.assign(train_rows.n_cols, 0.0);
        norm.feature_max.assign(train_rows.n_cols, 0.0);
        for (std::size_t c = 0; c < train_rows.n_cols; ++c) {
            double lo = train_rows.at(0, c), hi = train_rows.at(0, c);
            for (std::size_t r = 1; r < train_rows.n_rows; ++r) {
                lo = std::min(lo, train_rows.at(r, c));
                hi = std::max(hi, train_rows.at(r, c));
            }
            norm.feature_min[c] = lo;
            norm.feature_max[c] = hi;
        }
    }
    return norm;
}

FeatureMatrix transform(const Normalizer& norm, const FeatureMatrix& rows) {
    if (!norm.fitted) throw DataError("transform: normalizer not fitted");
    FeatureMatrix out = rows;
    if (norm.mode == NormMode::L2Rows) {
        for (std::size_t r = 0; r < out.n_rows; ++r) {
            double sq = 0.0;
            for (std::size_t c = 0; c < out.n_cols; ++c) sq += out.at(r, c) * out.at(r, c);
            if (sq == 0.0) continue;  // all-zero row maps to itself
            const double nrm = std::sqrt(sq);
            for (std::size_t c = 0; c < out.n_cols; ++c) out.at(r, c) /= nrm;
        }
    } else {
        if (rows.n_cols != norm.feature_min.size())
            throw DataError("transform: column count mismatch");
        for (std::size_t c = 0; c < out.n_cols; ++c) {
            const double lo = norm.feature_min[c];
            const double span = norm.feature_max[c] - lo;
            for (std::size_t r = 0; r < out.n_rows; ++r) {
                // constant feature maps to 0; out-of-range values extrapolate
                out.at(r, c) = span == 0.0 ? 0.0 : 2.0 * (out.at(r, c) - lo) / span - 1.0;
            }
        }
    }
    return out;
}

TargetVector scale_targets(const TargetVector& t, const std::vector<std::size_t>& fit_rows) {
    if (fit_rows.empty()) throw DataError("scale_targets: empty fit_rows");
    double top = 0.0;
    for (std::size_t i : fit_rows) top = std::max(top, t.values.at(i));
    TargetVector out = t;
    out.scale_factor = top > 0.0 ? top : 1.0;
    return out;
}

SplitIndices train_val_split(std::size_t n, std::uint64_t seed) {
    if (n < 5) throw DataError("train_val_split: need n >= 5");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    StreamRng rng(seed, 0x53504C4954ULL);  // "SPLIT" stream
    rng.shuffle(perm);
    const auto n_val = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
    SplitIndices split;
    split.seed = seed;
    split.val.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
    split.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
    return split;
}

std::vector<std::size_t> subsample_fraction(const std::vector<std::size_t>& idx, double fraction,
                                            std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw DataError("subsample_fraction: fraction must be in (0,1]");
    std::vector<std::size_t> perm = idx;
    StreamRng rng(seed, 0x535542ULL);  // "SUB" stream
    rng.shuffle(perm);
    auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    k = std::clamp<std::size_t>(k, 1, idx.size());
    perm.resize(k);  // prefix of one fixed permutation => nested across fractions
    return perm;
}

}  // namespace ricmatch
