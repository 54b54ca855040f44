#ifndef RICMATCH_PREPROCESS_HPP
#define RICMATCH_PREPROCESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ricmatch/trace.hpp"

namespace ricmatch {

struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;  // row-major
    std::vector<std::string> column_names;

    double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
};

/// Targets in original bits-per-second scale plus the factor used to map them
/// into training space.
struct TargetVector {
    std::vector<double> values;
    double scale_factor = 1.0;

    std::vector<double> scaled() const {
        std::vector<double> out(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / scale_factor;
        return out;
    }
};

enum class NormMode { L2Rows, MinMaxFeature };

/// Row-wise L2 scaling or per-feature MinMax to [-1,1]. MinMax parameters are
/// fitted on training rows only; out-of-range values at transform time are not
/// clamped.
struct Normalizer {
    NormMode mode = NormMode::L2Rows;
    bool fitted = false;
    std::vector<double> feature_min;  // MinMax only
    std::vector<double> feature_max;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::uint64_t seed = 0;
};

/// PerUe -> [slice one-hot x3, mcs, prbs, buffer_bytes]; PerRu -> [mcs, prbs,
/// rnti_count]. Row order follows the record list.
std::pair<FeatureMatrix, TargetVector> encode_features(const Trace& trace,
                                                       const std::vector<std::size_t>& rows);
std::pair<FeatureMatrix, TargetVector> encode_features(const Trace& trace);

Normalizer fit_normalizer(NormMode mode, const FeatureMatrix& train_rows);
FeatureMatrix transform(const Normalizer& norm, const FeatureMatrix& rows);

/// scale_factor = max target over fit_rows (1.0 when that max is 0).
TargetVector scale_targets(const TargetVector& t, const std::vector<std::size_t>& fit_rows);

/// Seeded 80/20 split; the first round(0.2 n) slots of the permutation are
/// validation.
SplitIndices train_val_split(std::size_t n, std::uint64_t seed);

/// Without-replacement subsample of round(fraction*|idx|) indices, clamped to
/// >= 1. Samples are nested across fractions for a fixed seed.
std::vector<std::size_t> subsample_fraction(const std::vector<std::size_t>& idx, double fraction,
                                            std::uint64_t seed);

}  // namespace ricmatch

#endif
