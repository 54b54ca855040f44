#ifndef RICMATCH_XAPP_HPP
#define RICMATCH_XAPP_HPP

#include <cstdint>
#include <vector>

#include "ricmatch/experiments.hpp"

namespace ricmatch {

enum class BitrateClass { ZeroBitrate, NonZeroBitrate };

struct QpConfig {
    // Threshold on the denormalized prediction; <= 0 selects the default of
    // half the smallest strictly positive training target.
    double threshold_bps = 0.0;
    std::vector<long long> sample_counts;
    bool mtc_only = true;  // restrict evaluation to MTC-slice rows

    void validate() const;
};

struct ConfusionCounts {
    long long tp = 0, tn = 0, fp = 0, fn = 0;
    long long total() const { return tp + tn + fp + fn; }
    double accuracy_percent() const {
        return total() == 0 ? 0.0 : 100.0 * static_cast<double>(tp + tn) / static_cast<double>(total());
    }
};

/// ZeroBitrate iff pred <= threshold (boundary inclusive).
BitrateClass classify_bitrate(double pred_bps, double threshold_bps);

/// Ground truth is exact zero; positives are the zero-bitrate class.
ConfusionCounts evaluate_accuracy(const Network& net, const FeatureMatrix& eval_features,
                                  const TargetVector& eval_targets, double threshold_bps);

/// Fig.-4-style sweep: accuracy of the zero/non-zero quality predictor versus
/// absolute training sample count.
SweepResult sweep_xapp(const Trace& trace, const SweepConfig& cfg, const QpConfig& qp);

}  // namespace ricmatch

#endif
