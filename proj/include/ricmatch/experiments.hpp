#ifndef RICMATCH_EXPERIMENTS_HPP
#define RICMATCH_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ricmatch/matching.hpp"
#include "ricmatch/netcost.hpp"
#include "ricmatch/nn.hpp"
#include "ricmatch/trace.hpp"

namespace ricmatch {

struct SweepConfig {
    std::string target_ru;
    std::vector<MatchingPlan> plans;
    std::vector<double> x_values;  // fractions, budgets, or sample counts
    TrainConfig train;
    std::vector<std::uint64_t> seeds;
    LinkModel links;
    ComputeModel compute;
    int jobs = 1;

    void validate(const Trace& trace) const;
};

struct CurvePoint {
    std::string plan_id;
    double x = 0.0;
    std::uint64_t seed = 0;
    double metric = 0.0;  // MAPE % or accuracy %
    long long bytes_moved = 0;
    double transfer_delay_s = 0.0;
    int epochs = 0;
    bool skipped = false;
    // Confusion counts, populated by the xApp sweep only.
    long long tp = 0, tn = 0, fp = 0, fn = 0;
};

struct EnvelopePoint {
    double x = 0.0;
    std::string plan_id;
    double metric = 0.0;  // mean over seeds
};

struct SweepResult {
    std::string sweep_kind;  // "data_fraction", "time_budget", or "xapp"
    bool metric_is_accuracy = false;
    bool has_confusion = false;
    std::string config_echo_json;
    std::vector<CurvePoint> points;  // sorted by (plan, x, seed)
    std::vector<EnvelopePoint> envelope;
};

/// Retrains every instance from scratch at each training-data fraction;
/// evaluation is always the target RU's held-out split.
SweepResult sweep_data_fraction(const Trace& trace, const SweepConfig& cfg);

/// Full data per instance; x values are modeled-time budgets in units of 100
/// hoarding epochs.
SweepResult sweep_time_budget(const Trace& trace, const SweepConfig& cfg);

/// Best plan per x by mean-over-seeds metric; ties go to fewer bytes moved,
/// then lexicographic plan id.
std::vector<EnvelopePoint> best_instance_envelope(const std::vector<CurvePoint>& points,
                                                  bool metric_is_accuracy);

std::string sweep_csv(const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

/// Stable per-(seed, plan, RU) seed derivation, shared by all sweeps.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& label);

/// Common per-instance dataset assembly: per-source 80/20 split, seeded
/// subsampling, normalization fitted on the instance's own training rows.
struct InstanceData {
    TrainData train;
    ValData val;
    Normalizer norm;
    std::size_t nominal_records = 0;  // pre-split source record count
    std::vector<double> train_targets_original;
};

InstanceData build_instance_data(const Trace& trace, const InstanceSpec& instance,
                                 const std::string& target_ru, double fraction_multiplier,
                                 std::uint64_t seed);

NetworkSpec default_spec_for(const Trace& trace);
NormMode default_norm_for(const Trace& trace);

}  // namespace ricmatch

#endif
