#include "ricmatch/xapp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "ricmatch/rng.hpp"

namespace ricmatch {

void QpConfig::validate() const {
    if (sample_counts.empty()) throw DataError("xapp: no sample counts");
    for (std::size_t i = 0; i < sample_counts.size(); ++i) {
        if (sample_counts[i] < 1) throw DataError("xapp: sample counts must be >= 1");
        if (i > 0 && sample_counts[i] <= sample_counts[i - 1])
            throw DataError("xapp: sample counts must be strictly increasing");
    }
}

BitrateClass classify_bitrate(double pred_bps, double threshold_bps) {
    return pred_bps <= threshold_bps ? BitrateClass::ZeroBitrate : BitrateClass::NonZeroBitrate;
}

ConfusionCounts evaluate_accuracy(const Network& net, const FeatureMatrix& eval_features,
                                  const TargetVector& eval_targets, double threshold_bps) {
    if (eval_features.n_rows == 0) throw DataError("evaluate_accuracy: empty evaluation set");
    const auto preds = forward(net, eval_features);
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool truth_zero = eval_targets.values[i] == 0.0;
        const bool pred_zero =
            classify_bitrate(preds[i] * eval_targets.scale_factor, threshold_bps) ==
            BitrateClass::ZeroBitrate;
        if (truth_zero && pred_zero) ++c.tp;
        else if (!truth_zero && !pred_zero) ++c.tn;
        else if (!truth_zero && pred_zero) ++c.fp;
        else ++c.fn;
    }
    return c;
}

namespace {

std::string plan_label(const MatchingPlan& plan) {
    std::string label;
    for (const auto& inst : plan.instances) label += inst.instance_id + ";";
    return label;
}

const InstanceSpec& serving_instance(const MatchingPlan& plan, const std::string& target_ru) {
    for (const auto& inst : plan.instances)
        for (const auto& ru : inst.serving)
            if (ru == target_ru) return inst;
    throw DataError("xapp: no instance serves target RU");
}

}  // namespace

SweepResult sweep_xapp(const Trace& trace, const SweepConfig& raw_cfg, const QpConfig& qp) {
    if (trace.kind != TraceKind::PerUe)
        throw DataError("xapp: requires a per-UE trace (per-UE bitrate needed)");
    qp.validate();
    SweepConfig cfg = raw_cfg;
    cfg.x_values.clear();
    for (long long n : qp.sample_counts) cfg.x_values.push_back(static_cast<double>(n));
    cfg.validate(trace);

    const auto parts = partition_by_ru(trace);

    struct Task {
        std::size_t plan_index;
        long long n;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < cfg.plans.size(); ++p)
        for (long long n : qp.sample_counts)
            for (std::uint64_t seed : cfg.seeds) tasks.push_back({p, n, seed});

    SweepResult result;
    result.sweep_kind = "xapp";
    result.metric_is_accuracy = true;
    result.has_confusion = true;
    {
        nlohmann::json j;
        j["sweep"] = "xapp";
        j["target_ru"] = cfg.target_ru;
        j["sample_counts"] = qp.sample_counts;
        j["seeds"] = cfg.seeds;
        j["threshold_bps"] = qp.threshold_bps;
        j["mtc_only"] = qp.mtc_only;
        result.config_echo_json = j.dump();
    }
    result.points.resize(tasks.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) break;
            try {
                const Task& task = tasks[i];
                const MatchingPlan& plan = cfg.plans[task.plan_index];
                const InstanceSpec& inst = serving_instance(plan, cfg.target_ru);
                const std::uint64_t point_seed =
                    derive_seed(task.seed, "plan:" + plan_label(plan));

                // Pooled training rows: every source's train split at its
                // configured fraction.
                std::vector<std::size_t> pool;
                for (const auto& src : inst.training_sources) {
                    const auto& rows = parts.at(src.ru_id);
                    const std::uint64_t ru_seed = derive_seed(task.seed, "ru:" + src.ru_id);
                    const SplitIndices split = train_val_split(rows.size(), ru_seed);
                    const std::vector<std::size_t> chosen =
                        src.fraction >= 1.0 ? split.train
                                            : subsample_fraction(split.train, src.fraction, ru_seed);
                    for (std::size_t local : chosen) pool.push_back(rows[local]);
                }

                CurvePoint point;
                point.plan_id = inst.instance_id;
                point.x = static_cast<double>(task.n);
                point.seed = task.seed;

                if (static_cast<std::size_t>(task.n) > pool.size()) {
                    point.skipped = true;  // not enough pooled rows; flagged, not fatal
                    result.points[i] = std::move(point);
                    continue;
                }

                StreamRng pool_rng(point_seed, 0x504F4F4CULL);  // "POOL" stream
                pool_rng.shuffle(pool);
                pool.resize(static_cast<std::size_t>(task.n));  // nested across sample counts

                auto [train_x, train_y] = encode_features(trace, pool);
                const Normalizer norm = fit_normalizer(default_norm_for(trace), train_x);
                TrainData train_data;
                train_data.features = transform(norm, train_x);
                std::vector<std::size_t> all(train_y.values.size());
                for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
                const TargetVector scaled = scale_targets(train_y, all);
                train_data.targets_scaled = scaled.scaled();

                // Default threshold: half the smallest strictly positive
                // training target.
                double threshold = qp.threshold_bps;
                if (threshold <= 0.0) {
                    double smallest = 0.0;
                    for (double y : train_y.values)
                        if (y > 0.0 && (smallest == 0.0 || y < smallest)) smallest = y;
                    threshold = smallest > 0.0 ? smallest / 2.0 : 1.0;
                }

                // Evaluation: target RU's held-out split, MTC rows by default.
                const auto& target_rows = parts.at(cfg.target_ru);
                const std::uint64_t target_seed = derive_seed(task.seed, "ru:" + cfg.target_ru);
                const SplitIndices target_split = train_val_split(target_rows.size(), target_seed);
                std::vector<std::size_t> eval_rows;
                for (std::size_t local : target_split.val) {
                    const std::size_t g = target_rows[local];
                    if (!qp.mtc_only || trace.ue_records[g].slice == SliceKind::Mtc)
                        eval_rows.push_back(g);
                }
                if (eval_rows.empty()) throw DataError("xapp: empty MTC evaluation set");
                auto [eval_x, eval_y] = encode_features(trace, eval_rows);
                ValData val;
                val.features = transform(norm, eval_x);
                val.targets = eval_y;
                val.targets.scale_factor = scaled.scale_factor;

                TrainConfig train_cfg = cfg.train;
                train_cfg.seed = point_seed;
                const Network initial =
                    init_network(default_spec_for(trace), derive_seed(task.seed, "init"));
                auto [best, report] = train(initial, train_data, val, train_cfg);

                ConfusionCounts counts =
                    evaluate_accuracy(best, val.features, val.targets, threshold);
                point.metric = counts.accuracy_percent();
                point.tp = counts.tp;
                point.tn = counts.tn;
                point.fp = counts.fp;
                point.fn = counts.fn;
                point.epochs = report.epochs_completed;

                MatchingPlan effective = plan;
                const CostReport cost = transfer_delay(effective, trace, cfg.links);
                point.bytes_moved = cost.bytes_moved;
                point.transfer_delay_s = cost.transfer_delay_s;
                result.points[i] = std::move(point);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error = e.what();
                failed.store(true);
            }
        }
    };
    const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw DataError(error);

    std::sort(result.points.begin(), result.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                  return std::tie(a.plan_id, a.x, a.seed) < std::tie(b.plan_id, b.x, b.seed);
              });
    result.envelope = best_instance_envelope(result.points, true);
    return result;
}

}  // namespace ricmatch
