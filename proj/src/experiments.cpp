#include "ricmatch/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace ricmatch {

void SweepConfig::validate(const Trace& trace) const {
    if (plans.empty()) throw DataError("sweep: no plans");
    if (seeds.empty()) throw DataError("sweep: need at least one seed");
    if (x_values.empty()) throw DataError("sweep: no x values");
    for (std::size_t i = 1; i < x_values.size(); ++i)
        if (x_values[i] <= x_values[i - 1])
            throw DataError("sweep: x_values must be strictly increasing");
    if (std::find(trace.ru_ids.begin(), trace.ru_ids.end(), target_ru) == trace.ru_ids.end())
        throw DataError("sweep: target RU '" + target_ru + "' absent from trace");
    for (const auto& plan : plans) {
        const auto violations = validate_plan(plan);
        if (!violations.empty()) throw DataError("sweep: " + violations.front());
        bool serves_target = false;
        for (const auto& inst : plan.instances)
            for (const auto& ru : inst.serving)
                if (ru == target_ru) serves_target = true;
        if (!serves_target)
            throw DataError("sweep: no instance serves target RU in one of the plans");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& label) {
    // FNV-1a over the label, folded into the base seed.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return seed ^ h;
}

NetworkSpec default_spec_for(const Trace& trace) {
    return trace.kind == TraceKind::PerUe ? NetworkSpec::feed_forward(6)
                                          : NetworkSpec::encoder_decoder(3);
}

NormMode default_norm_for(const Trace& trace) {
    // MinMax for both pipelines: row-L2 on the UE schema lets buffer_bytes
    // (10^4-scale) swamp every informative feature. L2Rows stays available
    // through the preprocess API.
    (void)trace;
    return NormMode::MinMaxFeature;
}

InstanceData build_instance_data(const Trace& trace, const InstanceSpec& instance,
                                 const std::string& target_ru, double fraction_multiplier,
                                 std::uint64_t seed) {
    const auto parts = partition_by_ru(trace);

    std::vector<std::size_t> train_rows;
    std::size_t nominal = 0;
    for (const auto& src : instance.training_sources) {
        auto it = parts.find(src.ru_id);
        if (it == parts.end() || it->second.empty())
            throw DataError("sweep: source RU '" + src.ru_id + "' has no records");
        const auto& rows = it->second;
        nominal += std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::llround(src.fraction * static_cast<double>(rows.size()))));
        const std::uint64_t ru_seed = derive_seed(seed, "ru:" + src.ru_id);
        const SplitIndices split = train_val_split(rows.size(), ru_seed);
        const double eff = src.fraction * fraction_multiplier;
        std::vector<std::size_t> chosen =
            eff >= 1.0 ? split.train : subsample_fraction(split.train, eff, ru_seed);
        for (std::size_t local : chosen) train_rows.push_back(rows[local]);
    }
    if (train_rows.empty()) throw DataError("sweep: instance has no training rows");

    const std::uint64_t target_seed = derive_seed(seed, "ru:" + target_ru);
    const auto& target_rows = parts.at(target_ru);
    const SplitIndices target_split = train_val_split(target_rows.size(), target_seed);
    std::vector<std::size_t> val_rows;
    for (std::size_t local : target_split.val) val_rows.push_back(target_rows[local]);
    if (val_rows.empty()) throw DataError("sweep: target RU validation split is empty");

    auto [train_x, train_y] = encode_features(trace, train_rows);
    auto [val_x, val_y] = encode_features(trace, val_rows);

    InstanceData data;
    data.norm = fit_normalizer(default_norm_for(trace), train_x);
    data.train.features = transform(data.norm, train_x);
    std::vector<std::size_t> all(train_y.values.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const TargetVector scaled = scale_targets(train_y, all);
    data.train.targets_scaled = scaled.scaled();
    data.train_targets_original = train_y.values;
    data.val.features = transform(data.norm, val_x);
    data.val.targets = val_y;
    data.val.targets.scale_factor = scaled.scale_factor;
    data.nominal_records = nominal;
    return data;
}

namespace {

const InstanceSpec& serving_instance(const MatchingPlan& plan, const std::string& target_ru) {
    for (const auto& inst : plan.instances)
        for (const auto& ru : inst.serving)
            if (ru == target_ru) return inst;
    throw DataError("sweep: no instance serves target RU");
}

void run_parallel(std::size_t n_tasks, int jobs, const std::function<void(std::size_t)>& task) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n_tasks)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks || failed.load()) break;
                try {
                    task(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    error = e.what();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) throw DataError(error);
}

MatchingPlan scale_plan(const MatchingPlan& plan, double fraction_multiplier) {
    MatchingPlan scaled = plan;
    for (auto& inst : scaled.instances)
        for (auto& src : inst.training_sources)
            src.fraction = std::min(1.0, src.fraction * fraction_multiplier);
    return scaled;
}

std::string config_echo(const Trace& trace, const SweepConfig& cfg, const std::string& kind) {
    nlohmann::json j;
    j["sweep"] = kind;
    j["trace_provenance"] = trace.provenance;
    j["trace_kind"] = trace.kind == TraceKind::PerUe ? "per_ue" : "per_ru";
    j["target_ru"] = cfg.target_ru;
    j["x_values"] = cfg.x_values;
    j["seeds"] = cfg.seeds;
    j["train"] = {{"learning_rate", cfg.train.learning_rate},
                  {"max_epochs", cfg.train.max_epochs},
                  {"batch_size", cfg.train.batch_size}};
    j["links"] = {{"default_bandwidth_bps", cfg.links.default_bandwidth_bps},
                  {"default_base_latency_s", cfg.links.default_base_latency_s},
                  {"record_size_bytes", cfg.links.record_size_bytes}};
    j["compute"] = {{"c_per_sample_s", cfg.compute.c_per_sample_s},
                    {"c_fixed_s", cfg.compute.c_fixed_s}};
    j["plans"] = nlohmann::json::array();
    for (const auto& plan : cfg.plans) j["plans"].push_back(nlohmann::json::parse(plan_to_json(plan)));
    return j.dump();
}

SweepResult run_sweep(const Trace& trace, const SweepConfig& cfg, const std::string& kind) {
    cfg.validate(trace);
    const bool budget_sweep = kind == "time_budget";
    if (budget_sweep) {
        for (double x : cfg.x_values)
            if (x <= 0.0) throw DataError("sweep: budgets must be > 0");
    } else {
        for (double x : cfg.x_values)
            if (!(x > 0.0 && x <= 1.0)) throw DataError("sweep: fractions must be in (0,1]");
    }

    struct Task {
        std::size_t plan_index;
        double x;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < cfg.plans.size(); ++p)
        for (double x : cfg.x_values)
            for (std::uint64_t seed : cfg.seeds) tasks.push_back({p, x, seed});

    const double time_unit = budget_sweep ? normalized_time_unit(trace, cfg.compute) : 0.0;

    SweepResult result;
    result.sweep_kind = kind;
    result.config_echo_json = config_echo(trace, cfg, kind);
    result.points.resize(tasks.size());

    run_parallel(tasks.size(), cfg.jobs, [&](std::size_t i) {
        const Task& task = tasks[i];
        const MatchingPlan& plan = cfg.plans[task.plan_index];
        const InstanceSpec& inst = serving_instance(plan, cfg.target_ru);
        const double fraction = budget_sweep ? 1.0 : task.x;

        InstanceData data = build_instance_data(trace, inst, cfg.target_ru, fraction, task.seed);

        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = derive_seed(task.seed, "train");
        train_cfg.c_per_sample_s = cfg.compute.c_per_sample_s;
        train_cfg.c_fixed_s = cfg.compute.c_fixed_s;
        if (budget_sweep) {
            train_cfg.time_budget_s = task.x * time_unit;
            train_cfg.modeled_sample_count = data.nominal_records;
        }

        // Plans under one seed share an initialization so curves compare
        // data choices, not init draws.
        const Network initial =
            init_network(default_spec_for(trace), derive_seed(task.seed, "init"));
        auto [best, report] = train(initial, data.train, data.val, train_cfg);

        const CostReport cost =
            transfer_delay(budget_sweep ? plan : scale_plan(plan, fraction), trace, cfg.links);

        CurvePoint point;
        point.plan_id = inst.instance_id;
        point.x = task.x;
        point.seed = task.seed;
        point.metric = evaluate_mape(best, data.val.features, data.val.targets).mape_percent;
        point.bytes_moved = cost.bytes_moved;
        point.transfer_delay_s = cost.transfer_delay_s;
        point.epochs = report.epochs_completed;
        result.points[i] = std::move(point);
    });

    std::sort(result.points.begin(), result.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return std::tie(a.plan_id, a.x, a.seed) < std::tie(b.plan_id, b.x, b.seed);
    });
    result.envelope = best_instance_envelope(result.points, false);
    return result;
}

}  // namespace

SweepResult sweep_data_fraction(const Trace& trace, const SweepConfig& cfg) {
    return run_sweep(trace, cfg, "data_fraction");
}

SweepResult sweep_time_budget(const Trace& trace, const SweepConfig& cfg) {
    return run_sweep(trace, cfg, "time_budget");
}

std::vector<EnvelopePoint> best_instance_envelope(const std::vector<CurvePoint>& points,
                                                  bool metric_is_accuracy) {
    struct Agg {
        double metric_sum = 0.0;
        double bytes_sum = 0.0;
        std::size_t n = 0;
    };
    std::map<double, std::map<std::string, Agg>> by_x;
    for (const auto& p : points) {
        if (p.skipped) continue;
        auto& agg = by_x[p.x][p.plan_id];
        agg.metric_sum += p.metric;
        agg.bytes_sum += static_cast<double>(p.bytes_moved);
        ++agg.n;
    }
    std::vector<EnvelopePoint> envelope;
    for (const auto& [x, plans] : by_x) {
        bool have = false;
        EnvelopePoint bestp;
        double best_bytes = 0.0;
        for (const auto& [plan_id, agg] : plans) {
            const double metric = agg.metric_sum / static_cast<double>(agg.n);
            const double bytes = agg.bytes_sum / static_cast<double>(agg.n);
            bool better = false;
            if (!have) {
                better = true;
            } else if (metric != bestp.metric) {
                better = metric_is_accuracy ? metric > bestp.metric : metric < bestp.metric;
            } else if (bytes != best_bytes) {
                better = bytes < best_bytes;
            }  // map iteration is already lexicographic on plan_id
            if (better) {
                bestp = {x, plan_id, metric};
                best_bytes = bytes;
                have = true;
            }
        }
        if (have) envelope.push_back(bestp);
    }
    return envelope;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "plan_id,x,seed,metric,bytes_moved,transfer_delay_s,epochs";
    if (result.has_confusion) out << ",tp,tn,fp,fn";
    out << ",skipped\n";
    for (const auto& p : result.points) {
        out << p.plan_id << ',' << fmt(p.x) << ',' << p.seed << ',' << fmt(p.metric) << ','
            << p.bytes_moved << ',' << fmt(p.transfer_delay_s) << ',' << p.epochs;
        if (result.has_confusion)
            out << ',' << p.tp << ',' << p.tn << ',' << p.fp << ',' << p.fn;
        out << ',' << (p.skipped ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string sweep_summary_json(const SweepResult& result) {
    nlohmann::json j;
    j["sweep"] = result.sweep_kind;
    j["metric"] = result.metric_is_accuracy ? "accuracy_percent" : "mape_percent";
    j["config"] = nlohmann::json::parse(result.config_echo_json);
    j["envelope"] = nlohmann::json::array();
    for (const auto& e : result.envelope)
        j["envelope"].push_back({{"x", e.x}, {"plan_id", e.plan_id}, {"metric", e.metric}});
    return j.dump(2);
}

}  // namespace ricmatch
