#include "ricmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "ricmatch/preprocess.hpp"

namespace ricmatch {

MatchingPlan plan_hoard(const std::vector<std::string>& ru_ids) {
    if (ru_ids.empty()) throw DataError("plan_hoard: empty RU set");
    InstanceSpec inst;
    inst.instance_id = "hoard";
    for (const auto& ru : ru_ids) inst.training_sources.push_back({ru, 1.0});
    inst.serving = ru_ids;
    return {{std::move(inst)}, ru_ids};
}

MatchingPlan plan_choose_single(const std::string& source_ru, const std::string& target_ru,
                                const std::vector<std::string>& ru_ids) {
    auto known = [&](const std::string& ru) {
        return std::find(ru_ids.begin(), ru_ids.end(), ru) != ru_ids.end();
    };
    if (!known(source_ru)) throw DataError("plan_choose_single: unknown source RU '" + source_ru + "'");
    if (!known(target_ru)) throw DataError("plan_choose_single: unknown target RU '" + target_ru + "'");
    InstanceSpec inst;
    inst.instance_id = "choose-" + source_ru;
    inst.training_sources.push_back({source_ru, 1.0});
    inst.serving.push_back(target_ru);
    return {{std::move(inst)}, ru_ids};
}

std::vector<std::string> validate_plan(const MatchingPlan& plan) {
    std::vector<std::string> violations;
    const std::set<std::string> known(plan.ru_ids.begin(), plan.ru_ids.end());
    std::map<std::string, int> served_count;

    for (const auto& inst : plan.instances) {
        if (inst.training_sources.empty())
            violations.push_back("instance " + inst.instance_id + " has no training sources");
        if (inst.serving.empty())
            violations.push_back("instance " + inst.instance_id + " serves no RU");
        for (const auto& src : inst.training_sources) {
            if (!known.count(src.ru_id))
                violations.push_back("instance " + inst.instance_id + " references unknown RU " +
                                     src.ru_id);
            if (!(src.fraction > 0.0 && src.fraction <= 1.0))
                violations.push_back("instance " + inst.instance_id + " has fraction " +
                                     std::to_string(src.fraction) + " outside (0,1] for RU " +
                                     src.ru_id);
        }
        for (const auto& ru : inst.serving) {
            if (!known.count(ru))
                violations.push_back("instance " + inst.instance_id + " serves unknown RU " + ru);
            ++served_count[ru];
        }
    }
    for (const auto& [ru, count] : served_count) {
        if (count > 1) violations.push_back("RU " + ru + " served twice");
    }
    return violations;
}

std::string plan_to_json(const MatchingPlan& plan) {
    nlohmann::json j;
    j["instances"] = nlohmann::json::array();
    for (const auto& inst : plan.instances) {
        nlohmann::json ji;
        ji["id"] = inst.instance_id;
        ji["sources"] = nlohmann::json::array();
        for (const auto& src : inst.training_sources)
            ji["sources"].push_back({{"ru", src.ru_id}, {"fraction", src.fraction}});
        ji["serving"] = inst.serving;
        j["instances"].push_back(std::move(ji));
    }
    return j.dump(2);
}

MatchingPlan plan_from_json(const std::string& json_text, const std::vector<std::string>& ru_ids) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad plan JSON: ") + e.what());
    }
    MatchingPlan plan;
    plan.ru_ids = ru_ids;
    try {
        for (const auto& ji : j.at("instances")) {
            InstanceSpec inst;
            inst.instance_id = ji.at("id").get<std::string>();
            for (const auto& js : ji.at("sources"))
                inst.training_sources.push_back(
                    {js.at("ru").get<std::string>(), js.at("fraction").get<double>()});
            inst.serving = ji.at("serving").get<std::vector<std::string>>();
            plan.instances.push_back(std::move(inst));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad plan JSON: ") + e.what());
    }
    const auto violations = validate_plan(plan);
    if (!violations.empty()) throw DataError("invalid plan: " + violations.front());
    return plan;
}

namespace {

// Linear-interpolation quantile of a sorted sample at p in [0,1].
double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.size() == 1) return sorted[0];
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + (sorted[i + 1] - sorted[i]) * frac;
}

}  // namespace

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DataError("wasserstein1: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = std::max(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
        sum += std::abs(quantile(a, p) - quantile(b, p));
    }
    return sum / static_cast<double>(n);
}

double heterogeneity_score(const Trace& trace) {
    if (trace.ru_ids.size() < 2) throw DataError("heterogeneity_score: need >= 2 RUs");
    const auto [features, targets] = encode_features(trace);
    const auto parts = partition_by_ru(trace);
    const std::size_t n_cols = features.n_cols + 1;  // features plus target

    auto column_value = [&](std::size_t row, std::size_t col) {
        return col < features.n_cols ? features.at(row, col) : targets.values[row];
    };

    double total = 0.0;
    std::size_t terms = 0;
    for (std::size_t col = 0; col < n_cols; ++col) {
        double mean = 0.0;
        for (std::size_t r = 0; r < features.n_rows; ++r) mean += column_value(r, col);
        mean /= static_cast<double>(features.n_rows);
        double var = 0.0;
        for (std::size_t r = 0; r < features.n_rows; ++r) {
            const double d = column_value(r, col) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(features.n_rows));

        for (std::size_t i = 0; i < trace.ru_ids.size(); ++i) {
            for (std::size_t j = i + 1; j < trace.ru_ids.size(); ++j) {
                ++terms;
                if (sd == 0.0) continue;  // constant column contributes 0
                std::vector<double> a, b;
                for (std::size_t r : parts.at(trace.ru_ids[i])) a.push_back(column_value(r, col));
                for (std::size_t r : parts.at(trace.ru_ids[j])) b.push_back(column_value(r, col));
                if (a.empty() || b.empty()) continue;
                total += wasserstein1(std::move(a), std::move(b)) / sd;
            }
        }
    }
    return terms == 0 ? 0.0 : total / static_cast<double>(terms);
}

}  // namespace ricmatch
