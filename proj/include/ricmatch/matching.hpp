#ifndef RICMATCH_MATCHING_HPP
#define RICMATCH_MATCHING_HPP

#include <string>
#include <vector>

#include "ricmatch/trace.hpp"

namespace ricmatch {

struct SourceRef {
    std::string ru_id;
    double fraction = 1.0;  // (0, 1]
};

/// One model instance: the RU data it trains on and the RUs it serves.
struct InstanceSpec {
    std::string instance_id;
    std::vector<SourceRef> training_sources;
    std::vector<std::string> serving;
};

struct MatchingPlan {
    std::vector<InstanceSpec> instances;
    std::vector<std::string> ru_ids;
};

/// Single instance trained on all RUs' data, serving all of them.
MatchingPlan plan_hoard(const std::vector<std::string>& ru_ids);

/// Single instance trained on one RU's data, serving one (possibly different)
/// RU.
MatchingPlan plan_choose_single(const std::string& source_ru, const std::string& target_ru,
                                const std::vector<std::string>& ru_ids);

/// Empty result means the plan satisfies all invariants.
std::vector<std::string> validate_plan(const MatchingPlan& plan);

std::string plan_to_json(const MatchingPlan& plan);
MatchingPlan plan_from_json(const std::string& json_text, const std::vector<std::string>& ru_ids);

/// Empirical 1-D Wasserstein-1: both samples are resampled to
/// n = max(|a|,|b|) equally spaced quantiles and paired.
double wasserstein1(std::vector<double> a, std::vector<double> b);

/// Mean over feature/target columns and RU pairs of the pairwise Wasserstein-1
/// distance, normalized by each column's global standard deviation.
double heterogeneity_score(const Trace& trace);

}  // namespace ricmatch

#endif
