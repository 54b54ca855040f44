#include <doctest.h>

#include "ricmatch/netcost.hpp"

using namespace ricmatch;

namespace {

Trace uniform_trace(int n_rus, int per_ru) {
    GenConfig cfg;
    cfg.n_rus = n_rus;
    cfg.samples_per_ru = per_ru;
    cfg.seed = 1;
    return gen_homogeneous(cfg);
}

}  // namespace

TEST_CASE("transfer_delay: hand evaluation of a single source") {
    const Trace trace = uniform_trace(1, 1000);
    LinkModel links;
    links.default_bandwidth_bps = 1e6;
    links.default_base_latency_s = 0.0;
    links.record_size_bytes = 64;
    const CostReport r = transfer_delay(plan_hoard(trace.ru_ids), trace, links);
    CHECK(r.bytes_moved == 64000);
    CHECK(r.transfer_delay_s == doctest::Approx(64000.0 * 8.0 / 1e6));  // 0.512 s
}

TEST_CASE("transfer_delay: tiny fraction clamps to one record") {
    const Trace trace = uniform_trace(1, 1000);
    MatchingPlan plan = plan_hoard(trace.ru_ids);
    plan.instances[0].training_sources[0].fraction = 1e-9;
    LinkModel links;
    links.default_base_latency_s = 0.25;
    const CostReport r = transfer_delay(plan, trace, links);
    CHECK(r.bytes_moved == links.record_size_bytes);
    CHECK(r.transfer_delay_s > 0.25);
}

TEST_CASE("transfer_delay: hoard moves n_rus times a single choose plan's bytes") {
    const Trace trace = uniform_trace(4, 500);
    const LinkModel links;
    const CostReport hoard = transfer_delay(plan_hoard(trace.ru_ids), trace, links);
    const CostReport choose =
        transfer_delay(plan_choose_single("RU1", "RU1", trace.ru_ids), trace, links);
    CHECK(hoard.bytes_moved == 4 * choose.bytes_moved);
    CHECK(hoard.transfer_delay_s >= choose.transfer_delay_s);
}

TEST_CASE("transfer_delay: parallel sources aggregate by max, serial by sum") {
    const Trace trace = uniform_trace(3, 100);
    const LinkModel links;
    const MatchingPlan plan = plan_hoard(trace.ru_ids);
    const CostReport par = transfer_delay(plan, trace, links, false);
    const CostReport ser = transfer_delay(plan, trace, links, true);
    CHECK(ser.transfer_delay_s == doctest::Approx(3.0 * par.transfer_delay_s));
}

TEST_CASE("transfer_delay: plan RU absent from trace is an error") {
    const Trace trace = uniform_trace(2, 10);
    MatchingPlan plan = plan_hoard(trace.ru_ids);
    plan.instances[0].training_sources[0].ru_id = "RU9";
    CHECK_THROWS_AS(transfer_delay(plan, trace, LinkModel{}), DataError);
}

TEST_CASE("modeled_training_time: linearity and hand value") {
    ComputeModel compute;
    compute.c_per_sample_s = 1e-6;
    compute.c_fixed_s = 1e-3;
    CHECK(modeled_training_time(100, 0, compute) == 0.0);
    CHECK(modeled_training_time(10000, 100, compute) == doctest::Approx(1.1));

    ComputeModel no_fixed;
    no_fixed.c_per_sample_s = 3e-7;
    no_fixed.c_fixed_s = 0.0;
    CHECK(modeled_training_time(2000, 7, no_fixed) ==
          doctest::Approx(2.0 * modeled_training_time(1000, 7, no_fixed)));
    CHECK(modeled_training_time(1000, 14, no_fixed) ==
          doctest::Approx(2.0 * modeled_training_time(1000, 7, no_fixed)));
}

TEST_CASE("normalized_time_unit: 100 hoard epochs over the whole trace") {
    const Trace trace = uniform_trace(4, 250);  // 1000 records total
    ComputeModel compute;
    compute.c_per_sample_s = 1e-6;
    compute.c_fixed_s = 2e-3;
    CHECK(normalized_time_unit(trace, compute) == doctest::Approx(100.0 * (2e-3 + 1e-3)));
}

TEST_CASE("normalized budget algebra: 0.25 units run a quarter of the hoard epochs") {
    ComputeModel compute;
    compute.c_per_sample_s = 1e-6;
    const Trace trace = uniform_trace(4, 1000);
    const double unit = normalized_time_unit(trace, compute);
    const double epoch = modeled_training_time(trace.size(), 1, compute);
    CHECK(0.25 * unit / epoch == doctest::Approx(25.0));
    // A choose instance over a quarter of the data fits 4x the epochs.
    const double choose_epoch = modeled_training_time(trace.size() / 4, 1, compute);
    CHECK(1.0 * unit / choose_epoch == doctest::Approx(400.0));
}
