#include <doctest.h>

#include <cmath>

#include "ricmatch/matching.hpp"
#include "ricmatch/rng.hpp"

using namespace ricmatch;

namespace {

const std::vector<std::string> kFourRus = {"RU1", "RU2", "RU3", "RU4"};

GenConfig cfg(int n_rus, int samples, std::uint64_t seed) {
    GenConfig c;
    c.n_rus = n_rus;
    c.samples_per_ru = samples;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("plan_hoard: one instance sourcing and serving all RUs") {
    const MatchingPlan plan = plan_hoard(kFourRus);
    REQUIRE(plan.instances.size() == 1);
    CHECK(plan.instances[0].training_sources.size() == 4);
    CHECK(plan.instances[0].serving.size() == 4);
    for (const auto& src : plan.instances[0].training_sources) CHECK(src.fraction == 1.0);
    CHECK(validate_plan(plan).empty());
    CHECK_THROWS_AS(plan_hoard({}), DataError);
}

TEST_CASE("plan_hoard: single RU degenerates to choose") {
    const MatchingPlan hoard = plan_hoard({"RU1"});
    const MatchingPlan choose = plan_choose_single("RU1", "RU1", {"RU1"});
    REQUIRE(hoard.instances.size() == 1);
    REQUIRE(choose.instances.size() == 1);
    CHECK(hoard.instances[0].training_sources.size() == 1);
    CHECK(choose.instances[0].training_sources.size() == 1);
    CHECK(hoard.instances[0].serving == choose.instances[0].serving);
}

TEST_CASE("plan_choose_single: cross-location serving and unknown RU errors") {
    const MatchingPlan plan = plan_choose_single("RU3", "RU4", kFourRus);
    REQUIRE(plan.instances.size() == 1);
    CHECK(plan.instances[0].training_sources[0].ru_id == "RU3");
    CHECK(plan.instances[0].serving == std::vector<std::string>{"RU4"});
    CHECK(validate_plan(plan).empty());
    CHECK_THROWS_AS(plan_choose_single("RUX", "RU1", kFourRus), DataError);
    CHECK_THROWS_AS(plan_choose_single("RU1", "RUX", kFourRus), DataError);
}

TEST_CASE("validate_plan: the flexible three-instance shape passes") {
    // urban1+urban2 -> serve both; residential+rural data -> serve residential;
    // rural -> serve rural.
    MatchingPlan plan;
    plan.ru_ids = {"urban1", "urban2", "residential", "rural"};
    plan.instances = {
        {"inst-urban", {{"urban1", 1.0}, {"urban2", 1.0}}, {"urban1", "urban2"}},
        {"inst-res", {{"residential", 1.0}, {"rural", 1.0}}, {"residential"}},
        {"inst-rural", {{"rural", 1.0}}, {"rural"}},
    };
    CHECK(validate_plan(plan).empty());
}

TEST_CASE("validate_plan: reports duplicated serving and empty sources") {
    MatchingPlan plan;
    plan.ru_ids = {"A", "B"};
    plan.instances = {
        {"i1", {{"A", 1.0}}, {"A", "B"}},
        {"i2", {}, {"B"}},
    };
    const auto violations = validate_plan(plan);
    REQUIRE(violations.size() == 2);
    bool served_twice = false, empty_sources = false;
    for (const auto& v : violations) {
        if (v.find("served twice") != std::string::npos) served_twice = true;
        if (v.find("no training sources") != std::string::npos) empty_sources = true;
    }
    CHECK(served_twice);
    CHECK(empty_sources);
}

TEST_CASE("plan JSON round trip") {
    const MatchingPlan plan = plan_choose_single("RU2", "RU4", kFourRus);
    const MatchingPlan back = plan_from_json(plan_to_json(plan), kFourRus);
    REQUIRE(back.instances.size() == 1);
    CHECK(back.instances[0].instance_id == plan.instances[0].instance_id);
    CHECK(back.instances[0].training_sources[0].ru_id == "RU2");
    CHECK(back.instances[0].serving == plan.instances[0].serving);
    CHECK_THROWS_AS(plan_from_json("{not json", kFourRus), DataError);
}

TEST_CASE("wasserstein1: hand values") {
    CHECK(wasserstein1({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(wasserstein1({0.0, 0.0}, {1.0, 1.0}) == doctest::Approx(1.0));
    CHECK(wasserstein1({0.0, 1.0}, {0.0, 3.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(wasserstein1({}, {1.0}), DataError);
}

TEST_CASE("wasserstein1: symmetry and triangle inequality on random triples") {
    StreamRng rng(31, 0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> a(20), b(20), c(20);
        for (auto& v : a) v = rng.normal(0.0, 1.0);
        for (auto& v : b) v = rng.normal(1.0, 2.0);
        for (auto& v : c) v = rng.normal(-2.0, 0.5);
        const double ab = wasserstein1(a, b);
        const double ba = wasserstein1(b, a);
        const double ac = wasserstein1(a, c);
        const double cb = wasserstein1(c, b);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("heterogeneity_score: identical per-RU data scores exactly 0") {
    Trace t;
    t.kind = TraceKind::PerRu;
    t.ru_ids = {"A", "B"};
    for (int i = 0; i < 10; ++i) {
        t.ru_records.push_back({"A", 10.0 + i, 50.0, 20 + i, 1e6 * (i + 1)});
        t.ru_records.push_back({"B", 10.0 + i, 50.0, 20 + i, 1e6 * (i + 1)});
    }
    CHECK(heterogeneity_score(t) == 0.0);
}

TEST_CASE("heterogeneity_score: heterogeneous generator scores above homogeneous") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GenConfig het = cfg(3, 2000, seed);
        het.load_scale = {1.0, 2.5, 4.0};
        GenConfig hom = cfg(3, 2000, seed);
        CHECK(heterogeneity_score(gen_heterogeneous(het)) >
              heterogeneity_score(gen_homogeneous(hom)));
    }
}

TEST_CASE("heterogeneity_score: invariant to uniform rescaling of the target") {
    GenConfig c = cfg(3, 1000, 13);
    c.load_scale = {1.0, 2.5, 4.0};
    Trace t = gen_heterogeneous(c);
    const double base = heterogeneity_score(t);
    for (auto& r : t.ru_records) r.agg_dl_bitrate_bps *= 1000.0;
    CHECK(heterogeneity_score(t) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("heterogeneity_score: fewer than 2 RUs is an error") {
    Trace t;
    t.kind = TraceKind::PerRu;
    t.ru_ids = {"A"};
    t.ru_records.push_back({"A", 1, 1, 1, 1});
    CHECK_THROWS_AS(heterogeneity_score(t), DataError);
}
