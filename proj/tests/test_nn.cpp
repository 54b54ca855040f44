#include <doctest.h>

#include <cmath>

#include "ricmatch/nn.hpp"
#include "ricmatch/rng.hpp"

using namespace ricmatch;

namespace {

FeatureMatrix make_matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    FeatureMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.values = std::move(values);
    return m;
}

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    FeatureMatrix m = make_matrix(rows, cols, std::vector<double>(rows * cols));
    StreamRng rng(seed, 77);
    for (auto& v : m.values) v = rng.normal(0.0, 1.0);
    return m;
}

std::vector<double> random_targets(std::size_t n, std::uint64_t seed) {
    std::vector<double> y(n);
    StreamRng rng(seed, 78);
    for (auto& v : y) v = rng.normal(0.0, 1.0);
    return y;
}

}  // namespace

TEST_CASE("init_network: shapes, zero biases, seed determinism, Glorot bound") {
    const NetworkSpec spec{{6, 30, 30, 1}, Activation::Sigmoid};
    const Network net = init_network(spec, 5);
    REQUIRE(net.layers.size() == 3);
    CHECK(net.layers[0].weights.size() == 30 * 6);
    CHECK(net.layers[1].weights.size() == 30 * 30);
    CHECK(net.layers[2].weights.size() == 1 * 30);
    for (const auto& layer : net.layers)
        for (double b : layer.biases) CHECK(b == 0.0);

    const Network again = init_network(spec, 5);
    CHECK(net.layers[1].weights == again.layers[1].weights);

    // 30x30 layer: |w| < sqrt(6/60) for all seeds.
    const double bound = std::sqrt(6.0 / 60.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Network n = init_network(spec, seed);
        for (double w : n.layers[1].weights) CHECK(std::abs(w) < bound);
    }
}

TEST_CASE("forward: closed-form values") {
    SUBCASE("all-zero sigmoid net [2,1,1] outputs 0") {
        Network net;
        net.spec = {{2, 1, 1}, Activation::Sigmoid};
        net.layers = {{{0.0, 0.0}, {0.0}}, {{0.0}, {0.0}}};
        const auto out = forward(net, make_matrix(1, 2, {3.0, -4.0}));
        // hidden = sigmoid(0) = 0.5, output = 0*0.5 + 0 = 0
        CHECK(out[0] == 0.0);
    }
    SUBCASE("single linear layer [1,1] with w=2, b=1 maps 3 to 7") {
        Network net;
        net.spec = {{1, 1}, Activation::Tanh};
        net.layers = {{{2.0}, {1.0}}};
        CHECK(forward(net, make_matrix(1, 1, {3.0}))[0] == doctest::Approx(7.0));
    }
    SUBCASE("tanh antisymmetry: a bias-free net is odd in its input") {
        Network net = init_network({{3, 8, 1}, Activation::Tanh}, 2);
        for (auto& layer : net.layers)
            for (auto& b : layer.biases) b = 0.0;
        const auto p = forward(net, make_matrix(1, 3, {0.3, -0.7, 1.1}));
        const auto q = forward(net, make_matrix(1, 3, {-0.3, 0.7, -1.1}));
        CHECK(p[0] == doctest::Approx(-q[0]).epsilon(1e-12));
    }
    SUBCASE("width mismatch is an error") {
        const Network net = init_network({{3, 4, 1}, Activation::Sigmoid}, 0);
        CHECK_THROWS_AS(forward(net, make_matrix(1, 2, {1.0, 2.0})), DataError);
    }
}

TEST_CASE("backward: stationary residual gives exactly zero gradients") {
    Network net;
    net.spec = {{1, 1}, Activation::Tanh};
    net.layers = {{{2.0}, {1.0}}};
    // Row x=3 with target 7 means yhat == y.
    const auto grads = backward(net, make_matrix(1, 1, {3.0}), {7.0});
    CHECK(grads.layers[0].weights[0] == 0.0);
    CHECK(grads.layers[0].biases[0] == 0.0);
}

TEST_CASE("backward: hand derivative of a single linear neuron") {
    Network net;
    net.spec = {{1, 1}, Activation::Sigmoid};
    net.layers = {{{1.0}, {0.0}}};
    // loss = (w*x + b - y)^2 with x=1, y=0 -> dL/dw = dL/db = 2.
    const auto grads = backward(net, make_matrix(1, 1, {1.0}), {0.0});
    CHECK(grads.layers[0].weights[0] == doctest::Approx(2.0));
    CHECK(grads.layers[0].biases[0] == doctest::Approx(2.0));
}

TEST_CASE("grad_check: both reference architectures pass at 1e-4") {
    {
        const Network net = init_network({{6, 30, 30, 1}, Activation::Sigmoid}, 3);
        CHECK(grad_check(net, random_matrix(8, 6, 3), random_targets(8, 3), 1e-5) <= 1e-4);
    }
    {
        const Network net = init_network({{3, 16, 64, 32, 32, 1}, Activation::Tanh}, 4);
        CHECK(grad_check(net, random_matrix(8, 3, 4), random_targets(8, 4), 1e-5) <= 1e-4);
    }
}

TEST_CASE("grad_check: zero-gradient point reports ~0 error") {
    Network net;
    net.spec = {{1, 1}, Activation::Tanh};
    net.layers = {{{2.0}, {1.0}}};
    CHECK(grad_check(net, make_matrix(1, 1, {3.0}), {7.0}, 1e-5) < 1e-8);
}

TEST_CASE("adam_step: zero gradient leaves parameters unchanged") {
    Network net = init_network({{2, 3, 1}, Activation::Sigmoid}, 1);
    const Network before = net;
    ParamGrads g;
    g.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        g.layers[l].weights.assign(net.layers[l].weights.size(), 0.0);
        g.layers[l].biases.assign(net.layers[l].biases.size(), 0.0);
    }
    AdamState state;
    adam_step(net, g, state, 0.1);
    CHECK(net.layers[0].weights == before.layers[0].weights);
    CHECK(state.step == 1);
}

TEST_CASE("adam_step: hand evaluation at t=1 on a scalar") {
    Network net;
    net.spec = {{1, 1}, Activation::Tanh};
    net.layers = {{{0.0}, {0.0}}};
    ParamGrads g;
    g.layers = {{{1.0}, {0.0}}};
    AdamState state;
    adam_step(net, g, state, 0.1);
    // m_hat = v_hat = 1, theta' = -0.1 / (1 + 1e-8).
    CHECK(net.layers[0].weights[0] == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam bias correction: first step moves by lr in the -sign(g) direction") {
    for (double g0 : {2.5, -0.03, 1e-6}) {
        Network net;
        net.spec = {{1, 1}, Activation::Tanh};
        net.layers = {{{0.0}, {0.0}}};
        ParamGrads g;
        g.layers = {{{g0}, {0.0}}};
        AdamState state;
        adam_step(net, g, state, 0.01);
        const double step = net.layers[0].weights[0];
        CHECK(step * g0 < 0.0);
        // First step: m_hat = g, sqrt(v_hat) = |g|, so |step| = lr*|g|/(|g|+eps).
        const double expected = 0.01 * std::abs(g0) / (std::abs(g0) + 1e-8);
        CHECK(std::abs(step) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("train: max_epochs = 0 returns the initial net and empty report") {
    const Network initial = init_network({{2, 4, 1}, Activation::Sigmoid}, 0);
    TrainData td{random_matrix(10, 2, 1), random_targets(10, 1)};
    ValData vd;
    vd.features = random_matrix(10, 2, 2);
    vd.targets.values.assign(10, 1.0);
    TrainConfig cfg;
    cfg.max_epochs = 0;
    const auto [net, report] = train(initial, td, vd, cfg);
    CHECK(report.epochs_completed == 0);
    CHECK(report.train_mse.empty());
    CHECK(net.layers[0].weights == initial.layers[0].weights);
}

TEST_CASE("train: budget below one epoch completes zero epochs") {
    const Network initial = init_network({{2, 4, 1}, Activation::Sigmoid}, 0);
    TrainData td{random_matrix(10, 2, 1), random_targets(10, 1)};
    ValData vd;
    vd.features = random_matrix(10, 2, 2);
    vd.targets.values.assign(10, 1.0);
    TrainConfig cfg;
    cfg.max_epochs = 5;
    cfg.c_per_sample_s = 1.0;  // one epoch costs 10 modeled seconds
    cfg.time_budget_s = 5.0;
    const auto [net, report] = train(initial, td, vd, cfg);
    CHECK(report.epochs_completed == 0);
}

TEST_CASE("train: learning-progress oracle on a noiseless linear target") {
    // y = 0.2*x0 + 0.5*x1 + 0.3*x2 with x in [0,1]; scaled targets stay in [0,1].
    StreamRng rng(10, 0);
    const std::size_t n = 400;
    FeatureMatrix x = make_matrix(n, 3, std::vector<double>(n * 3));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = rng.next_unit();
        y[i] = 0.2 * x.at(i, 0) + 0.5 * x.at(i, 1) + 0.3 * x.at(i, 2);
    }
    TrainData td;
    td.features = make_matrix(320, 3, {x.values.begin(), x.values.begin() + 960});
    td.targets_scaled = {y.begin(), y.begin() + 320};
    ValData vd;
    vd.features = make_matrix(80, 3, {x.values.begin() + 960, x.values.end()});
    vd.targets.values = {y.begin() + 320, y.end()};
    vd.targets.scale_factor = 1.0;

    const Network initial = init_network({{3, 16, 64, 32, 32, 1}, Activation::Tanh}, 1);
    const double initial_mape = evaluate_mape(initial, vd.features, vd.targets).mape_percent;
    TrainConfig cfg;
    cfg.max_epochs = 500;
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 64;
    const auto [net, report] = train(initial, td, vd, cfg);
    CHECK(report.best_val_mape < initial_mape);

    // Best-snapshot property: returned net's MAPE equals the report minimum.
    const double returned = evaluate_mape(net, vd.features, vd.targets).mape_percent;
    double min_mape = 1e300;
    for (double m : report.val_mape) min_mape = std::min(min_mape, m);
    CHECK(returned == doctest::Approx(min_mape).epsilon(1e-12));
    CHECK(report.best_val_mape == doctest::Approx(min_mape).epsilon(1e-12));
}

TEST_CASE("train: determinism of the full report") {
    TrainData td{random_matrix(64, 3, 5), random_targets(64, 6)};
    ValData vd;
    vd.features = random_matrix(16, 3, 7);
    vd.targets.values.assign(16, 2.0);
    TrainConfig cfg;
    cfg.max_epochs = 10;
    cfg.batch_size = 16;
    cfg.seed = 9;
    const Network initial = init_network({{3, 8, 1}, Activation::Tanh}, 9);
    const auto [n1, r1] = train(initial, td, vd, cfg);
    const auto [n2, r2] = train(initial, td, vd, cfg);
    CHECK(r1.train_mse == r2.train_mse);
    CHECK(r1.val_mape == r2.val_mape);
    CHECK(n1.layers.back().weights == n2.layers.back().weights);
}

TEST_CASE("evaluate_mape: hand values, zero handling, scale invariance") {
    Network net;
    net.spec = {{1, 1}, Activation::Tanh};
    net.layers = {{{1.0}, {0.0}}};  // identity

    SUBCASE("y=[100], yhat=[90] -> 10%") {
        TargetVector t;
        t.values = {100.0};
        t.scale_factor = 1.0;
        CHECK(evaluate_mape(net, make_matrix(1, 1, {90.0}), t).mape_percent ==
              doctest::Approx(10.0));
    }
    SUBCASE("perfect predictions -> 0") {
        TargetVector t;
        t.values = {3.0, 8.0};
        t.scale_factor = 1.0;
        CHECK(evaluate_mape(net, make_matrix(2, 1, {3.0, 8.0}), t).mape_percent == 0.0);
    }
    SUBCASE("zero targets are skipped: hand evaluation gives 50%") {
        TargetVector t;
        t.values = {0.0, 200.0, 100.0};
        t.scale_factor = 1.0;
        const auto r = evaluate_mape(net, make_matrix(3, 1, {5.0, 100.0, 150.0}), t);
        CHECK(r.mape_percent == doctest::Approx(50.0));
        CHECK_FALSE(r.degenerate);
    }
    SUBCASE("all-zero targets are degenerate") {
        TargetVector t;
        t.values = {0.0, 0.0};
        t.scale_factor = 1.0;
        const auto r = evaluate_mape(net, make_matrix(2, 1, {1.0, 2.0}), t);
        CHECK(r.mape_percent == 0.0);
        CHECK(r.degenerate);
    }
    SUBCASE("scaling y and yhat by c > 0 leaves MAPE unchanged") {
        TargetVector t;
        t.values = {100.0, 40.0};
        t.scale_factor = 1.0;
        const double base =
            evaluate_mape(net, make_matrix(2, 1, {90.0, 50.0}), t).mape_percent;
        TargetVector t2;
        t2.values = {100.0 * 8.0, 40.0 * 8.0};
        t2.scale_factor = 8.0;  // predictions scale through the factor
        const double scaled =
            evaluate_mape(net, make_matrix(2, 1, {90.0, 50.0}), t2).mape_percent;
        CHECK(base == scaled);
    }
}

TEST_CASE("checkpoint JSON round trip") {
    const Network net = init_network({{3, 16, 64, 32, 32, 1}, Activation::Tanh}, 12);
    Normalizer norm = fit_normalizer(NormMode::MinMaxFeature, random_matrix(5, 3, 1));
    const std::string text = network_to_json(net, norm, 2.5e7);
    const Network back = network_from_json(text);
    CHECK(back.spec.layer_widths == net.spec.layer_widths);
    CHECK(back.spec.hidden_activation == net.spec.hidden_activation);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(back.layers[l].weights == net.layers[l].weights);
        CHECK(back.layers[l].biases == net.layers[l].biases);
    }
}
