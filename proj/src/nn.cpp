#include "ricmatch/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "ricmatch/rng.hpp"

namespace ricmatch {

void NetworkSpec::validate() const {
    if (layer_widths.size() < 2) throw DataError("NetworkSpec: need at least input and output widths");
    for (std::size_t w : layer_widths)
        if (w < 1) throw DataError("NetworkSpec: widths must be >= 1");
    if (layer_widths.back() != 1) throw DataError("NetworkSpec: output width must be 1");
}

namespace {

double activate(Activation a, double z) {
    return a == Activation::Sigmoid ? 1.0 / (1.0 + std::exp(-z)) : std::tanh(z);
}

// Derivative in terms of the activation value h.
double activate_prime(Activation a, double h) {
    return a == Activation::Sigmoid ? h * (1.0 - h) : 1.0 - h * h;
}

ParamGrads zeros_like(const Network& net) {
    ParamGrads g;
    g.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        g.layers[l].weights.assign(net.layers[l].weights.size(), 0.0);
        g.layers[l].biases.assign(net.layers[l].biases.size(), 0.0);
    }
    return g;
}

// fan_in x fan_out copies of each layer's weights; lets the per-row matvec
// accumulate elementwise over outputs, which vectorizes under strict FP.
std::vector<std::vector<double>> transpose_weights(const Network& net) {
    std::vector<std::vector<double>> wt(net.layers.size());
    const auto& widths = net.spec.layer_widths;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        wt[l].resize(fan_in * fan_out);
        for (std::size_t o = 0; o < fan_out; ++o)
            for (std::size_t i = 0; i < fan_in; ++i)
                wt[l][i * fan_out + o] = net.layers[l].weights[o * fan_in + i];
    }
    return wt;
}

// Per-layer activations for one input row; [0] is the input itself.
void forward_row(const Network& net, const std::vector<std::vector<double>>& wt, const double* x,
                 std::vector<std::vector<double>>& acts) {
    const auto& widths = net.spec.layer_widths;
    acts.resize(widths.size());
    acts[0].assign(x, x + widths[0]);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        const bool last = l + 1 == net.layers.size();
        auto& h = acts[l + 1];
        h.assign(layer.biases.begin(), layer.biases.end());
        for (std::size_t i = 0; i < fan_in; ++i) {
            const double xi = acts[l][i];
            const double* w = wt[l].data() + i * fan_out;
            for (std::size_t o = 0; o < fan_out; ++o) h[o] += w[o] * xi;
        }
        if (!last)
            for (std::size_t o = 0; o < fan_out; ++o)
                h[o] = activate(net.spec.hidden_activation, h[o]);
    }
}

double batch_mse(const Network& net, const FeatureMatrix& f, const std::vector<double>& y) {
    const auto preds = forward(net, f);
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - y[i];
        sum += d * d;
    }
    return sum / static_cast<double>(preds.size());
}

}  // namespace

Network init_network(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    Network net;
    net.spec = spec;
    net.layers.resize(spec.layer_widths.size() - 1);
    StreamRng rng(seed, 0x494E4954ULL);  // "INIT" stream
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const std::size_t fan_in = spec.layer_widths[l];
        const std::size_t fan_out = spec.layer_widths[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        auto& layer = net.layers[l];
        layer.weights.resize(fan_out * fan_in);
        for (auto& w : layer.weights) w = (2.0 * rng.next_unit() - 1.0) * bound;
        layer.biases.assign(fan_out, 0.0);
    }
    return net;
}

std::vector<double> forward(const Network& net, const FeatureMatrix& features) {
    if (features.n_cols != net.spec.layer_widths.front())
        throw DataError("forward: feature width mismatch");
    std::vector<double> out(features.n_rows);
    const auto wt = transpose_weights(net);
    std::vector<std::vector<double>> acts;
    for (std::size_t r = 0; r < features.n_rows; ++r) {
        forward_row(net, wt, features.values.data() + r * features.n_cols, acts);
        out[r] = acts.back()[0];
    }
    return out;
}

ParamGrads backward(const Network& net, const FeatureMatrix& features,
                    const std::vector<double>& targets_scaled) {
    if (features.n_rows != targets_scaled.size())
        throw DataError("backward: feature/target size mismatch");
    if (features.n_cols != net.spec.layer_widths.front())
        throw DataError("backward: feature width mismatch");

    ParamGrads grads = zeros_like(net);
    const auto& widths = net.spec.layer_widths;
    const double inv_n = 1.0 / static_cast<double>(features.n_rows);

    const auto wt = transpose_weights(net);
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, delta_prev;
    for (std::size_t r = 0; r < features.n_rows; ++r) {
        forward_row(net, wt, features.values.data() + r * features.n_cols, acts);
        // d(mean (yhat - y)^2)/d(yhat) for this row
        delta.assign(1, 2.0 * (acts.back()[0] - targets_scaled[r]) * inv_n);
        for (std::size_t l = net.layers.size(); l-- > 0;) {
            const std::size_t fan_in = widths[l];
            const std::size_t fan_out = widths[l + 1];
            auto& g = grads.layers[l];
            for (std::size_t o = 0; o < fan_out; ++o) {
                g.biases[o] += delta[o];
                double* gw = g.weights.data() + o * fan_in;
                for (std::size_t i = 0; i < fan_in; ++i) gw[i] += delta[o] * acts[l][i];
            }
            if (l == 0) break;
            delta_prev.assign(fan_in, 0.0);
            const auto& layer = net.layers[l];
            for (std::size_t o = 0; o < fan_out; ++o) {
                const double* w = layer.weights.data() + o * fan_in;
                for (std::size_t i = 0; i < fan_in; ++i) delta_prev[i] += w[i] * delta[o];
            }
            for (std::size_t i = 0; i < fan_in; ++i)
                delta_prev[i] *= activate_prime(net.spec.hidden_activation, acts[l][i]);
            delta.swap(delta_prev);
        }
    }
    return grads;
}

void adam_step(Network& net, const ParamGrads& grads, AdamState& state, double learning_rate) {
    if (state.step == 0 && state.m.layers.empty()) {
        state.m = zeros_like(net);
        state.v = zeros_like(net);
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                          std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t k = 0; k < theta.size(); ++k) {
                m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
                v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
                const double m_hat = m[k] / bc1;
                const double v_hat = v[k] / bc2;
                theta[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
            }
        };
        update(net.layers[l].weights, grads.layers[l].weights, state.m.layers[l].weights,
               state.v.layers[l].weights);
        update(net.layers[l].biases, grads.layers[l].biases, state.m.layers[l].biases,
               state.v.layers[l].biases);
    }
}

MapeResult evaluate_mape(const Network& net, const FeatureMatrix& features,
                         const TargetVector& targets) {
    const auto preds = forward(net, features);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double y = targets.values[i];
        if (y <= 0.0) continue;
        const double y_hat = preds[i] * targets.scale_factor;
        sum += std::abs(y - y_hat) / y;
        ++n;
    }
    if (n == 0) return {0.0, true};
    return {100.0 * sum / static_cast<double>(n), false};
}

std::pair<Network, TrainReport> train(const Network& initial, const TrainData& train_data,
                                      const ValData& val_data, const TrainConfig& cfg) {
    if (train_data.features.n_rows == 0) throw DataError("train: empty training set");
    if (val_data.features.n_rows == 0) throw DataError("train: empty validation set");
    if (cfg.learning_rate <= 0.0) throw DataError("train: learning_rate must be > 0");
    if (cfg.batch_size < 1) throw DataError("train: batch_size must be >= 1");

    const std::size_t n = train_data.features.n_rows;
    const std::size_t modeled_n = cfg.modeled_sample_count.value_or(n);
    const double epoch_time =
        cfg.c_fixed_s + cfg.c_per_sample_s * static_cast<double>(modeled_n);

    int epoch_cap = cfg.max_epochs;
    if (cfg.time_budget_s) {
        const long long allowed =
            epoch_time > 0.0
                ? static_cast<long long>(std::floor(*cfg.time_budget_s / epoch_time + 1e-9))
                : static_cast<long long>(cfg.max_epochs);
        epoch_cap = static_cast<int>(std::clamp<long long>(allowed, 0, cfg.max_epochs));
    }

    Network net = initial;
    Network best = initial;
    AdamState state;
    TrainReport report;
    StreamRng shuffle_rng(cfg.seed, 0x53485546ULL);  // "SHUF" stream

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    FeatureMatrix batch;
    batch.n_cols = train_data.features.n_cols;
    std::vector<double> batch_y;

    for (int epoch = 0; epoch < epoch_cap; ++epoch) {
        shuffle_rng.shuffle(order);
        double sq_sum = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            batch.n_rows = stop - start;
            batch.values.resize(batch.n_rows * batch.n_cols);
            batch_y.resize(batch.n_rows);
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t src = order[i];
                std::copy_n(train_data.features.values.data() + src * batch.n_cols, batch.n_cols,
                            batch.values.data() + (i - start) * batch.n_cols);
                batch_y[i - start] = train_data.targets_scaled[src];
            }
            sq_sum += batch_mse(net, batch, batch_y) * static_cast<double>(batch.n_rows);
            const ParamGrads grads = backward(net, batch, batch_y);
            adam_step(net, grads, state, cfg.learning_rate);
        }
        const double mse = sq_sum / static_cast<double>(n);
        if (!std::isfinite(mse))
            throw NumericError("non-finite training loss at epoch " + std::to_string(epoch + 1));

        const MapeResult val = evaluate_mape(net, val_data.features, val_data.targets);
        report.train_mse.push_back(mse);
        report.val_mape.push_back(val.mape_percent);
        report.epoch_time_s.push_back(epoch_time);
        ++report.epochs_completed;
        if (val.mape_percent < report.best_val_mape) {
            report.best_val_mape = val.mape_percent;
            report.best_epoch = epoch;
            best = net;
        }
    }
    if (report.best_epoch < 0) best = initial;
    return {std::move(best), std::move(report)};
}

double grad_check(const Network& net, const FeatureMatrix& features,
                  const std::vector<double>& targets_scaled, double h) {
    if (h <= 0.0) throw DataError("grad_check: h must be > 0");
    const ParamGrads analytic = backward(net, features, targets_scaled);
    Network probe = net;
    // Whole-vector norm ratio |a - n| / max(|a|, |n|); per-component ratios
    // are noise-dominated wherever the true gradient is near zero.
    double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;

    auto check = [&](std::vector<double>& theta, const std::vector<double>& g) {
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double saved = theta[k];
            theta[k] = saved + h;
            const double up = batch_mse(probe, features, targets_scaled);
            theta[k] = saved - h;
            const double down = batch_mse(probe, features, targets_scaled);
            theta[k] = saved;
            const double numeric = (up - down) / (2.0 * h);
            diff_sq += (g[k] - numeric) * (g[k] - numeric);
            analytic_sq += g[k] * g[k];
            numeric_sq += numeric * numeric;
        }
    };
    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        check(probe.layers[l].weights, analytic.layers[l].weights);
        check(probe.layers[l].biases, analytic.layers[l].biases);
    }
    const double denom = std::max({std::sqrt(analytic_sq), std::sqrt(numeric_sq), 1e-12});
    return std::sqrt(diff_sq) / denom;
}

std::string network_to_json(const Network& net, const Normalizer& norm, double target_scale) {
    nlohmann::json j;
    j["spec"]["layer_widths"] = net.spec.layer_widths;
    j["spec"]["hidden_activation"] =
        net.spec.hidden_activation == Activation::Sigmoid ? "sigmoid" : "tanh";
    j["spec"]["output_activation"] = "linear";
    for (const auto& layer : net.layers) {
        j["layers"].push_back({{"weights", layer.weights}, {"biases", layer.biases}});
    }
    j["normalizer"]["mode"] = norm.mode == NormMode::L2Rows ? "l2_rows" : "minmax_feature";
    if (norm.mode == NormMode::MinMaxFeature) {
        j["normalizer"]["feature_min"] = norm.feature_min;
        j["normalizer"]["feature_max"] = norm.feature_max;
    }
    j["target_scale_factor"] = target_scale;
    return j.dump(2);
}

Network network_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad checkpoint JSON: ") + e.what());
    }
    Network net;
    net.spec.layer_widths = j.at("spec").at("layer_widths").get<std::vector<std::size_t>>();
    net.spec.hidden_activation = j.at("spec").at("hidden_activation").get<std::string>() == "tanh"
                                     ? Activation::Tanh
                                     : Activation::Sigmoid;
    net.spec.validate();
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        layer.weights = jl.at("weights").get<std::vector<double>>();
        layer.biases = jl.at("biases").get<std::vector<double>>();
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.size() + 1 != net.spec.layer_widths.size())
        throw DataError("bad checkpoint JSON: layer count mismatch");
    return net;
}

}  // namespace ricmatch
