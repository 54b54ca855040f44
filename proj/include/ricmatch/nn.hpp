#ifndef RICMATCH_NN_HPP
#define RICMATCH_NN_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ricmatch/preprocess.hpp"

namespace ricmatch {

/// Raised when training hits a non-finite loss. Maps to exit code 3 in the
/// CLI.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { Sigmoid, Tanh };

struct NetworkSpec {
    std::vector<std::size_t> layer_widths;  // including input and output
    Activation hidden_activation = Activation::Sigmoid;

    void validate() const;

    /// Feed-forward net used for per-UE bitrate prediction.
    static NetworkSpec feed_forward(std::size_t n_inputs) {
        return {{n_inputs, 30, 30, 1}, Activation::Sigmoid};
    }
    /// Encoder-decoder-shaped net used for per-RU aggregate prediction.
    static NetworkSpec encoder_decoder(std::size_t n_inputs) {
        return {{n_inputs, 16, 64, 32, 32, 1}, Activation::Tanh};
    }
};

struct Layer {
    std::vector<double> weights;  // fan_out x fan_in, row-major
    std::vector<double> biases;   // fan_out
};

struct Network {
    NetworkSpec spec;
    std::vector<Layer> layers;
};

/// Gradients (or Adam moments) with the same shape as Network parameters.
struct ParamGrads {
    std::vector<Layer> layers;
};

struct AdamState {
    ParamGrads m;
    ParamGrads v;
    long long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int max_epochs = 100;
    std::size_t batch_size = 512;
    std::uint64_t seed = 0;
    std::optional<double> time_budget_s;  // modeled seconds

    // Modeled per-epoch clock: c_fixed_s + c_per_sample_s * modeled_samples.
    double c_per_sample_s = 1e-6;
    double c_fixed_s = 0.0;
    // Nominal data quantity for the modeled clock; defaults to the actual
    // training row count when unset.
    std::optional<std::size_t> modeled_sample_count;
};

struct TrainReport {
    std::vector<double> train_mse;       // per epoch, training space
    std::vector<double> val_mape;        // per epoch, percent
    std::vector<double> epoch_time_s;    // modeled
    int epochs_completed = 0;
    double best_val_mape = std::numeric_limits<double>::infinity();
    int best_epoch = -1;  // -1 when no epoch ran
};

struct MapeResult {
    double mape_percent = 0.0;
    bool degenerate = false;  // no strictly positive targets in the set
};

/// Glorot-uniform weights, zero biases; deterministic per seed.
Network init_network(const NetworkSpec& spec, std::uint64_t seed);

std::vector<double> forward(const Network& net, const FeatureMatrix& features);

/// Exact reverse-mode gradients of mean squared error over the batch.
ParamGrads backward(const Network& net, const FeatureMatrix& features,
                    const std::vector<double>& targets_scaled);

void adam_step(Network& net, const ParamGrads& grads, AdamState& state, double learning_rate);

struct TrainData {
    FeatureMatrix features;             // already normalized
    std::vector<double> targets_scaled; // training space
};

struct ValData {
    FeatureMatrix features;      // normalized with the trainer's parameters
    TargetVector targets;        // original scale, carries scale_factor
};

std::pair<Network, TrainReport> train(const Network& initial, const TrainData& train_data,
                                      const ValData& val_data, const TrainConfig& cfg);

/// MAPE over strictly positive targets, in original scale. Predictions are
/// inverted from training space via scale_factor.
MapeResult evaluate_mape(const Network& net, const FeatureMatrix& features,
                         const TargetVector& targets);

/// Relative L2 distance between analytic and central-difference gradients.
double grad_check(const Network& net, const FeatureMatrix& features,
                  const std::vector<double>& targets_scaled, double h);

std::string network_to_json(const Network& net, const Normalizer& norm, double target_scale);
Network network_from_json(const std::string& json_text);

}  // namespace ricmatch

#endif
