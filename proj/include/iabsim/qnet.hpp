#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace iabsim {

/// Architecture of the critic: input -> hidden_layers x hidden_width (ReLU)
/// -> one linear output. The reference critic takes the 16-value
/// observation concatenated with the 7-value action one-hot, 23 inputs.
struct NetSpec {
    int input_size = 23;
    int hidden_layers = 1;
    int hidden_width = 32;
    int output_size = 1;

    bool operator==(const NetSpec&) const = default;
};

/// One affine layer, weights row-major (out x in).
struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;
    std::vector<double> biases;
};

/// Adam first/second moment accumulators, shapes mirroring the layers.
struct AdamState {
    struct LayerMoments {
        std::vector<double> m_weights, v_weights;
        std::vector<double> m_biases, v_biases;
    };
    std::vector<LayerMoments> layers;
    long timestep = 0;
};

struct QNetwork {
    NetSpec spec;
    std::vector<Layer> layers;
    AdamState adam;

    std::size_t parameter_count() const;
};

/// Gradient of a scalar loss with respect to every parameter.
struct Gradients {
    struct LayerGrads {
        std::vector<double> weights;
        std::vector<double> biases;
    };
    std::vector<LayerGrads> layers;
};

struct OptimizerConfig {
    double alpha = 0.0001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    bool clip_gradients = false;  // off by default
    double clip_norm = 10.0;
};

struct TrainingSample {
    std::vector<double> input;
    double target = 0.0;
};

/// He-style fan-in uniform weights, zero biases, zeroed Adam state.
/// Deterministic given the seed.
QNetwork init_network(const NetSpec& spec, std::uint64_t seed);

/// Affine + ReLU per hidden layer, linear output; pure.
double forward(const QNetwork& net, std::span<const double> input);

/// Mean squared error over the batch and its exact parameter gradients.
std::pair<double, Gradients> loss_and_gradients(const QNetwork& net,
                                                const std::vector<TrainingSample>& batch);

/// Standard Adam with bias correction; increments the timestep.
void adam_step(QNetwork& net, const Gradients& gradients, const OptimizerConfig& config);

/// Deep-copies parameters (not the Adam state); specs must match.
void copy_parameters(const QNetwork& source, QNetwork& destination);

/// Polyak blend destination <- (1 - tau) * destination + tau * source;
/// tau = 1 is copy_parameters. Specs must match.
void blend_parameters(const QNetwork& source, QNetwork& destination, double tau);

/// Q value of every action: element k is forward on the observation
/// concatenated with one_hot(k); pure.
std::vector<double> q_all_actions(const QNetwork& net, std::span<const double> observation);

/// Versioned JSON-style text format; doubles are hex-float encoded so the
/// round trip is bit-exact.
std::string network_to_json(const QNetwork& net);
QNetwork network_from_json(const std::string& text);
void save_network(const QNetwork& net, const std::string& path);
QNetwork load_network(const std::string& path);

}  // namespace iabsim
