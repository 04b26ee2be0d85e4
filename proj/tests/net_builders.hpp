#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "iabsim/qnet.hpp"
#include "iabsim/util.hpp"

namespace iabsim::testutil {

// Zeroed network of the given shape.
inline QNetwork zero_network(const NetSpec& spec) {
    QNetwork net = init_network(spec, 0);
    for (Layer& layer : net.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
    }
    return net;
}

// Network over (obs_size + n_actions) inputs whose output is exactly
// action_values[k] for one-hot action k, independent of the observation:
// hidden unit h mirrors action input h through the ReLU, the output layer
// weighs it by action_values[h].
inline QNetwork action_value_network(const std::vector<double>& action_values, int obs_size) {
    const int n_actions = static_cast<int>(action_values.size());
    QNetwork net = zero_network(NetSpec{obs_size + n_actions, 1, n_actions, 1});
    Layer& hidden = net.layers[0];
    for (int h = 0; h < n_actions; ++h) {
        hidden.weights[static_cast<std::size_t>(h) * hidden.in + obs_size + h] = 1.0;
    }
    Layer& out = net.layers[1];
    for (int h = 0; h < n_actions; ++h) out.weights[static_cast<std::size_t>(h)] = action_values[static_cast<std::size_t>(h)];
    return net;
}

// Enumerates every parameter of a network as mutable references.
inline std::vector<double*> parameter_refs(QNetwork& net) {
    std::vector<double*> refs;
    for (Layer& layer : net.layers) {
        for (double& w : layer.weights) refs.push_back(&w);
        for (double& b : layer.biases) refs.push_back(&b);
    }
    return refs;
}

inline std::vector<double> flat_parameters(const QNetwork& net) {
    std::vector<double> flat;
    for (const Layer& layer : net.layers) {
        flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
        flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
    }
    return flat;
}

inline std::vector<double> flat_gradients(const Gradients& grads) {
    std::vector<double> flat;
    for (const Gradients::LayerGrads& layer : grads.layers) {
        flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
        flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
    }
    return flat;
}

// Smallest |preactivation| any hidden unit sees over the batch. Central
// finite differences are only trustworthy away from the ReLU kinks, so
// check this stays well above the probe step.
inline double min_preactivation_magnitude(const QNetwork& net, const std::vector<TrainingSample>& batch) {
    double min_abs = std::numeric_limits<double>::max();
    for (const TrainingSample& sample : batch) {
        std::vector<double> a = sample.input;
        std::vector<double> z;
        for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
            const Layer& layer = net.layers[l];
            z.assign(static_cast<std::size_t>(layer.out), 0.0);
            for (int o = 0; o < layer.out; ++o) {
                double acc = layer.biases[static_cast<std::size_t>(o)];
                for (int i = 0; i < layer.in; ++i) {
                    acc += layer.weights[static_cast<std::size_t>(o) * layer.in + i] * a[static_cast<std::size_t>(i)];
                }
                z[static_cast<std::size_t>(o)] = acc;
                min_abs = std::min(min_abs, std::abs(acc));
            }
            for (double& v : z) v = v > 0.0 ? v : 0.0;
            a = z;
        }
    }
    return min_abs;
}

// Worst relative disagreement between the analytic gradients and central
// finite differences, relative to max(1, |analytic|).
inline double max_gradient_mismatch(QNetwork& net, const std::vector<TrainingSample>& batch, double h = 1e-5) {
    const auto batch_loss = [&batch](const QNetwork& n) {
        double loss = 0.0;
        for (const TrainingSample& sample : batch) {
            const double err = forward(n, sample.input) - sample.target;
            loss += err * err / static_cast<double>(batch.size());
        }
        return loss;
    };

    const auto [loss, grads] = loss_and_gradients(net, batch);
    (void)loss;
    const std::vector<double> analytic = flat_gradients(grads);
    const std::vector<double*> refs = parameter_refs(net);

    double worst = 0.0;
    for (std::size_t p = 0; p < refs.size(); ++p) {
        const double saved = *refs[p];
        *refs[p] = saved + h;
        const double up = batch_loss(net);
        *refs[p] = saved - h;
        const double down = batch_loss(net);
        *refs[p] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double rel = std::abs(analytic[p] - fd) / std::max(1.0, std::abs(analytic[p]));
        worst = std::max(worst, rel);
    }
    return worst;
}

// Random net + batch in generic position (kinks well away from the finite
// difference window). Bias terms are randomized too, so dead layers cannot
// park preactivations exactly on the kink.
inline std::pair<QNetwork, std::vector<TrainingSample>> random_gradient_case(std::mt19937_64& rng) {
    while (true) {
        const int hidden_layers = 1 + uniform_int(rng, 3);
        const int width = 1 + uniform_int(rng, 8);
        const int inputs = 2 + uniform_int(rng, 6);
        QNetwork net = init_network(NetSpec{inputs, hidden_layers, width, 1}, rng());
        for (Layer& layer : net.layers) {
            for (double& b : layer.biases) b = 0.2 * (2.0 * uniform01(rng) - 1.0);
        }
        std::vector<TrainingSample> batch;
        for (int i = 0; i < 4; ++i) {
            TrainingSample sample;
            for (int k = 0; k < inputs; ++k) sample.input.push_back(2.0 * uniform01(rng) - 1.0);
            sample.target = 2.0 * uniform01(rng) - 1.0;
            batch.push_back(sample);
        }
        if (min_preactivation_magnitude(net, batch) > 1e-3) return {std::move(net), std::move(batch)};
    }
}

}  // namespace iabsim::testutil
