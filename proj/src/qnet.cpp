#include "iabsim/qnet.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "iabsim/util.hpp"

namespace iabsim {

namespace {

void validate_spec(const NetSpec& spec) {
    if (spec.input_size < 1 || spec.hidden_layers < 1 || spec.hidden_width < 1 || spec.output_size != 1) {
        throw std::invalid_argument("invalid network spec: need input >= 1, hidden layers >= 1, width >= 1, "
                                    "one output");
    }
}

AdamState::LayerMoments zero_moments(const Layer& layer) {
    AdamState::LayerMoments m;
    m.m_weights.assign(layer.weights.size(), 0.0);
    m.v_weights.assign(layer.weights.size(), 0.0);
    m.m_biases.assign(layer.biases.size(), 0.0);
    m.v_biases.assign(layer.biases.size(), 0.0);
    return m;
}

}  // namespace

std::size_t QNetwork::parameter_count() const {
    std::size_t count = 0;
    for (const Layer& layer : layers) count += layer.weights.size() + layer.biases.size();
    return count;
}

QNetwork init_network(const NetSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    QNetwork net;
    net.spec = spec;

    std::mt19937_64 rng(seed);
    const auto make_layer = [&](int in, int out) {
        Layer layer;
        layer.in = in;
        layer.out = out;
        layer.weights.resize(static_cast<std::size_t>(in) * out);
        const double limit = std::sqrt(6.0 / in);
        for (double& w : layer.weights) w = limit * (2.0 * uniform01(rng) - 1.0);
        layer.biases.assign(static_cast<std::size_t>(out), 0.0);
        return layer;
    };

    int in = spec.input_size;
    for (int l = 0; l < spec.hidden_layers; ++l) {
        net.layers.push_back(make_layer(in, spec.hidden_width));
        in = spec.hidden_width;
    }
    net.layers.push_back(make_layer(in, spec.output_size));
    for (const Layer& layer : net.layers) net.adam.layers.push_back(zero_moments(layer));
    return net;
}

namespace {

// Affine pass of one layer: z = W a + b.
void affine(const Layer& layer, const std::vector<double>& a, std::vector<double>& z) {
    z.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
        const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
        double acc = layer.biases[static_cast<std::size_t>(o)];
        for (int i = 0; i < layer.in; ++i) acc += row[i] * a[static_cast<std::size_t>(i)];
        z[static_cast<std::size_t>(o)] = acc;
    }
}

}  // namespace

double forward(const QNetwork& net, std::span<const double> input) {
    if (static_cast<int>(input.size()) != net.spec.input_size) {
        throw std::invalid_argument("forward input has wrong length");
    }
    std::vector<double> a(input.begin(), input.end());
    std::vector<double> z;
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
        affine(net.layers[l], a, z);
        for (double& v : z) v = v > 0.0 ? v : 0.0;
        a.swap(z);
    }
    affine(net.layers.back(), a, z);
    return z[0];
}

std::pair<double, Gradients> loss_and_gradients(const QNetwork& net,
                                                const std::vector<TrainingSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("gradient batch is empty");

    Gradients grads;
    grads.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        grads.layers[l].weights.assign(net.layers[l].weights.size(), 0.0);
        grads.layers[l].biases.assign(net.layers[l].biases.size(), 0.0);
    }

    const double inv_m = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    std::vector<std::vector<double>> activations(net.layers.size() + 1);
    std::vector<std::vector<double>> preacts(net.layers.size());

    for (const TrainingSample& sample : batch) {
        if (static_cast<int>(sample.input.size()) != net.spec.input_size) {
            throw std::invalid_argument("training sample has wrong input length");
        }
        activations[0] = sample.input;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            affine(net.layers[l], activations[l], preacts[l]);
            activations[l + 1] = preacts[l];
            if (l + 1 < net.layers.size()) {
                for (double& v : activations[l + 1]) v = v > 0.0 ? v : 0.0;
            }
        }
        const double prediction = activations.back()[0];
        const double err = prediction - sample.target;
        loss += err * err * inv_m;

        // d(loss)/d(prediction) for this sample; backpropagate through the
        // linear output and the ReLU hidden stack.
        std::vector<double> delta{2.0 * err * inv_m};
        for (std::size_t l = net.layers.size(); l-- > 0;) {
            const Layer& layer = net.layers[l];
            Gradients::LayerGrads& g = grads.layers[l];
            const std::vector<double>& a_prev = activations[l];
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                g.biases[static_cast<std::size_t>(o)] += d;
                double* grow = g.weights.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += d * a_prev[static_cast<std::size_t>(i)];
            }
            if (l == 0) break;
            std::vector<double> delta_prev(static_cast<std::size_t>(layer.in), 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) delta_prev[static_cast<std::size_t>(i)] += d * row[i];
            }
            for (int i = 0; i < layer.in; ++i) {
                if (preacts[l - 1][static_cast<std::size_t>(i)] <= 0.0) delta_prev[static_cast<std::size_t>(i)] = 0.0;
            }
            delta.swap(delta_prev);
        }
    }
    return {loss, std::move(grads)};
}

void adam_step(QNetwork& net, const Gradients& gradients, const OptimizerConfig& config) {
    if (gradients.layers.size() != net.layers.size()) throw std::invalid_argument("gradient shape mismatch");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (gradients.layers[l].weights.size() != net.layers[l].weights.size() ||
            gradients.layers[l].biases.size() != net.layers[l].biases.size()) {
            throw std::invalid_argument("gradient shape mismatch");
        }
    }

    double scale = 1.0;
    if (config.clip_gradients) {
        double norm_sq = 0.0;
        for (const auto& g : gradients.layers) {
            for (double v : g.weights) norm_sq += v * v;
            for (double v : g.biases) norm_sq += v * v;
        }
        const double norm = std::sqrt(norm_sq);
        if (norm > config.clip_norm) scale = config.clip_norm / norm;
    }

    net.adam.timestep += 1;
    const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(net.adam.timestep));
    const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(net.adam.timestep));

    const auto update = [&](std::vector<double>& params, std::vector<double>& m, std::vector<double>& v,
                            const std::vector<double>& grad) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double g = grad[i] * scale;
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            params[i] -= config.alpha * m_hat / (std::sqrt(v_hat) + config.eps_hat);
        }
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].weights, net.adam.layers[l].m_weights, net.adam.layers[l].v_weights,
               gradients.layers[l].weights);
        update(net.layers[l].biases, net.adam.layers[l].m_biases, net.adam.layers[l].v_biases,
               gradients.layers[l].biases);
    }
}

void copy_parameters(const QNetwork& source, QNetwork& destination) {
    if (!(source.spec == destination.spec)) {
        throw std::invalid_argument("cannot copy parameters between different specs");
    }
    for (std::size_t l = 0; l < source.layers.size(); ++l) {
        destination.layers[l].weights = source.layers[l].weights;
        destination.layers[l].biases = source.layers[l].biases;
    }
}

void blend_parameters(const QNetwork& source, QNetwork& destination, double tau) {
    if (!(source.spec == destination.spec)) {
        throw std::invalid_argument("cannot blend parameters between different specs");
    }
    if (tau == 1.0) {
        copy_parameters(source, destination);
        return;
    }
    const auto blend = [tau](const std::vector<double>& src, std::vector<double>& dst) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += tau * (src[i] - dst[i]);
    };
    for (std::size_t l = 0; l < source.layers.size(); ++l) {
        blend(source.layers[l].weights, destination.layers[l].weights);
        blend(source.layers[l].biases, destination.layers[l].biases);
    }
}

std::vector<double> q_all_actions(const QNetwork& net, std::span<const double> observation) {
    const int n_actions = net.spec.input_size - static_cast<int>(observation.size());
    if (n_actions < 1) throw std::invalid_argument("observation too long for this network");

    std::vector<double> input(observation.begin(), observation.end());
    input.resize(static_cast<std::size_t>(net.spec.input_size), 0.0);
    std::vector<double> values(static_cast<std::size_t>(n_actions), 0.0);
    for (int k = 0; k < n_actions; ++k) {
        input[observation.size() + static_cast<std::size_t>(k)] = 1.0;
        values[static_cast<std::size_t>(k)] = forward(net, input);
        input[observation.size() + static_cast<std::size_t>(k)] = 0.0;
    }
    return values;
}

namespace {

using nlohmann::json;

json doubles_to_json(const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(to_hex_float(v));
    return arr;
}

std::vector<double> doubles_from_json(const json& arr) {
    std::vector<double> values;
    values.reserve(arr.size());
    for (const auto& item : arr) values.push_back(from_hex_float(item.get<std::string>()));
    return values;
}

constexpr const char* kNetFormat = "iabsim-qnet-v1";

}  // namespace

std::string network_to_json(const QNetwork& net) {
    json doc;
    doc["format"] = kNetFormat;
    doc["spec"] = {{"input_size", net.spec.input_size},
                   {"hidden_layers", net.spec.hidden_layers},
                   {"hidden_width", net.spec.hidden_width},
                   {"output_size", net.spec.output_size}};
    doc["adam_timestep"] = net.adam.timestep;
    json layers = json::array();
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const AdamState::LayerMoments& moments = net.adam.layers[l];
        layers.push_back({{"in", layer.in},
                          {"out", layer.out},
                          {"weights", doubles_to_json(layer.weights)},
                          {"biases", doubles_to_json(layer.biases)},
                          {"adam_m_weights", doubles_to_json(moments.m_weights)},
                          {"adam_v_weights", doubles_to_json(moments.v_weights)},
                          {"adam_m_biases", doubles_to_json(moments.m_biases)},
                          {"adam_v_biases", doubles_to_json(moments.v_biases)}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump(2);
}

QNetwork network_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kNetFormat) {
        throw std::runtime_error("unsupported network format: " + doc.at("format").get<std::string>());
    }
    QNetwork net;
    const json& spec = doc.at("spec");
    net.spec.input_size = spec.at("input_size").get<int>();
    net.spec.hidden_layers = spec.at("hidden_layers").get<int>();
    net.spec.hidden_width = spec.at("hidden_width").get<int>();
    net.spec.output_size = spec.at("output_size").get<int>();
    validate_spec(net.spec);
    net.adam.timestep = doc.at("adam_timestep").get<long>();
    for (const json& layer_doc : doc.at("layers")) {
        Layer layer;
        layer.in = layer_doc.at("in").get<int>();
        layer.out = layer_doc.at("out").get<int>();
        layer.weights = doubles_from_json(layer_doc.at("weights"));
        layer.biases = doubles_from_json(layer_doc.at("biases"));
        if (layer.weights.size() != static_cast<std::size_t>(layer.in) * layer.out ||
            layer.biases.size() != static_cast<std::size_t>(layer.out)) {
            throw std::runtime_error("network file has inconsistent layer shapes");
        }
        AdamState::LayerMoments moments;
        moments.m_weights = doubles_from_json(layer_doc.at("adam_m_weights"));
        moments.v_weights = doubles_from_json(layer_doc.at("adam_v_weights"));
        moments.m_biases = doubles_from_json(layer_doc.at("adam_m_biases"));
        moments.v_biases = doubles_from_json(layer_doc.at("adam_v_biases"));
        net.layers.push_back(std::move(layer));
        net.adam.layers.push_back(std::move(moments));
    }
    if (net.layers.size() != static_cast<std::size_t>(net.spec.hidden_layers) + 1) {
        throw std::runtime_error("network file has wrong layer count for its spec");
    }
    return net;
}

void save_network(const QNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << network_to_json(net) << '\n';
}

QNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return network_from_json(ss.str());
}

}  // namespace iabsim
