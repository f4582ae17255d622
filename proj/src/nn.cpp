#include "featherlink/nn.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace featherlink {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::ReLU: return "relu";
        case Activation::Softmax: return "softmax";
        case Activation::Sigmoid: return "sigmoid";
    }
    throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::ReLU;
    if (name == "softmax") return Activation::Softmax;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw std::invalid_argument("unknown activation name: " + name);
}

std::size_t DenseNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
    return n;
}

void DenseNet::validate() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.biases.size() != l.weights.rows())
            throw std::invalid_argument("layer " + std::to_string(i) + ": bias length does not match weight rows");
        if (i > 0 && layers[i - 1].out_dim() != l.in_dim())
            throw std::invalid_argument("layer " + std::to_string(i) + ": input width does not chain with previous layer");
    }
}

DenseLayer make_layer(Eigen::Index out, Eigen::Index in, Activation act, Rng& rng) {
    DenseLayer layer;
    layer.weights.resize(out, in);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (Eigen::Index r = 0; r < out; ++r)
        for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
    layer.biases = Vector::Zero(out);
    layer.activation = act;
    return layer;
}

Vector softmax(const Vector& z) {
    if (z.size() < 1) throw std::invalid_argument("softmax: empty input");
    if (!z.allFinite()) throw std::invalid_argument("softmax: non-finite input");
    const Vector shifted = z.array() - z.maxCoeff();
    Vector e = shifted.array().exp();
    return e / e.sum();
}

namespace {

void apply_activation(Activation act, Matrix& a) {
    switch (act) {
        case Activation::Linear:
            break;
        case Activation::ReLU:
            a = a.cwiseMax(0.0);
            break;
        case Activation::Sigmoid:
            a = ((-a.array()).exp() + 1.0).inverse();
            break;
        case Activation::Softmax:
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                auto col = a.col(c);
                col.array() -= col.maxCoeff();
                col = col.array().exp();
                col /= col.sum();
            }
            break;
    }
}

// VJP of the activation given its cached output `a` and upstream `da`.
Matrix activation_vjp(Activation act, const Matrix& a, const Matrix& da) {
    switch (act) {
        case Activation::Linear:
            return da;
        case Activation::ReLU:
            return (a.array() > 0.0).cast<double>() * da.array();
        case Activation::Sigmoid:
            return da.array() * a.array() * (1.0 - a.array());
        case Activation::Softmax: {
            Matrix dz(a.rows(), a.cols());
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                const double dot = da.col(c).dot(a.col(c));
                dz.col(c) = a.col(c).array() * (da.col(c).array() - dot);
            }
            return dz;
        }
    }
    throw std::logic_error("unknown activation");
}

}  // namespace

Matrix forward(const DenseNet& net, const Matrix& input, ForwardCache* cache) {
    if (!net.layers.empty() && input.rows() != net.input_dim())
        throw std::invalid_argument("forward: input has " + std::to_string(input.rows()) + " rows, expected " +
                                    std::to_string(net.input_dim()));
    if (cache) {
        cache->activations.clear();
        cache->activations.reserve(net.layers.size() + 1);
        cache->activations.push_back(input);
    }
    Matrix a = input;
    for (const auto& layer : net.layers) {
        Matrix z = layer.weights * a;
        z.colwise() += layer.biases;
        apply_activation(layer.activation, z);
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

Vector forward(const DenseNet& net, const Vector& input, ForwardCache* cache) {
    return forward(net, Matrix(input), cache).col(0);
}

NetGradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& output_gradient,
                      Matrix* input_gradient) {
    const std::size_t L = net.layers.size();
    if (cache.activations.size() != L + 1)
        throw std::invalid_argument("backward: cache does not match network depth");
    for (std::size_t l = 0; l < L; ++l) {
        if (cache.activations[l].rows() != net.layers[l].in_dim() ||
            cache.activations[l + 1].rows() != net.layers[l].out_dim() ||
            cache.activations[l].cols() != cache.activations[L].cols())
            throw std::invalid_argument("backward: cache shapes do not match network");
    }
    if (L > 0 && (output_gradient.rows() != net.output_dim() || output_gradient.cols() != cache.activations[L].cols()))
        throw std::invalid_argument("backward: output gradient shape mismatch");

    NetGradients grads;
    grads.dweights.resize(L);
    grads.dbiases.resize(L);
    Matrix da = output_gradient;
    for (std::size_t l = L; l-- > 0;) {
        const auto& layer = net.layers[l];
        const Matrix dz = activation_vjp(layer.activation, cache.activations[l + 1], da);
        grads.dweights[l].noalias() = dz * cache.activations[l].transpose();
        grads.dbiases[l] = dz.rowwise().sum();
        if (l > 0 || input_gradient) da.noalias() = layer.weights.transpose() * dz;
    }
    if (input_gradient) *input_gradient = (L == 0) ? output_gradient : da;
    return grads;
}

AdamState AdamState::for_shape(Eigen::Index rows, Eigen::Index cols, double learning_rate) {
    AdamState s;
    s.first_moment = Matrix::Zero(rows, cols);
    s.second_moment = Matrix::Zero(rows, cols);
    s.learning_rate = learning_rate;
    return s;
}

void adam_step(AdamState& state, Eigen::Ref<Matrix> params, const Matrix& grads) {
    if (params.rows() != grads.rows() || params.cols() != grads.cols() ||
        params.rows() != state.first_moment.rows() || params.cols() != state.first_moment.cols())
        throw std::invalid_argument("adam_step: shape mismatch");
    state.step_count += 1;
    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads;
    state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * grads.cwiseProduct(grads);
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    params.array() -= state.learning_rate * (state.first_moment.array() / bc1) /
                      ((state.second_moment.array() / bc2).sqrt() + state.epsilon);
}

NetAdam::NetAdam(const DenseNet& net, double learning_rate) {
    for (const auto& layer : net.layers) {
        weight_states_.push_back(AdamState::for_shape(layer.weights.rows(), layer.weights.cols(), learning_rate));
        bias_states_.push_back(AdamState::for_shape(layer.biases.size(), 1, learning_rate));
    }
}

void NetAdam::step(DenseNet& net, const NetGradients& grads) {
    if (grads.dweights.size() != net.layers.size())
        throw std::invalid_argument("NetAdam::step: gradient count mismatch");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        adam_step(weight_states_[l], net.layers[l].weights, grads.dweights[l]);
        adam_step(bias_states_[l], net.layers[l].biases, Matrix(grads.dbiases[l]));
    }
}

double grad_check(const DenseNet& net, const LossWithGrad& loss, const Vector& input, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("grad_check: eps must be positive");

    ForwardCache cache;
    const Vector out = forward(net, input, &cache);
    Vector dout(out.size());
    dout.setZero();
    loss(out, dout);
    const NetGradients analytic = backward(net, cache, Matrix(dout));

    DenseNet probe = net;
    Vector scratch(out.size());
    const auto eval = [&] {
        const Vector o = forward(probe, input);
        return loss(o, scratch);
    };

    double max_err = 0.0;
    const auto probe_block = [&](Eigen::Ref<Matrix> block, const Matrix& grad) {
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                const double saved = block(r, c);
                block(r, c) = saved + eps;
                const double plus = eval();
                block(r, c) = saved - eps;
                const double minus = eval();
                block(r, c) = saved;
                const double numeric = (plus - minus) / (2.0 * eps);
                const double a = grad(r, c);
                const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
                max_err = std::max(max_err, std::abs(a - numeric) / denom);
            }
        }
    };
    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        probe_block(probe.layers[l].weights, analytic.dweights[l]);
        probe_block(probe.layers[l].biases, Matrix(analytic.dbiases[l]));
    }
    return max_err;
}

nlohmann::json net_to_json(const DenseNet& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers) {
        nlohmann::json weights = nlohmann::json::array();
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) weights.push_back(l.weights(r, c));
        nlohmann::json biases = nlohmann::json::array();
        for (Eigen::Index r = 0; r < l.biases.size(); ++r) biases.push_back(l.biases(r));
        layers.push_back({{"rows", l.weights.rows()},
                          {"cols", l.weights.cols()},
                          {"activation", activation_name(l.activation)},
                          {"weights", std::move(weights)},
                          {"biases", std::move(biases)}});
    }
    return nlohmann::json{{"layers", std::move(layers)}};
}

DenseNet net_from_json(const nlohmann::json& j) {
    DenseNet net;
    for (const auto& lj : j.at("layers")) {
        DenseLayer l;
        const Eigen::Index rows = lj.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = lj.at("cols").get<Eigen::Index>();
        const auto& w = lj.at("weights");
        const auto& b = lj.at("biases");
        if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows)
            throw std::invalid_argument("model json: weight/bias sizes do not match rows x cols");
        l.weights.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) l.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)].get<double>();
        l.biases.resize(rows);
        for (Eigen::Index r = 0; r < rows; ++r) l.biases(r) = b[static_cast<std::size_t>(r)].get<double>();
        l.activation = activation_from_name(lj.at("activation").get<std::string>());
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

}  // namespace featherlink
