#pragma once

#include <functional>
#include <string>
#include <vector>

#include "featherlink/rng.hpp"
#include "featherlink/types.hpp"

#include <nlohmann/json_fwd.hpp>

namespace featherlink {

enum class Activation { Linear, ReLU, Softmax, Sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// One fully connected layer: out = act(weights * in + biases).
struct DenseLayer {
    Matrix weights;  // [out x in]
    Vector biases;   // [out]
    Activation activation = Activation::Linear;

    Eigen::Index in_dim() const { return weights.cols(); }
    Eigen::Index out_dim() const { return weights.rows(); }
};

/// An ordered dense stack. An empty stack is the identity map.
struct DenseNet {
    std::vector<DenseLayer> layers;

    Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    Eigen::Index output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
    std::size_t parameter_count() const;

    /// Throws if adjacent layer dimensions do not chain or a bias length
    /// disagrees with its weight matrix.
    void validate() const;
};

DenseLayer make_layer(Eigen::Index out, Eigen::Index in, Activation act, Rng& rng);

/// Numerically stable softmax (max subtraction). Rejects non-finite input.
Vector softmax(const Vector& z);

/// Per-layer post-activations kept for the backward pass. activations[0] is
/// the input batch; activations[l+1] the output of layer l. Columns are
/// samples.
struct ForwardCache {
    std::vector<Matrix> activations;
};

/// Batched forward pass, one sample per column. Fills `cache` when non-null.
Matrix forward(const DenseNet& net, const Matrix& input, ForwardCache* cache = nullptr);
Vector forward(const DenseNet& net, const Vector& input, ForwardCache* cache = nullptr);

struct NetGradients {
    std::vector<Matrix> dweights;
    std::vector<Vector> dbiases;
};

/// Reverse-mode gradients. `output_gradient` is dLoss/d(activations.back()),
/// one column per sample. Returns parameter gradients; writes
/// dLoss/d(input) into `input_gradient` when non-null. Rejects a cache that
/// does not match the network or the gradient batch.
NetGradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& output_gradient,
                      Matrix* input_gradient = nullptr);

/// Adam moments for one parameter block.
struct AdamState {
    long step_count = 0;
    Matrix first_moment;
    Matrix second_moment;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_shape(Eigen::Index rows, Eigen::Index cols, double learning_rate = 1e-3);
};

/// One bias-corrected Adam update. Rejects shape mismatches.
void adam_step(AdamState& state, Eigen::Ref<Matrix> params, const Matrix& grads);

/// Adam over every parameter block of a network.
class NetAdam {
  public:
    NetAdam(const DenseNet& net, double learning_rate);
    void step(DenseNet& net, const NetGradients& grads);

  private:
    std::vector<AdamState> weight_states_;
    std::vector<AdamState> bias_states_;
};

/// Loss adapter for gradient checking: returns the loss and fills dLoss/dOut.
using LossWithGrad = std::function<double(const Vector& out, Vector& grad_out)>;

/// Max over all parameters of |analytic - numeric| / max(|analytic|,
/// |numeric|, 1e-12), with central differences of half-width eps.
double grad_check(const DenseNet& net, const LossWithGrad& loss, const Vector& input, double eps = 1e-5);

/// Model (de)serialization: {"layers":[{rows, cols, activation,
/// weights(row-major), biases}]}. Round-trips exactly.
nlohmann::json net_to_json(const DenseNet& net);
DenseNet net_from_json(const nlohmann::json& j);

}  // namespace featherlink
