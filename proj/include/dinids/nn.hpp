#pragma once

#include <cstdint>
#include <vector>

#include "dinids/common.hpp"

namespace dinids::nn {

enum class Activation { sigmoid, identity };

struct DenseLayer {
    Matrix weights;  // out_dim x in_dim
    Vector bias;     // out_dim
    Activation activation = Activation::sigmoid;

    int in_dim() const { return static_cast<int>(weights.cols()); }
    int out_dim() const { return static_cast<int>(weights.rows()); }
};

struct GradientSet {
    std::vector<Matrix> d_weights;
    std::vector<Vector> d_bias;

    void setZero();
    GradientSet& operator+=(const GradientSet& other);
    GradientSet& operator*=(double s);
};

struct SgdConfig {
    double learning_rate = 0.0001;
    int batch_size = 512;
    double dropout_ratio = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct BackwardResult {
    GradientSet grads;
    Vector input_grad;
};

class DenseNetwork {
public:
    DenseNetwork() = default;
    explicit DenseNetwork(std::vector<DenseLayer> layers);

    // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
    static DenseNetwork random(const std::vector<int>& dims, Activation act,
                               std::mt19937_64& rng);

    int in_dim() const { return layers_.front().in_dim(); }
    int out_dim() const { return layers_.back().out_dim(); }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    // Inference pass; no caching, no dropout, never mutates.
    Vector forward(const Vector& x) const;

    // Training pass: caches per-layer activations for backward. Inverted
    // dropout on hidden activations when dropout_ratio > 0 (rng required).
    Vector forward_train(const Vector& x, double dropout_ratio = 0.0,
                         std::mt19937_64* rng = nullptr);

    // Exact gradients of the cached forward pass. Does not mutate parameters.
    BackwardResult backward(const Vector& output_grad) const;

    GradientSet zero_gradients() const;

    bool same_shape(const DenseNetwork& other) const;
    bool equals(const DenseNetwork& other) const;  // bitwise parameter equality

private:
    std::vector<DenseLayer> layers_;
    std::vector<Vector> cached_;  // input + per-layer pre-dropout activations
    std::vector<Vector> masks_;   // per hidden layer; empty vector = no dropout
};

// Gradient reversal: identity forward, -lambda * grad backward.
Vector grl_backward(const Vector& output_grad, double lambda);

// In-place SGD update: p <- p - learning_rate * dp.
void sgd_step(DenseNetwork& net, const GradientSet& grads, const SgdConfig& cfg);

}  // namespace dinids::nn
