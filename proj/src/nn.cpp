#include "dinids/nn.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace dinids::nn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Vector apply_activation(const Vector& z, Activation act) {
    if (act == Activation::identity) return z;
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

// d(act)/dz expressed through the activation value a.
Vector activation_prime(const Vector& a, Activation act) {
    if (act == Activation::identity) return Vector::Ones(a.size());
    return a.array() * (1.0 - a.array());
}

}  // namespace

void GradientSet::setZero() {
    for (auto& m : d_weights) m.setZero();
    for (auto& v : d_bias) v.setZero();
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
    for (size_t i = 0; i < d_weights.size(); ++i) {
        d_weights[i] += other.d_weights[i];
        d_bias[i] += other.d_bias[i];
    }
    return *this;
}

GradientSet& GradientSet::operator*=(double s) {
    for (auto& m : d_weights) m *= s;
    for (auto& v : d_bias) v *= s;
    return *this;
}

void SgdConfig::validate() const {
    if (learning_rate <= 0) throw NumericError("learning_rate must be > 0");
    if (batch_size <= 0) throw NumericError("batch_size must be > 0");
    if (dropout_ratio < 0 || dropout_ratio >= 1)
        throw NumericError("dropout_ratio must be in [0,1)");
}

DenseNetwork::DenseNetwork(std::vector<DenseLayer> layers)
    : layers_(std::move(layers)) {
    if (layers_.empty()) throw ShapeError("network needs at least one layer");
    for (size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        if (l.bias.size() != l.weights.rows())
            throw ShapeError("layer " + std::to_string(i) +
                             ": bias length != weight rows");
        if (!l.weights.allFinite() || !l.bias.allFinite())
            throw NumericError("layer " + std::to_string(i) +
                               ": non-finite parameters");
        if (i > 0 && l.in_dim() != layers_[i - 1].out_dim())
            throw ShapeError("layer " + std::to_string(i) +
                             ": input dim incompatible with previous layer");
    }
}

DenseNetwork DenseNetwork::random(const std::vector<int>& dims, Activation act,
                                  std::mt19937_64& rng) {
    if (dims.size() < 2) throw ShapeError("need at least input and output dims");
    std::vector<DenseLayer> layers;
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        const int in = dims[i], out = dims[i + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> u(-bound, bound);
        DenseLayer l;
        l.weights = Matrix::NullaryExpr(out, in, [&] { return u(rng); });
        l.bias = Vector::NullaryExpr(out, [&] { return u(rng); });
        l.activation = act;
        layers.push_back(std::move(l));
    }
    return DenseNetwork(std::move(layers));
}

Vector DenseNetwork::forward(const Vector& x) const {
    if (x.size() != in_dim())
        throw ShapeError("input length " + std::to_string(x.size()) +
                         " != network input dim " + std::to_string(in_dim()));
    if (!x.allFinite()) throw NumericError("non-finite network input");
    Vector a = x;
    for (const auto& l : layers_)
        a = apply_activation(l.weights * a + l.bias, l.activation);
    return a;
}

Vector DenseNetwork::forward_train(const Vector& x, double dropout_ratio,
                                   std::mt19937_64* rng) {
    if (x.size() != in_dim())
        throw ShapeError("input length != network input dim");
    if (!x.allFinite()) throw NumericError("non-finite network input");
    if (dropout_ratio > 0 && rng == nullptr)
        throw StateError("dropout requires an rng");

    cached_.assign(1, x);
    masks_.assign(layers_.size() > 0 ? layers_.size() - 1 : 0, Vector());

    Vector fed = x;
    for (size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        Vector a = apply_activation(l.weights * fed + l.bias, l.activation);
        cached_.push_back(a);
        fed = a;
        // dropout on hidden activations only, inverted scaling
        if (i + 1 < layers_.size() && dropout_ratio > 0) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double keep = 1.0 - dropout_ratio;
            Vector mask(a.size());
            for (Eigen::Index k = 0; k < a.size(); ++k)
                mask[k] = (u(*rng) < keep) ? 1.0 / keep : 0.0;
            masks_[i] = mask;
            fed = a.cwiseProduct(mask);
        }
    }
    return fed;
}

BackwardResult DenseNetwork::backward(const Vector& output_grad) const {
    if (cached_.size() != layers_.size() + 1)
        throw StateError("backward without a cached training forward pass");
    if (output_grad.size() != out_dim())
        throw ShapeError("output_grad length != network output dim");

    BackwardResult res;
    res.grads.d_weights.resize(layers_.size());
    res.grads.d_bias.resize(layers_.size());

    Vector g = output_grad;
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
        const auto& layer = layers_[static_cast<size_t>(l)];
        const Vector& a = cached_[static_cast<size_t>(l) + 1];
        Vector dz = g.cwiseProduct(activation_prime(a, layer.activation));

        Vector in = cached_[static_cast<size_t>(l)];
        if (l > 0 && masks_[static_cast<size_t>(l) - 1].size() > 0)
            in = in.cwiseProduct(masks_[static_cast<size_t>(l) - 1]);

        res.grads.d_weights[static_cast<size_t>(l)] = dz * in.transpose();
        res.grads.d_bias[static_cast<size_t>(l)] = dz;

        g = layer.weights.transpose() * dz;
        if (l > 0 && masks_[static_cast<size_t>(l) - 1].size() > 0)
            g = g.cwiseProduct(masks_[static_cast<size_t>(l) - 1]);
    }
    res.input_grad = std::move(g);
    return res;
}

GradientSet DenseNetwork::zero_gradients() const {
    GradientSet gs;
    for (const auto& l : layers_) {
        gs.d_weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
        gs.d_bias.push_back(Vector::Zero(l.bias.size()));
    }
    return gs;
}

bool DenseNetwork::same_shape(const DenseNetwork& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (size_t i = 0; i < layers_.size(); ++i)
        if (layers_[i].in_dim() != other.layers_[i].in_dim() ||
            layers_[i].out_dim() != other.layers_[i].out_dim())
            return false;
    return true;
}

bool DenseNetwork::equals(const DenseNetwork& other) const {
    if (!same_shape(other)) return false;
    for (size_t i = 0; i < layers_.size(); ++i) {
        if (std::memcmp(layers_[i].weights.data(), other.layers_[i].weights.data(),
                        sizeof(double) * layers_[i].weights.size()) != 0)
            return false;
        if (std::memcmp(layers_[i].bias.data(), other.layers_[i].bias.data(),
                        sizeof(double) * layers_[i].bias.size()) != 0)
            return false;
    }
    return true;
}

Vector grl_backward(const Vector& output_grad, double lambda) {
    if (lambda < 0) throw NumericError("lambda must be >= 0");
    return -lambda * output_grad;
}

void sgd_step(DenseNetwork& net, const GradientSet& grads, const SgdConfig& cfg) {
    cfg.validate();
    if (grads.d_weights.size() != net.layers().size())
        throw ShapeError("gradient layer count mismatch");
    for (size_t i = 0; i < net.layers().size(); ++i) {
        auto& l = net.layers()[i];
        if (grads.d_weights[i].rows() != l.weights.rows() ||
            grads.d_weights[i].cols() != l.weights.cols() ||
            grads.d_bias[i].size() != l.bias.size())
            throw ShapeError("gradient shape mismatch at layer " +
                             std::to_string(i));
        l.weights -= cfg.learning_rate * grads.d_weights[i];
        l.bias -= cfg.learning_rate * grads.d_bias[i];
    }
}

}  // namespace dinids::nn
