#include "dinids/osvm.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dinids::osvm {

void OsvmConfig::validate() const {
    if (nu <= 0.0 || nu >= 1.0) throw NumericError("nu must be in (0,1)");
    if (tolerance <= 0.0) throw NumericError("tolerance must be > 0");
    if (max_passes <= 0) throw NumericError("max_passes must be > 0");
}

void OsvmModel::validate() const {
    if (alphas.size() != support_vectors.rows())
        throw ShapeError("alpha count != support vector count");
    if (std::abs(alphas.sum() - 1.0) > 1e-6)
        throw DataError("alpha sum deviates from 1 beyond tolerance");
    for (Eigen::Index i = 0; i < alphas.size(); ++i)
        if (alphas[i] < 0.0) throw DataError("negative dual coefficient");
    if (!std::isfinite(rho)) throw DataError("non-finite rho");
    if (kernel.gamma <= 0.0) throw DataError("kernel gamma must be > 0");
}

double rbf_kernel(const Vector& x, const Vector& y, double gamma) {
    if (x.size() != y.size()) throw ShapeError("kernel argument length mismatch");
    if (gamma <= 0.0) throw NumericError("gamma must be > 0");
    return std::exp(-gamma * (x - y).squaredNorm());
}

double default_gamma(const Matrix& x) {
    const double d = static_cast<double>(x.cols());
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const double var =
        (x.rowwise() - mean).array().square().sum() /
        (static_cast<double>(x.rows()) * d);
    if (var <= 0.0 || !std::isfinite(var)) return 1.0;
    return 1.0 / (d * var);
}

OsvmModel train_osvm(const Matrix& x, const OsvmConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = x.rows();
    if (n < 2) throw DataError("one-class SVM needs at least 2 training rows");
    if (!x.allFinite()) throw NumericError("non-finite training values");

    KernelParams kernel = cfg.kernel;
    if (kernel.gamma <= 0.0) kernel.gamma = default_gamma(x);

    Matrix K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-kernel.gamma *
                                      (x.row(i) - x.row(j)).squaredNorm());
            K(i, j) = v;
            K(j, i) = v;
        }
    }

    const double C = 1.0 / (cfg.nu * static_cast<double>(n));

    // libsvm-style start: fill the box from the front until sum alpha = 1.
    Vector alpha = Vector::Zero(n);
    {
        double remaining = 1.0;
        for (Eigen::Index i = 0; i < n && remaining > 0.0; ++i) {
            alpha[i] = std::min(C, remaining);
            remaining -= alpha[i];
        }
    }

    Vector g = K * alpha;  // gradient of 1/2 a'Ka

    const double bound_eps = 1e-12 * C;
    double gap = std::numeric_limits<double>::infinity();
    bool converged = false;
    const long max_updates =
        static_cast<long>(cfg.max_passes) * static_cast<long>(n);

    for (long it = 0; it < max_updates; ++it) {
        // i: can grow (alpha < C) with minimal gradient
        // j: can shrink (alpha > 0) with maximal gradient
        Eigen::Index i = -1, j = -1;
        double gmin = std::numeric_limits<double>::infinity();
        double gmax = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k) {
            if (alpha[k] < C - bound_eps && g[k] < gmin) {
                gmin = g[k];
                i = k;
            }
            if (alpha[k] > bound_eps && g[k] > gmax) {
                gmax = g[k];
                j = k;
            }
        }
        gap = gmax - gmin;
        if (i < 0 || j < 0 || gap < cfg.tolerance) {
            converged = true;
            break;
        }

        const double denom = K(i, i) + K(j, j) - 2.0 * K(i, j);
        double step = denom > 1e-15 ? gap / denom
                                    : std::numeric_limits<double>::infinity();
        step = std::min(step, std::min(C - alpha[i], alpha[j]));
        if (step <= 0.0) {
            converged = true;
            break;
        }
        alpha[i] += step;
        alpha[j] -= step;
        g += step * (K.col(i) - K.col(j));
    }
    if (!converged)
        throw ConvergenceError("one-class SVM did not reach KKT tolerance; gap " +
                                   std::to_string(gap),
                               gap);

    // rho: decision value at unbounded support vectors, averaged; otherwise
    // the midpoint of the feasible interval given by the bounded points.
    double rho_sum = 0.0;
    int rho_count = 0;
    double upper_side = -std::numeric_limits<double>::infinity();  // alpha = C
    double lower_side = std::numeric_limits<double>::infinity();   // alpha = 0
    for (Eigen::Index k = 0; k < n; ++k) {
        if (alpha[k] > bound_eps && alpha[k] < C - bound_eps) {
            rho_sum += g[k];
            ++rho_count;
        } else if (alpha[k] >= C - bound_eps) {
            upper_side = std::max(upper_side, g[k]);
        } else {
            lower_side = std::min(lower_side, g[k]);
        }
    }
    double rho;
    if (rho_count > 0) {
        rho = rho_sum / rho_count;
    } else {
        if (!std::isfinite(upper_side)) upper_side = lower_side;
        if (!std::isfinite(lower_side)) lower_side = upper_side;
        rho = 0.5 * (upper_side + lower_side);
    }

    OsvmModel model;
    model.kernel = kernel;
    model.rho = rho;
    model.n_train = static_cast<std::size_t>(n);
    std::vector<Eigen::Index> sv;
    for (Eigen::Index k = 0; k < n; ++k)
        if (alpha[k] > bound_eps) sv.push_back(k);
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    model.alphas.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        model.support_vectors.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
        model.alphas[static_cast<Eigen::Index>(k)] = alpha[sv[k]];
    }
    model.validate();
    return model;
}

double decision_function(const OsvmModel& model, const Vector& x) {
    if (x.size() != model.support_vectors.cols())
        throw ShapeError("query length != support vector dimension");
    double s = 0.0;
    for (Eigen::Index i = 0; i < model.alphas.size(); ++i)
        s += model.alphas[i] *
             std::exp(-model.kernel.gamma *
                      (model.support_vectors.row(i).transpose() - x).squaredNorm());
    return s - model.rho;
}

FlowClass predict(const OsvmModel& model, const Vector& x) {
    return decision_function(model, x) < 0.0 ? FlowClass::anomaly
                                             : FlowClass::benign;
}

}  // namespace dinids::osvm
