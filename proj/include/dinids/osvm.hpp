#pragma once

#include <cstdint>

#include "dinids/common.hpp"

namespace dinids::osvm {

struct KernelParams {
    double gamma = -1.0;  // <= 0 means "derive from data": 1/(d * mean variance)
};

struct OsvmConfig {
    double nu = 0.05;
    KernelParams kernel;
    double tolerance = 1e-4;
    int max_passes = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct OsvmModel {
    Matrix support_vectors;  // m x d, rows with alpha > 0 only
    Vector alphas;           // m, in the 1/(nu*n)-scaled convention, sums to 1
    double rho = 0.0;
    KernelParams kernel;
    std::size_t n_train = 0;  // training size behind the 1/(nu*n) box bound

    void validate() const;
};

enum class FlowClass { benign, anomaly };

double rbf_kernel(const Vector& x, const Vector& y, double gamma);

double default_gamma(const Matrix& x);

// Solves the one-class dual  min 1/2 a'Ka  s.t.  sum a = 1, 0 <= a_i <= 1/(nu n)
// with two-coordinate updates selected by maximal KKT violation.
OsvmModel train_osvm(const Matrix& x, const OsvmConfig& cfg);

// sum_i alpha_i K(x, sv_i) - rho; positive is the benign side.
double decision_function(const OsvmModel& model, const Vector& x);

// anomaly iff the decision value is strictly negative.
FlowClass predict(const OsvmModel& model, const Vector& x);

}  // namespace dinids::osvm
