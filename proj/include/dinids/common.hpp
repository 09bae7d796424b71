#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dinids {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, double gap)
        : std::runtime_error(msg), duality_gap(gap) {}
    double duality_gap;
};

struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, int epoch)
        : std::runtime_error(msg), epoch(epoch) {}
    int epoch;
};

// Probabilities are clamped before any logarithm.
constexpr double kProbEps = 1e-12;

inline double clamp_prob(double p) {
    if (p < kProbEps) return kProbEps;
    if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
    return p;
}

// One RNG per independent purpose so that disabling one consumer does not
// shift the stream seen by the others.
enum class RngStream : std::uint64_t {
    init = 1,
    shuffle = 2,
    dropout_label = 3,
    dropout_domain = 4,
    sampling = 5,
    osvm = 6,
    embed = 7,
    domain_order = 8,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace dinids
