#include "sdlab/info_theory.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sdlab {

namespace {

void require_same_size(const ProbDist& p, const ProbDist& q) {
    if (p.size() != q.size()) {
        throw DistributionError("distribution length mismatch: " + std::to_string(p.size()) +
                                " vs " + std::to_string(q.size()));
    }
}

} // namespace

ProbDist::ProbDist(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) {
        throw DistributionError("empty probability vector");
    }
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) {
            throw DistributionError("negative or NaN probability weight");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DistributionError("probability weights sum to " + std::to_string(sum));
    }
}

ProbDist ProbDist::uniform(std::size_t n) {
    return ProbDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbDist ProbDist::one_hot(std::size_t n, std::size_t index) {
    std::vector<double> w(n, 0.0);
    w.at(index) = 1.0;
    return ProbDist(std::move(w));
}

double entropy(const ProbDist& p) {
    double h = 0.0;
    for (double w : p.weights()) {
        if (w > kProbFloor) {
            h -= w * std::log2(w);
        }
    }
    return h < 0.0 ? 0.0 : h;
}

double cross_entropy(const ProbDist& p, const ProbDist& q) {
    require_same_size(p, q);
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > kProbFloor) {
            if (q[i] <= kProbFloor) {
                return std::numeric_limits<double>::infinity();
            }
            h -= p[i] * std::log2(q[i]);
        }
    }
    return h < 0.0 ? 0.0 : h;
}

double kl_divergence(const ProbDist& p, const ProbDist& q) {
    require_same_size(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > kProbFloor) {
            if (q[i] <= kProbFloor) {
                return std::numeric_limits<double>::infinity();
            }
            d += p[i] * std::log2(p[i] / q[i]);
        }
    }
    return d < 0.0 ? 0.0 : d;
}

double js_divergence(const ProbDist& p, const ProbDist& q) {
    require_same_size(p, q);
    std::vector<double> mix(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        mix[i] = 0.5 * (p[i] + q[i]);
    }
    const ProbDist m(std::move(mix));
    double d = entropy(m) - 0.5 * (entropy(p) + entropy(q));
    if (d < 0.0) {
        if (d < -1e-12) {
            throw DistributionError("JS divergence excursion below zero: " + std::to_string(d));
        }
        d = 0.0;
    }
    return d > 1.0 ? 1.0 : d;
}

double js_distance(const ProbDist& p, const ProbDist& q) {
    return std::sqrt(js_divergence(p, q));
}

} // namespace sdlab
