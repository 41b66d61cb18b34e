#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sdlab {

class DistributionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Probability mass below this is treated as zero inside log terms.
inline constexpr double kProbFloor = 1e-15;

// Discrete probability vector over a shared vocabulary. Validated on
// construction: non-negative weights summing to 1 within 1e-9.
class ProbDist {
public:
    explicit ProbDist(std::vector<double> weights);

    static ProbDist uniform(std::size_t n);
    static ProbDist one_hot(std::size_t n, std::size_t index);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

    bool operator==(const ProbDist& other) const = default;

private:
    std::vector<double> weights_;
};

// All measures use base-2 logarithms so entropy and both thresholds live on
// a single bits scale, and JS divergence is bounded by 1.

// H(p) = -sum p(x) log2 p(x), with 0 log 0 = 0. Result in [0, log2 |V|].
double entropy(const ProbDist& p);

// H(p, q) = -sum p(x) log2 q(x). Returns +infinity when some x has
// p(x) > 0 but q(x) = 0.
double cross_entropy(const ProbDist& p, const ProbDist& q);

// D_KL(p || q) = H(p, q) - H(p). Non-negative; +infinity when unsupported.
double kl_divergence(const ProbDist& p, const ProbDist& q);

// D_JS(p || q) = H(m) - (H(p) + H(q)) / 2 with m = (p + q) / 2.
// Always finite, clamped to [0, 1]; negative excursions beyond 1e-12 in
// magnitude raise DistributionError.
double js_divergence(const ProbDist& p, const ProbDist& q);

// d_JS(p || q) = sqrt(D_JS(p || q)). A metric on distributions, in [0, 1].
double js_distance(const ProbDist& p, const ProbDist& q);

} // namespace sdlab
