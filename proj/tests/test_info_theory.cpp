#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "sdlab/info_theory.hpp"
#include "sdlab/rng.hpp"

using namespace sdlab;

namespace {

ProbDist random_dist(std::size_t n, Pcg32& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
        x = -std::log(1.0 - rng.next_double());
        total += x;
    }
    for (double& x : w) {
        x /= total;
    }
    return ProbDist(std::move(w));
}

} // namespace

TEST_CASE("ProbDist validation") {
    CHECK_THROWS_AS(ProbDist({0.5, 0.6}), DistributionError);
    CHECK_THROWS_AS(ProbDist({1.2, -0.2}), DistributionError);
    CHECK_THROWS_AS(ProbDist({}), DistributionError);
    CHECK_NOTHROW(ProbDist({0.25, 0.25, 0.25, 0.25}));
}

TEST_CASE("entropy") {
    CHECK(entropy(ProbDist::uniform(4)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(entropy(ProbDist::one_hot(5, 2)) == 0.0);
    CHECK(entropy(ProbDist({0.5, 0.25, 0.25})) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("entropy bounds on random distributions") {
    Pcg32 rng(1, 1);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_dist(16, rng);
        const double h = entropy(p);
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(16.0) + 1e-12);
    }
}

TEST_CASE("cross_entropy") {
    const auto u4 = ProbDist::uniform(4);
    CHECK(cross_entropy(u4, u4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cross_entropy(ProbDist::one_hot(2, 0), ProbDist({0.5, 0.5})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isinf(cross_entropy(ProbDist::one_hot(2, 0), ProbDist::one_hot(2, 1))));
    CHECK_THROWS_AS(cross_entropy(u4, ProbDist::uniform(3)), DistributionError);
}

TEST_CASE("kl_divergence") {
    const auto u4 = ProbDist::uniform(4);
    CHECK(kl_divergence(u4, u4) == 0.0);
    CHECK(kl_divergence(ProbDist::one_hot(2, 0), ProbDist({0.5, 0.5})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isinf(kl_divergence(ProbDist({0.5, 0.5}), ProbDist::one_hot(2, 0))));
}

TEST_CASE("kl equals cross_entropy minus entropy on full support") {
    Pcg32 rng(2, 7);
    for (int i = 0; i < 500; ++i) {
        const auto p = random_dist(8, rng);
        const auto q = random_dist(8, rng);
        CHECK(std::abs(kl_divergence(p, q) - (cross_entropy(p, q) - entropy(p))) < 1e-12);
        CHECK(kl_divergence(p, q) >= 0.0);
    }
}

TEST_CASE("js_divergence endpoints") {
    const auto p = ProbDist::one_hot(2, 0);
    const auto q = ProbDist::one_hot(2, 1);
    CHECK(js_divergence(p, p) == 0.0);
    CHECK(js_divergence(p, q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("js_divergence mixture form agrees with averaged KL form") {
    Pcg32 rng(3, 11);
    for (int i = 0; i < 500; ++i) {
        const auto p = random_dist(16, rng);
        const auto q = random_dist(16, rng);
        std::vector<double> mw(16);
        for (std::size_t k = 0; k < 16; ++k) {
            mw[k] = 0.5 * (p[k] + q[k]);
        }
        const ProbDist m(std::move(mw));
        const double via_kl = 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
        CHECK(std::abs(js_divergence(p, q) - via_kl) < 1e-9);
    }
    // one-hot against uniform, per the two-route cross-check
    const auto p = ProbDist({1.0, 0.0});
    const auto q = ProbDist({0.5, 0.5});
    const ProbDist m({0.75, 0.25});
    CHECK(std::abs(js_divergence(p, q) -
                   (0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m))) < 1e-9);
}

TEST_CASE("js symmetry and bounds") {
    Pcg32 rng(4, 13);
    for (int i = 0; i < 500; ++i) {
        const auto p = random_dist(12, rng);
        const auto q = random_dist(12, rng);
        CHECK(std::abs(js_divergence(p, q) - js_divergence(q, p)) < 1e-12);
        const double d = js_distance(p, q);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("js_distance triangle inequality") {
    Pcg32 rng(5, 17);
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_dist(16, rng);
        const auto q = random_dist(16, rng);
        const auto r = random_dist(16, rng);
        CHECK(js_distance(p, r) <= js_distance(p, q) + js_distance(q, r) + 1e-9);
    }
}

TEST_CASE("js_distance zero iff equal") {
    const auto p = ProbDist({0.3, 0.2, 0.5});
    CHECK(js_distance(p, p) == 0.0);
    CHECK(js_distance(p, ProbDist({0.5, 0.2, 0.3})) > 0.0);
}
