#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "sdlab/metrics.hpp"

using namespace sdlab;

namespace {

IterationRecord make_iter(int candidates, int accepted, int emitted, int draft_steps = -1,
                          int target_passes = 1) {
    IterationRecord rec;
    rec.candidate_count = candidates;
    rec.accepted_count = accepted;
    rec.emitted_count = emitted;
    rec.draft_step_count = draft_steps < 0 ? candidates : draft_steps;
    rec.target_pass_count = target_passes;
    for (int i = 0; i < accepted; ++i) {
        rec.verdicts.push_back(Verdict::accepted_match);
    }
    if (accepted < candidates) {
        rec.verdicts.push_back(Verdict::rejected);
    }
    for (int i = 0; i < candidates; ++i) {
        rec.entropies.push_back(0.5 + 0.1 * i);
        rec.js_distances.push_back(0.2 + 0.05 * i);
    }
    return rec;
}

} // namespace

TEST_CASE("verdict string round trip") {
    for (const Verdict v : {Verdict::accepted_match, Verdict::accepted_relaxed, Verdict::rejected}) {
        CHECK(verdict_from_string(to_string(v)) == v);
    }
    CHECK_THROWS(static_cast<void>(verdict_from_string("nope")));
}

TEST_CASE("add_iteration maintains the totals") {
    DecodeTrace trace;
    trace.add_iteration(make_iter(5, 3, 4));
    trace.add_iteration(make_iter(2, 2, 3));
    CHECK(trace.draft_steps == 7);
    CHECK(trace.target_passes == 2);
    CHECK(trace.tokens_emitted == 7);
}

TEST_CASE("acceptance_stats") {
    SUBCASE("hand-computed small trace") {
        DecodeTrace trace;
        trace.add_iteration(make_iter(5, 3, 4));
        trace.add_iteration(make_iter(5, 5, 6));
        trace.add_iteration(make_iter(2, 0, 1));
        const auto stats = acceptance_stats(trace);
        CHECK(stats.mean_candidates == doctest::Approx(12.0 / 3.0).epsilon(1e-12));
        CHECK(stats.mean_matches == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
        CHECK(stats.acceptance_rate == doctest::Approx(8.0 / 12.0).epsilon(1e-12));
    }

    SUBCASE("pooled ratio, not a mean of ratios") {
        // 4228 matches over 5000 candidates = 0.8456 regardless of how the
        // candidates are split across iterations.
        DecodeTrace trace;
        trace.add_iteration(make_iter(4000, 3800, 3801));
        trace.add_iteration(make_iter(1000, 428, 429));
        const auto stats = acceptance_stats(trace);
        CHECK(stats.acceptance_rate == doctest::Approx(0.8456).epsilon(1e-12));
    }

    SUBCASE("empty trace is refused") {
        CHECK_THROWS(static_cast<void>(acceptance_stats(DecodeTrace{})));
    }
}

TEST_CASE("simulated cost, throughput, speedup") {
    const CostModel cost{1.0, 7.5};

    DecodeTrace a;
    a.add_iteration(make_iter(5, 4, 5));
    a.add_iteration(make_iter(5, 5, 6));
    // cost = 10 * 1.0 + 2 * 7.5 = 25, tokens = 11
    CHECK(simulated_cost(a, cost) == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(simulated_throughput(a, cost) == doctest::Approx(11.0 / 25.0).epsilon(1e-12));

    SUBCASE("identical traces give speedup exactly 1") {
        CHECK(simulated_speedup(a, a, cost) == 1.0);
    }

    SUBCASE("doubled tokens at equal cost doubles the speedup") {
        DecodeTrace b;
        b.add_iteration(make_iter(5, 4, 10, 5, 1));
        b.add_iteration(make_iter(5, 5, 12, 5, 1));
        CHECK(simulated_speedup(b, a, cost) == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("fixture reproducing a known speedup ratio") {
        // baseline: 240 tokens in 240 target passes -> throughput 240/1800
        // method: 250 tokens from 40 windows of 5 drafts -> 250/(200+300)
        DecodeTrace baseline;
        for (int i = 0; i < 240; ++i) {
            baseline.add_iteration(make_iter(0, 0, 1, 0, 1));
        }
        DecodeTrace method;
        for (int i = 0; i < 40; ++i) {
            method.add_iteration(make_iter(5, 5, 6, 5, 1)); // 6.25 emitted avg
        }
        // pad method to 250 emitted tokens: 40 * 6 = 240, add a 10-token tail
        method.add_iteration(make_iter(10, 9, 10));
        const double speedup = simulated_speedup(method, baseline, CostModel{1.0, 7.5});
        // method throughput: 250 / (210 * 1.0 + 41 * 7.5)
        const double expected = (250.0 / (210.0 + 41.0 * 7.5)) / (240.0 / 1800.0);
        CHECK(speedup == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("mean_verification_threshold weights by candidate count") {
    DecodeTrace trace;
    auto r1 = make_iter(4, 4, 5);
    r1.threshold_verify_before = 0.2;
    auto r2 = make_iter(1, 0, 1);
    r2.threshold_verify_before = 0.7;
    trace.add_iteration(std::move(r1));
    trace.add_iteration(std::move(r2));
    const auto mean = mean_verification_threshold(trace);
    REQUIRE(mean.has_value());
    CHECK(*mean == doctest::Approx((4 * 0.2 + 1 * 0.7) / 5.0).epsilon(1e-12));

    DecodeTrace empty;
    empty.add_iteration(make_iter(0, 0, 1, 0, 1));
    CHECK(!mean_verification_threshold(empty).has_value());
}

TEST_CASE("separation_report") {
    DecodeTrace trace;
    IterationRecord rec;
    rec.candidate_count = 2;
    rec.accepted_count = 1;
    rec.verdicts = {Verdict::accepted_match, Verdict::rejected};
    rec.entropies = {1.0, 3.0};
    rec.js_distances = {0.16, 0.52};
    rec.emitted_count = 2;
    rec.draft_step_count = 2;
    rec.target_pass_count = 1;
    trace.add_iteration(rec);

    SUBCASE("class means and histogram placement") {
        const auto report = separation_report({trace});
        REQUIRE(report.accepted.has_value());
        REQUIRE(report.rejected.has_value());
        CHECK(report.accepted->count == 1);
        CHECK(report.accepted->mean_entropy == 1.0);
        CHECK(report.accepted->mean_js_distance == 0.16);
        CHECK(report.rejected->mean_entropy == 3.0);
        CHECK(report.rejected->mean_js_distance == 0.52);
        CHECK(report.accepted_histogram[3] == 1);  // 0.16 -> [0.15, 0.20)
        CHECK(report.rejected_histogram[10] == 1); // 0.52 -> [0.50, 0.55)
        const long accepted_total = std::accumulate(report.accepted_histogram.begin(),
                                                    report.accepted_histogram.end(), 0L);
        const long rejected_total = std::accumulate(report.rejected_histogram.begin(),
                                                    report.rejected_histogram.end(), 0L);
        CHECK(accepted_total == report.accepted->count);
        CHECK(rejected_total == report.rejected->count);
    }

    SUBCASE("missing class stays empty") {
        DecodeTrace accepts_only;
        accepts_only.add_iteration(make_iter(3, 3, 4));
        const auto report = separation_report({accepts_only});
        CHECK(report.accepted.has_value());
        CHECK(!report.rejected.has_value());
    }

    SUBCASE("pools across traces") {
        const auto report = separation_report({trace, trace});
        CHECK(report.accepted->count == 2);
        CHECK(report.rejected->count == 2);
    }
}

TEST_CASE("trace JSON round trip") {
    DecodeTrace trace;
    trace.method = "sampled_equality_sd";
    trace.seed = 987654321;
    auto rec = make_iter(3, 2, 3);
    rec.verdicts = {Verdict::accepted_match, Verdict::accepted_relaxed, Verdict::rejected};
    rec.threshold_gen_before = 0.1;
    rec.threshold_verify_before = 0.2;
    rec.threshold_gen_after = 0.3;
    rec.threshold_verify_after = 0.4;
    trace.add_iteration(std::move(rec));

    const auto text = trace_to_json(trace);
    const auto back = trace_from_json(text);
    CHECK(back.method == trace.method);
    CHECK(back.seed == trace.seed);
    CHECK(back.target_passes == trace.target_passes);
    CHECK(back.draft_steps == trace.draft_steps);
    CHECK(back.tokens_emitted == trace.tokens_emitted);
    REQUIRE(back.iterations.size() == 1);
    const auto& it = back.iterations.front();
    CHECK(it.verdicts == trace.iterations.front().verdicts);
    CHECK(it.entropies == trace.iterations.front().entropies);
    CHECK(it.js_distances == trace.iterations.front().js_distances);
    CHECK(it.threshold_verify_before == 0.2);
    CHECK(it.threshold_gen_after == 0.3);
    CHECK(it.draft_step_count == 3);
    CHECK(it.target_pass_count == 1);

    SUBCASE("file persistence") {
        const auto path = std::filesystem::temp_directory_path() / "sdlab_trace_test.json";
        save_trace(trace, path);
        const auto loaded = load_trace(path);
        CHECK(trace_to_json(loaded) == text);
        std::filesystem::remove(path);
    }

    SUBCASE("inconsistent totals are refused") {
        // totals are validated against the iteration sums on load
        DecodeTrace bad = trace;
        bad.tokens_emitted += 1;
        CHECK_THROWS(static_cast<void>(trace_from_json(trace_to_json(bad))));
    }
}
