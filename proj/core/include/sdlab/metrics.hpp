#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sdlab {

enum class Verdict { accepted_match, accepted_relaxed, rejected };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

// One generation+verification iteration of a speculative decode loop, or a
// single step of an autoregressive decode.
struct IterationRecord {
    int candidate_count = 0;
    int accepted_count = 0;
    std::vector<Verdict> verdicts;
    std::vector<double> entropies;    // H(q_i) per candidate
    std::vector<double> js_distances; // d_JS(p_i || q_i) per candidate
    double threshold_gen_before = 0.0;
    double threshold_verify_before = 0.0;
    double threshold_gen_after = 0.0;
    double threshold_verify_after = 0.0;
    int emitted_count = 0;     // tokens appended to the output this iteration
    int draft_step_count = 0;  // sequential draft-model steps this iteration
    int target_pass_count = 0; // parallel target-model passes this iteration
};

struct DecodeTrace {
    static constexpr int kSchemaVersion = 1;

    std::string method;
    std::uint64_t seed = 0;
    std::vector<IterationRecord> iterations;

    // Totals; maintained by the decode loops and equal to the per-iteration
    // sums by construction.
    long target_passes = 0;
    long draft_steps = 0;
    long tokens_emitted = 0;

    void add_iteration(IterationRecord rec);
};

struct AcceptanceStats {
    double mean_candidates = 0.0; // #cand
    double mean_matches = 0.0;    // #match
    double acceptance_rate = 0.0; // AccRate = total match / total cand
};

// Per-iteration candidate/match means and the overall acceptance rate.
// Bonus tokens count toward emitted tokens but never toward matches.
AcceptanceStats acceptance_stats(const DecodeTrace& trace);

// Simulated latency stand-in for wall-clock throughput: one decode costs
// draft_steps * draft_step_cost + target_passes * target_pass_cost.
struct CostModel {
    double draft_step_cost = 1.0;
    double target_pass_cost = 7.5;
};

double simulated_cost(const DecodeTrace& trace, const CostModel& cost);

// Simulated tokens per time unit.
double simulated_throughput(const DecodeTrace& trace, const CostModel& cost);

// Throughput ratio of method over baseline under the same cost model.
double simulated_speedup(const DecodeTrace& method, const DecodeTrace& baseline,
                         const CostModel& cost);

// Token-weighted average of the verification threshold in effect when each
// candidate was scored (the JSDist report column). Empty when the trace
// scored no candidates.
std::optional<double> mean_verification_threshold(const DecodeTrace& trace);

struct ClassSummary {
    long count = 0;
    double mean_entropy = 0.0;
    double mean_js_distance = 0.0;
};

// Accepted-vs-rejected token statistics plus a fixed-bin histogram of JS
// distances (20 bins of width 0.05 over [0, 1]).
struct SeparationReport {
    static constexpr int kHistogramBins = 20;

    std::optional<ClassSummary> accepted;
    std::optional<ClassSummary> rejected;
    std::array<long, kHistogramBins> accepted_histogram{};
    std::array<long, kHistogramBins> rejected_histogram{};
};

SeparationReport separation_report(const std::vector<DecodeTrace>& traces);

// Trace persistence (schema-versioned JSON).
std::string trace_to_json(const DecodeTrace& trace);
DecodeTrace trace_from_json(const std::string& text);
void save_trace(const DecodeTrace& trace, const std::filesystem::path& path);
DecodeTrace load_trace(const std::filesystem::path& path);

} // namespace sdlab
