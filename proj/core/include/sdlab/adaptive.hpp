#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdlab/decoding.hpp"
#include "sdlab/language_model.hpp"
#include "sdlab/metrics.hpp"

namespace sdlab {

// Verification-threshold update rules, plus the two single-threshold
// ablations.
enum class Variant {
    midpoint,    // T_V = (avg(d_a) + avg(d_r)) / 2
    variant_a,   // T_V = avg(d_a)
    variant_b,   // T_V = pooled mean over all accepted and rejected tokens
    variant_c,   // sequence-count weighted mean of the two class means
    gen_only,    // adaptive drafting only; T_V pinned at 0
    verify_only, // fixed drafting window; adaptive T_V only
};

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Running statistics behind both thresholds. Sums replace the stored lists:
// the means are identical and the trace keeps per-token records for audit.
struct ThresholdState {
    double rejected_entropy_sum = 0.0;
    long rejected_entropy_count = 0;
    double accepted_jsd_sum = 0.0;
    long accepted_jsd_count = 0;
    double rejected_jsd_sum = 0.0;
    long rejected_jsd_count = 0;
    long accepted_seq_count = 0; // c_a: iterations with >= 1 accepted token
    long rejected_seq_count = 0; // c_r: iterations with a rejected token

    double threshold_gen = 0.0;    // T_G, bits
    double threshold_verify = 0.0; // T_V, JS-distance units
};

struct AdaptiveConfig {
    Variant variant = Variant::midpoint;
    int window = 20;                    // W
    int fixed_window_for_verify_only = 5;
    int max_tokens = 64;                // K
    std::uint64_t seed = 0;
    bool freeze_thresholds = false;     // pin both thresholds at their initial 0
};

struct CandidateBatch {
    std::vector<TokenId> tokens;
    std::vector<ProbDist> dists;     // q_i
    std::vector<double> entropies;   // H(q_i)
};

// Samples draft tokens sequentially, stopping after the first token whose
// entropy exceeds threshold_gen (that token is kept) or after window tokens.
CandidateBatch generate_candidates(const LanguageModel& draft, std::span<const TokenId> context,
                                   const ThresholdState& state, int window, Pcg32& rng);

struct AdaptiveVerifyResult {
    VerifyOutcome outcome;
    std::vector<double> js_distances; // d_JS(p_i || q_i) per candidate
};

// One parallel target pass: samples y_i from each p_i, accepts position i iff
// x_i == y_i or d_JS(p_i || q_i) < threshold_verify, truncates at the first
// rejection. Appends accepted JS distances and, for a rejection, the
// rejecting token's entropy and JS distance into the running statistics.
AdaptiveVerifyResult verify_candidates(const LanguageModel& target,
                                       std::span<const TokenId> context,
                                       const CandidateBatch& batch, ThresholdState& state,
                                       Pcg32& rng);

// T_G <- mean of recorded rejected-token entropies; unchanged while empty.
double update_generation_threshold(ThresholdState& state);

// T_V per variant; unchanged whenever a required class mean is undefined.
double update_verification_threshold(ThresholdState& state, Variant variant);

// Full adaptive decoding loop: generate, verify, append accepted prefix plus
// bonus, update both thresholds, until EOS or max_tokens.
DecodeResult adaptive_decode(const LanguageModel& draft, const LanguageModel& target,
                             std::span<const TokenId> prompt, const AdaptiveConfig& cfg,
                             Pcg32& rng);

} // namespace sdlab
