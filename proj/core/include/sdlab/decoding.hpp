#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdlab/language_model.hpp"
#include "sdlab/metrics.hpp"

namespace sdlab {

enum class Strategy {
    autoregressive_target,
    autoregressive_draft,
    greedy_sd,           // argmax equality acceptance
    spec_sampling_sd,    // alpha = min(1, p/q) acceptance, exact w.r.t. target
    sampled_equality_sd, // sampled-token equality acceptance
};

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct DecodeConfig {
    int max_tokens = 64; // K: cap on generated tokens (prompt excluded)
    int window = 5;      // W: candidate tokens drafted per iteration
    Strategy strategy = Strategy::spec_sampling_sd;
    std::uint64_t seed = 0;
};

struct VerifyOutcome {
    int accepted_count = 0; // w: accepted prefix length
    std::vector<Verdict> verdicts;
    TokenId bonus_token = -1; // y_{w+1}: target-produced token after the prefix
};

struct DecodeResult {
    std::vector<TokenId> tokens; // prompt followed by generated tokens
    DecodeTrace trace;
};

// Samples one token at a time from the model until EOS or max_tokens.
DecodeResult autoregressive_decode(const LanguageModel& model, std::span<const TokenId> prompt,
                                   const DecodeConfig& cfg, Pcg32& rng);

// Accepts the longest prefix where argmax(target_i) equals the candidate.
// target_dists carries one extra trailing distribution for the bonus slot.
VerifyOutcome greedy_verify(std::span<const TokenId> candidates,
                            const std::vector<ProbDist>& draft_dists,
                            const std::vector<ProbDist>& target_dists);

// Position-by-position acceptance with probability min(1, p/q); on the first
// rejection the bonus token is drawn from the residual distribution
// norm(max(0, p - q)). Exactly preserves the target distribution.
VerifyOutcome speculative_sampling_verify(std::span<const TokenId> candidates,
                                          const std::vector<ProbDist>& draft_dists,
                                          const std::vector<ProbDist>& target_dists, Pcg32& rng);

// Samples y_i from every target distribution up front and accepts while
// x_i == y_i; the bonus is y at the first mismatch (or the trailing slot).
VerifyOutcome sampled_equality_verify(std::span<const TokenId> candidates,
                                      const std::vector<ProbDist>& target_dists, Pcg32& rng);

// norm(max(0, p - q)); falls back to p when the positive part vanishes.
ProbDist residual_distribution(const ProbDist& p, const ProbDist& q);

// Fixed-window speculative decoding: draft cfg.window tokens, verify with the
// configured strategy, append the accepted prefix plus the bonus token.
DecodeResult fixed_window_sd(const LanguageModel& draft, const LanguageModel& target,
                             std::span<const TokenId> prompt, const DecodeConfig& cfg, Pcg32& rng);

} // namespace sdlab
