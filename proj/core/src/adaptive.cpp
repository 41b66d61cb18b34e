#include "sdlab/adaptive.hpp"

#include <limits>
#include <stdexcept>

namespace sdlab {

const char* to_string(Variant v) {
    switch (v) {
    case Variant::midpoint:
        return "midpoint";
    case Variant::variant_a:
        return "variant_a";
    case Variant::variant_b:
        return "variant_b";
    case Variant::variant_c:
        return "variant_c";
    case Variant::gen_only:
        return "gen_only";
    case Variant::verify_only:
        return "verify_only";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& s) {
    if (s == "midpoint" || s == "adaptive") {
        return Variant::midpoint;
    }
    if (s == "variant_a") {
        return Variant::variant_a;
    }
    if (s == "variant_b") {
        return Variant::variant_b;
    }
    if (s == "variant_c") {
        return Variant::variant_c;
    }
    if (s == "gen_only") {
        return Variant::gen_only;
    }
    if (s == "verify_only") {
        return Variant::verify_only;
    }
    throw std::invalid_argument("unknown variant: " + s);
}

CandidateBatch generate_candidates(const LanguageModel& draft, std::span<const TokenId> context,
                                   const ThresholdState& state, int window, Pcg32& rng) {
    if (window < 1) {
        throw std::invalid_argument("window must be >= 1");
    }
    CandidateBatch batch;
    std::vector<TokenId> extended(context.begin(), context.end());
    for (int i = 0; i < window; ++i) {
        ProbDist q = draft.next_distribution(extended);
        const double h = entropy(q);
        const TokenId x = sample_token(q, rng);
        extended.push_back(x);
        batch.tokens.push_back(x);
        batch.entropies.push_back(h);
        batch.dists.push_back(std::move(q));
        // The token that crosses the threshold is kept; drafting stops after
        // recording it.
        if (h > state.threshold_gen) {
            break;
        }
    }
    return batch;
}

AdaptiveVerifyResult verify_candidates(const LanguageModel& target,
                                       std::span<const TokenId> context,
                                       const CandidateBatch& batch, ThresholdState& state,
                                       Pcg32& rng) {
    const std::size_t w = batch.tokens.size();
    if (w == 0) {
        throw std::invalid_argument("verify_candidates: empty candidate window");
    }

    // One parallel pass: p_1 .. p_{w+1}, with y_i drawn from every p_i up
    // front.
    std::vector<ProbDist> target_dists;
    std::vector<TokenId> extended(context.begin(), context.end());
    for (std::size_t i = 0; i <= w; ++i) {
        target_dists.push_back(target.next_distribution(extended));
        if (i < w) {
            extended.push_back(batch.tokens[i]);
        }
    }
    std::vector<TokenId> sampled(w + 1);
    for (std::size_t i = 0; i <= w; ++i) {
        sampled[i] = sample_token(target_dists[i], rng);
    }

    AdaptiveVerifyResult result;
    result.js_distances.resize(w);
    for (std::size_t i = 0; i < w; ++i) {
        result.js_distances[i] = js_distance(target_dists[i], batch.dists[i]);
    }

    bool rejected = false;
    for (std::size_t i = 0; i < w && !rejected; ++i) {
        const double d = result.js_distances[i];
        // The comparison is inclusive so that a threshold of zero tolerates
        // nothing: relaxed accepts require strictly d < T_V.
        if (batch.tokens[i] != sampled[i] && d >= state.threshold_verify) {
            state.rejected_entropy_sum += batch.entropies[i];
            state.rejected_entropy_count += 1;
            state.rejected_jsd_sum += d;
            state.rejected_jsd_count += 1;
            result.outcome.verdicts.push_back(Verdict::rejected);
            result.outcome.bonus_token = sampled[i];
            rejected = true;
            break;
        }
        state.accepted_jsd_sum += d;
        state.accepted_jsd_count += 1;
        result.outcome.verdicts.push_back(batch.tokens[i] == sampled[i]
                                              ? Verdict::accepted_match
                                              : Verdict::accepted_relaxed);
        ++result.outcome.accepted_count;
    }
    if (!rejected) {
        result.outcome.bonus_token = sampled[w];
    }
    if (result.outcome.accepted_count > 0) {
        state.accepted_seq_count += 1;
    }
    if (rejected) {
        state.rejected_seq_count += 1;
    }
    return result;
}

double update_generation_threshold(ThresholdState& state) {
    if (state.rejected_entropy_count > 0) {
        state.threshold_gen =
            state.rejected_entropy_sum / static_cast<double>(state.rejected_entropy_count);
    }
    return state.threshold_gen;
}

double update_verification_threshold(ThresholdState& state, Variant variant) {
    const bool has_accepted = state.accepted_jsd_count > 0;
    const bool has_rejected = state.rejected_jsd_count > 0;
    const double accepted_mean =
        has_accepted ? state.accepted_jsd_sum / static_cast<double>(state.accepted_jsd_count) : 0.0;
    const double rejected_mean =
        has_rejected ? state.rejected_jsd_sum / static_cast<double>(state.rejected_jsd_count) : 0.0;

    switch (variant) {
    case Variant::midpoint:
    case Variant::verify_only:
        if (has_accepted && has_rejected) {
            state.threshold_verify = (accepted_mean + rejected_mean) / 2.0;
        }
        break;
    case Variant::variant_a:
        if (has_accepted) {
            state.threshold_verify = accepted_mean;
        }
        break;
    case Variant::variant_b:
        if (has_accepted || has_rejected) {
            state.threshold_verify =
                (state.accepted_jsd_sum + state.rejected_jsd_sum) /
                static_cast<double>(state.accepted_jsd_count + state.rejected_jsd_count);
        }
        break;
    case Variant::variant_c:
        if (has_accepted && has_rejected) {
            const auto ca = static_cast<double>(state.accepted_seq_count);
            const auto cr = static_cast<double>(state.rejected_seq_count);
            if (state.accepted_seq_count == state.rejected_seq_count) {
                // Degenerates to the midpoint rule; computed in that form so
                // the equality is exact in floating point.
                state.threshold_verify = (accepted_mean + rejected_mean) / 2.0;
            } else if (ca + cr > 0.0) {
                state.threshold_verify = (ca * accepted_mean + cr * rejected_mean) / (ca + cr);
            }
        }
        break;
    case Variant::gen_only:
        break; // pinned at 0
    }
    return state.threshold_verify;
}

DecodeResult adaptive_decode(const LanguageModel& draft, const LanguageModel& target,
                             std::span<const TokenId> prompt, const AdaptiveConfig& cfg,
                             Pcg32& rng) {
    if (!(draft.vocab() == target.vocab())) {
        throw std::invalid_argument("draft and target must share one vocabulary");
    }
    if (cfg.max_tokens < 1 || cfg.window < 1 || cfg.fixed_window_for_verify_only < 1) {
        throw std::invalid_argument("max_tokens and window parameters must be >= 1");
    }
    const TokenId eos = target.vocab().eos_id();
    const bool fixed_drafting = cfg.variant == Variant::verify_only;

    DecodeResult result;
    result.tokens.assign(prompt.begin(), prompt.end());
    result.trace.method = to_string(cfg.variant);
    result.trace.seed = cfg.seed;

    ThresholdState state;
    int generated = 0;
    bool done = false;
    while (!done && generated < cfg.max_tokens) {
        IterationRecord rec;
        rec.threshold_gen_before = state.threshold_gen;
        rec.threshold_verify_before = state.threshold_verify;

        CandidateBatch batch;
        if (fixed_drafting) {
            // Entropy never exceeds an infinite threshold, so the window is
            // always drafted in full.
            ThresholdState unbounded = state;
            unbounded.threshold_gen = std::numeric_limits<double>::infinity();
            batch = generate_candidates(draft, result.tokens, unbounded,
                                        cfg.fixed_window_for_verify_only, rng);
        } else {
            batch = generate_candidates(draft, result.tokens, state, cfg.window, rng);
        }

        AdaptiveVerifyResult verify = verify_candidates(target, result.tokens, batch, state, rng);

        rec.candidate_count = static_cast<int>(batch.tokens.size());
        rec.accepted_count = verify.outcome.accepted_count;
        rec.verdicts = verify.outcome.verdicts;
        rec.entropies = batch.entropies;
        rec.js_distances = verify.js_distances;
        rec.draft_step_count = static_cast<int>(batch.tokens.size());
        rec.target_pass_count = 1;

        for (int i = 0; i < verify.outcome.accepted_count; ++i) {
            const TokenId tok = batch.tokens[static_cast<std::size_t>(i)];
            result.tokens.push_back(tok);
            ++rec.emitted_count;
            ++generated;
            if (tok == eos) {
                done = true;
                break;
            }
        }
        if (!done) {
            result.tokens.push_back(verify.outcome.bonus_token);
            ++rec.emitted_count;
            ++generated;
            if (verify.outcome.bonus_token == eos) {
                done = true;
            }
        }

        if (!cfg.freeze_thresholds) {
            update_generation_threshold(state);
            update_verification_threshold(state, cfg.variant);
        }
        rec.threshold_gen_after = state.threshold_gen;
        rec.threshold_verify_after = state.threshold_verify;
        result.trace.add_iteration(std::move(rec));
    }

    const std::size_t limit = prompt.size() + static_cast<std::size_t>(cfg.max_tokens);
    if (result.tokens.size() > limit) {
        result.tokens.resize(limit);
    }
    return result;
}

} // namespace sdlab
