#include "sdlab/decoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdlab {

const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::autoregressive_target:
        return "autoregressive_target";
    case Strategy::autoregressive_draft:
        return "autoregressive_draft";
    case Strategy::greedy_sd:
        return "greedy_sd";
    case Strategy::spec_sampling_sd:
        return "spec_sampling_sd";
    case Strategy::sampled_equality_sd:
        return "sampled_equality_sd";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "autoregressive_target") {
        return Strategy::autoregressive_target;
    }
    if (s == "autoregressive_draft") {
        return Strategy::autoregressive_draft;
    }
    if (s == "greedy_sd") {
        return Strategy::greedy_sd;
    }
    if (s == "spec_sampling_sd") {
        return Strategy::spec_sampling_sd;
    }
    if (s == "sampled_equality_sd") {
        return Strategy::sampled_equality_sd;
    }
    throw std::invalid_argument("unknown strategy: " + s);
}

DecodeResult autoregressive_decode(const LanguageModel& model, std::span<const TokenId> prompt,
                                   const DecodeConfig& cfg, Pcg32& rng) {
    if (cfg.max_tokens < 1) {
        throw std::invalid_argument("max_tokens must be >= 1");
    }
    DecodeResult result;
    result.tokens.assign(prompt.begin(), prompt.end());
    result.trace.method = to_string(cfg.strategy);
    result.trace.seed = cfg.seed;

    const bool as_draft = cfg.strategy == Strategy::autoregressive_draft;
    int generated = 0;
    while (generated < cfg.max_tokens) {
        const ProbDist dist = model.next_distribution(result.tokens);
        const TokenId tok = sample_token(dist, rng);
        result.tokens.push_back(tok);
        ++generated;

        IterationRecord rec;
        rec.emitted_count = 1;
        rec.entropies.push_back(entropy(dist));
        rec.draft_step_count = as_draft ? 1 : 0;
        rec.target_pass_count = as_draft ? 0 : 1;
        result.trace.add_iteration(std::move(rec));

        if (tok == model.vocab().eos_id()) {
            break;
        }
    }
    return result;
}

VerifyOutcome greedy_verify(std::span<const TokenId> candidates,
                            const std::vector<ProbDist>& draft_dists,
                            const std::vector<ProbDist>& target_dists) {
    if (draft_dists.size() != candidates.size() ||
        target_dists.size() != candidates.size() + 1) {
        throw std::invalid_argument("greedy_verify: distribution list length mismatch");
    }
    VerifyOutcome out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const TokenId top = argmax_token(target_dists[i]);
        if (top != candidates[i]) {
            out.verdicts.push_back(Verdict::rejected);
            out.bonus_token = top;
            return out;
        }
        out.verdicts.push_back(Verdict::accepted_match);
        ++out.accepted_count;
    }
    out.bonus_token = argmax_token(target_dists.back());
    return out;
}

ProbDist residual_distribution(const ProbDist& p, const ProbDist& q) {
    std::vector<double> w(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        w[i] = std::max(0.0, p[i] - q[i]);
        total += w[i];
    }
    if (total <= 0.0) {
        // p == q: rejection has probability zero, any fallback is unreachable
        // in exact arithmetic; return p for numerical robustness.
        return p;
    }
    for (double& x : w) {
        x /= total;
    }
    return ProbDist(std::move(w));
}

VerifyOutcome speculative_sampling_verify(std::span<const TokenId> candidates,
                                          const std::vector<ProbDist>& draft_dists,
                                          const std::vector<ProbDist>& target_dists, Pcg32& rng) {
    if (draft_dists.size() != candidates.size() ||
        target_dists.size() != candidates.size() + 1) {
        throw std::invalid_argument("speculative_sampling_verify: distribution length mismatch");
    }
    VerifyOutcome out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto x = static_cast<std::size_t>(candidates[i]);
        const double q = draft_dists[i][x];
        const double p = target_dists[i][x];
        if (q <= 0.0) {
            throw std::invalid_argument("candidate token has zero draft probability");
        }
        const double alpha = std::min(1.0, p / q);
        if (rng.next_double() < alpha) {
            out.verdicts.push_back(Verdict::accepted_match);
            ++out.accepted_count;
            continue;
        }
        out.verdicts.push_back(Verdict::rejected);
        out.bonus_token = sample_token(residual_distribution(target_dists[i], draft_dists[i]), rng);
        return out;
    }
    out.bonus_token = sample_token(target_dists.back(), rng);
    return out;
}

VerifyOutcome sampled_equality_verify(std::span<const TokenId> candidates,
                                      const std::vector<ProbDist>& target_dists, Pcg32& rng) {
    if (target_dists.size() != candidates.size() + 1) {
        throw std::invalid_argument("sampled_equality_verify: distribution length mismatch");
    }
    // All target tokens are drawn up front, mirroring a parallel verification
    // pass; this keeps the RNG draw sequence independent of where the first
    // mismatch lands.
    std::vector<TokenId> sampled(target_dists.size());
    for (std::size_t i = 0; i < target_dists.size(); ++i) {
        sampled[i] = sample_token(target_dists[i], rng);
    }
    VerifyOutcome out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (sampled[i] != candidates[i]) {
            out.verdicts.push_back(Verdict::rejected);
            out.bonus_token = sampled[i];
            return out;
        }
        out.verdicts.push_back(Verdict::accepted_match);
        ++out.accepted_count;
    }
    out.bonus_token = sampled.back();
    return out;
}

DecodeResult fixed_window_sd(const LanguageModel& draft, const LanguageModel& target,
                             std::span<const TokenId> prompt, const DecodeConfig& cfg, Pcg32& rng) {
    if (!(draft.vocab() == target.vocab())) {
        throw std::invalid_argument("draft and target must share one vocabulary");
    }
    if (cfg.max_tokens < 1 || cfg.window < 1) {
        throw std::invalid_argument("max_tokens and window must be >= 1");
    }
    const TokenId eos = target.vocab().eos_id();
    const bool greedy = cfg.strategy == Strategy::greedy_sd;

    DecodeResult result;
    result.tokens.assign(prompt.begin(), prompt.end());
    result.trace.method = to_string(cfg.strategy);
    result.trace.seed = cfg.seed;

    int generated = 0;
    bool done = false;
    while (!done && generated < cfg.max_tokens) {
        // Generation: draft cfg.window candidates sequentially.
        std::vector<TokenId> candidates;
        std::vector<ProbDist> draft_dists;
        std::vector<TokenId> context = result.tokens;
        for (int i = 0; i < cfg.window; ++i) {
            ProbDist q = draft.next_distribution(context);
            const TokenId x = greedy ? argmax_token(q) : sample_token(q, rng);
            candidates.push_back(x);
            context.push_back(x);
            draft_dists.push_back(std::move(q));
        }

        // Verification: one parallel target pass over the window plus the
        // bonus slot.
        std::vector<ProbDist> target_dists;
        context = result.tokens;
        for (std::size_t i = 0; i <= candidates.size(); ++i) {
            target_dists.push_back(target.next_distribution(context));
            if (i < candidates.size()) {
                context.push_back(candidates[i]);
            }
        }

        VerifyOutcome outcome;
        switch (cfg.strategy) {
        case Strategy::greedy_sd:
            outcome = greedy_verify(candidates, draft_dists, target_dists);
            break;
        case Strategy::spec_sampling_sd:
            outcome = speculative_sampling_verify(candidates, draft_dists, target_dists, rng);
            break;
        case Strategy::sampled_equality_sd:
            outcome = sampled_equality_verify(candidates, target_dists, rng);
            break;
        default:
            throw std::invalid_argument("fixed_window_sd requires a speculative strategy");
        }

        IterationRecord rec;
        rec.candidate_count = static_cast<int>(candidates.size());
        rec.accepted_count = outcome.accepted_count;
        rec.verdicts = outcome.verdicts;
        rec.draft_step_count = static_cast<int>(candidates.size());
        rec.target_pass_count = 1;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            rec.entropies.push_back(entropy(draft_dists[i]));
            rec.js_distances.push_back(js_distance(target_dists[i], draft_dists[i]));
        }

        // Append the accepted prefix, discarding anything after a first EOS,
        // then the bonus token.
        for (int i = 0; i < outcome.accepted_count; ++i) {
            result.tokens.push_back(candidates[static_cast<std::size_t>(i)]);
            ++rec.emitted_count;
            ++generated;
            if (candidates[static_cast<std::size_t>(i)] == eos) {
                done = true;
                break;
            }
        }
        if (!done) {
            result.tokens.push_back(outcome.bonus_token);
            ++rec.emitted_count;
            ++generated;
            if (outcome.bonus_token == eos) {
                done = true;
            }
        }
        result.trace.add_iteration(std::move(rec));
    }

    // Hard cap for callers: the trace keeps the overshoot, the token stream
    // does not.
    const std::size_t limit = prompt.size() + static_cast<std::size_t>(cfg.max_tokens);
    if (result.tokens.size() > limit) {
        result.tokens.resize(limit);
    }
    return result;
}

} // namespace sdlab
