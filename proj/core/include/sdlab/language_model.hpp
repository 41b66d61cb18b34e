#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdlab/info_theory.hpp"
#include "sdlab/rng.hpp"
#include "sdlab/vocabulary.hpp"

namespace sdlab {

// Abstract "next-token distribution given context" provider. Implementations
// are immutable after construction and deterministic for a fixed context, so
// concurrent decode sessions may share one instance.
class LanguageModel {
public:
    virtual ~LanguageModel() = default;

    virtual const Vocabulary& vocab() const = 0;
    virtual ProbDist next_distribution(std::span<const TokenId> context) const = 0;

protected:
    void check_context(std::span<const TokenId> context) const;
};

// Exact fixture model: an explicit context -> distribution map with a
// default distribution for unlisted contexts.
class TableModel : public LanguageModel {
public:
    TableModel(const Vocabulary& vocab, ProbDist default_dist);

    void set(std::vector<TokenId> context, ProbDist dist);

    const Vocabulary& vocab() const override { return vocab_; }
    ProbDist next_distribution(std::span<const TokenId> context) const override;

private:
    Vocabulary vocab_;
    ProbDist default_dist_;
    std::map<std::vector<TokenId>, ProbDist> table_;
};

// Additively smoothed character n-gram model. Unseen contexts (and contexts
// shorter than order-1) fall back to the smoothed unigram distribution.
class NGramModel : public LanguageModel {
public:
    NGramModel(Vocabulary vocab, int order, double smoothing_alpha);

    const Vocabulary& vocab() const override { return vocab_; }
    ProbDist next_distribution(std::span<const TokenId> context) const override;

    int order() const { return order_; }
    double smoothing_alpha() const { return alpha_; }
    std::size_t context_count() const { return counts_.size(); }

    void add_observation(std::span<const TokenId> context, TokenId next);

    static NGramModel restore(Vocabulary vocab, int order, double smoothing_alpha,
                              std::map<std::vector<TokenId>, std::vector<double>> counts,
                              std::vector<double> unigram_counts);

    const std::map<std::vector<TokenId>, std::vector<double>>& counts() const { return counts_; }
    const std::vector<double>& unigram_counts() const { return unigram_; }

    bool operator==(const NGramModel& other) const {
        return vocab_ == other.vocab_ && order_ == other.order_ && alpha_ == other.alpha_ &&
               counts_ == other.counts_ && unigram_ == other.unigram_;
    }

private:
    ProbDist smoothed(const std::vector<double>& counts) const;

    Vocabulary vocab_;
    int order_;
    double alpha_;
    std::map<std::vector<TokenId>, std::vector<double>> counts_;
    std::vector<double> unigram_;
};

// Trains an n-gram model on UTF-8 text. The token stream is the corpus
// characters followed by one EOS token.
NGramModel train_ngram(const std::string& corpus_text, int order, const Vocabulary& vocab,
                       double smoothing_alpha = 0.1);

// Inverse-CDF categorical draw: one uniform u in [0, 1), return the smallest
// id whose cumulative weight exceeds u. Advances the generator exactly once.
TokenId sample_token(const ProbDist& dist, Pcg32& rng);

// Smallest token id among maximal weights.
TokenId argmax_token(const ProbDist& dist);

// JSON persistence: {schema_version, order, smoothing_alpha, vocabulary,
// counts}. Schema documented in the repository README.
void save_ngram(const NGramModel& model, const std::filesystem::path& path);
NGramModel load_ngram(const std::filesystem::path& path);

} // namespace sdlab
