#include "sdlab/language_model.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sdlab {

void LanguageModel::check_context(std::span<const TokenId> context) const {
    for (TokenId id : context) {
        if (!vocab().contains(id)) {
            throw std::out_of_range("context token id out of range: " + std::to_string(id));
        }
    }
}

TableModel::TableModel(const Vocabulary& vocab, ProbDist default_dist)
    : vocab_(vocab), default_dist_(std::move(default_dist)) {
    if (default_dist_.size() != vocab_.size()) {
        throw DistributionError("default distribution length does not match vocabulary");
    }
}

void TableModel::set(std::vector<TokenId> context, ProbDist dist) {
    if (dist.size() != vocab_.size()) {
        throw DistributionError("stored distribution length does not match vocabulary");
    }
    table_.insert_or_assign(std::move(context), std::move(dist));
}

ProbDist TableModel::next_distribution(std::span<const TokenId> context) const {
    check_context(context);
    const auto it = table_.find(std::vector<TokenId>(context.begin(), context.end()));
    return it != table_.end() ? it->second : default_dist_;
}

NGramModel::NGramModel(Vocabulary vocab, int order, double smoothing_alpha)
    : vocab_(std::move(vocab)), order_(order), alpha_(smoothing_alpha),
      unigram_(vocab_.size(), 0.0) {
    if (order_ < 1) {
        throw std::invalid_argument("n-gram order must be >= 1");
    }
    if (alpha_ < 0.0) {
        throw std::invalid_argument("smoothing alpha must be >= 0");
    }
}

void NGramModel::add_observation(std::span<const TokenId> context, TokenId next) {
    check_context(context);
    if (!vocab_.contains(next)) {
        throw std::out_of_range("observed token id out of range");
    }
    unigram_[static_cast<std::size_t>(next)] += 1.0;
    if (order_ > 1 && context.size() == static_cast<std::size_t>(order_ - 1)) {
        auto& row = counts_.try_emplace(std::vector<TokenId>(context.begin(), context.end()),
                                        std::vector<double>(vocab_.size(), 0.0))
                        .first->second;
        row[static_cast<std::size_t>(next)] += 1.0;
    }
}

NGramModel NGramModel::restore(Vocabulary vocab, int order, double smoothing_alpha,
                               std::map<std::vector<TokenId>, std::vector<double>> counts,
                               std::vector<double> unigram_counts) {
    NGramModel model(std::move(vocab), order, smoothing_alpha);
    if (unigram_counts.size() != model.vocab_.size()) {
        throw std::invalid_argument("unigram count vector length does not match vocabulary");
    }
    for (const auto& [context, row] : counts) {
        if (context.size() != static_cast<std::size_t>(order - 1) ||
            row.size() != model.vocab_.size()) {
            throw std::invalid_argument("malformed count row");
        }
        model.check_context(context);
    }
    model.counts_ = std::move(counts);
    model.unigram_ = std::move(unigram_counts);
    return model;
}

ProbDist NGramModel::smoothed(const std::vector<double>& counts) const {
    std::vector<double> w(counts.size());
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        w[i] = counts[i] + alpha_;
        total += w[i];
    }
    if (total <= 0.0) {
        return ProbDist::uniform(counts.size());
    }
    for (double& x : w) {
        x /= total;
    }
    return ProbDist(std::move(w));
}

ProbDist NGramModel::next_distribution(std::span<const TokenId> context) const {
    check_context(context);
    if (order_ > 1) {
        const auto need = static_cast<std::size_t>(order_ - 1);
        if (context.size() >= need) {
            const auto suffix = context.subspan(context.size() - need);
            const auto it = counts_.find(std::vector<TokenId>(suffix.begin(), suffix.end()));
            if (it != counts_.end()) {
                return smoothed(it->second);
            }
        }
    }
    return smoothed(unigram_);
}

NGramModel train_ngram(const std::string& corpus_text, int order, const Vocabulary& vocab,
                       double smoothing_alpha) {
    auto stream = vocab.encode(corpus_text);
    if (stream.empty()) {
        throw std::invalid_argument("empty corpus");
    }
    stream.push_back(vocab.eos_id());
    NGramModel model(vocab, order, smoothing_alpha);
    const auto ctx_len = static_cast<std::size_t>(order - 1);
    for (std::size_t t = 0; t < stream.size(); ++t) {
        std::span<const TokenId> context;
        if (t >= ctx_len) {
            context = std::span<const TokenId>(stream).subspan(t - ctx_len, ctx_len);
        }
        model.add_observation(context, stream[t]);
    }
    return model;
}

TokenId sample_token(const ProbDist& dist, Pcg32& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    const auto& w = dist.weights();
    for (std::size_t i = 0; i < w.size(); ++i) {
        cum += w[i];
        if (u < cum) {
            return static_cast<TokenId>(i);
        }
    }
    // Cumulative sum fell short of 1 by rounding; attribute the tail to the
    // last positive-weight token.
    for (std::size_t i = w.size(); i-- > 0;) {
        if (w[i] > 0.0) {
            return static_cast<TokenId>(i);
        }
    }
    return static_cast<TokenId>(w.size() - 1);
}

TokenId argmax_token(const ProbDist& dist) {
    const auto& w = dist.weights();
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] > w[best]) {
            best = i;
        }
    }
    return static_cast<TokenId>(best);
}

void save_ngram(const NGramModel& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["order"] = model.order();
    j["smoothing_alpha"] = model.smoothing_alpha();
    j["vocabulary"] = {{"tokens", model.vocab().tokens()}, {"eos_id", model.vocab().eos_id()}};
    auto& rows = j["counts"] = nlohmann::json::array();
    for (const auto& [context, counts] : model.counts()) {
        rows.push_back({{"context", context}, {"counts", counts}});
    }
    j["unigram_counts"] = model.unigram_counts();
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open model file for writing: " + path.string());
    }
    out << j.dump(2) << '\n';
}

NGramModel load_ngram(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path.string());
    }
    nlohmann::json j;
    in >> j;
    if (j.at("schema_version").get<int>() != 1) {
        throw std::runtime_error("unsupported model schema version");
    }
    Vocabulary vocab(j.at("vocabulary").at("tokens").get<std::vector<std::string>>(),
                     j.at("vocabulary").at("eos_id").get<TokenId>());
    std::map<std::vector<TokenId>, std::vector<double>> counts;
    for (const auto& row : j.at("counts")) {
        counts.emplace(row.at("context").get<std::vector<TokenId>>(),
                       row.at("counts").get<std::vector<double>>());
    }
    return NGramModel::restore(std::move(vocab), j.at("order").get<int>(),
                               j.at("smoothing_alpha").get<double>(), std::move(counts),
                               j.at("unigram_counts").get<std::vector<double>>());
}

} // namespace sdlab
