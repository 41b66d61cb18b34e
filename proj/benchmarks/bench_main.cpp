#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "sdlab/adaptive.hpp"
#include "sdlab/decoding.hpp"
#include "sdlab/info_theory.hpp"
#include "sdlab/language_model.hpp"

using namespace sdlab;

namespace {

std::string load_corpus() {
    std::ifstream in(std::filesystem::path(SDLAB_DATA_DIR) / "corpus.txt", std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Fixture {
    std::string corpus = load_corpus();
    Vocabulary vocab = Vocabulary::from_corpus(corpus);
    NGramModel draft = train_ngram(corpus, 2, vocab, 0.1);
    NGramModel target = train_ngram(corpus, 4, vocab, 0.1);
    std::vector<TokenId> prompt = vocab.encode(corpus.substr(0, 32));
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

ProbDist make_dist(std::size_t n, std::uint64_t seed) {
    Pcg32 rng(seed, 0);
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
        x = rng.next_double() + 1e-6;
        total += x;
    }
    for (double& x : w) {
        x /= total;
    }
    return ProbDist(std::move(w));
}

void bm_entropy(benchmark::State& state) {
    const auto d = make_dist(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(entropy(d));
    }
}
BENCHMARK(bm_entropy)->Arg(32)->Arg(256);

void bm_js_distance(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = make_dist(n, 2);
    const auto q = make_dist(n, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(js_distance(p, q));
    }
}
BENCHMARK(bm_js_distance)->Arg(32)->Arg(256);

void bm_ngram_next_distribution(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.target.next_distribution(f.prompt));
    }
}
BENCHMARK(bm_ngram_next_distribution);

void bm_fixed_window_decode(benchmark::State& state) {
    const auto& f = fixture();
    DecodeConfig cfg;
    cfg.max_tokens = 200;
    cfg.window = 5;
    cfg.strategy = Strategy::sampled_equality_sd;
    for (auto _ : state) {
        Pcg32 rng(42, 0);
        benchmark::DoNotOptimize(fixed_window_sd(f.draft, f.target, f.prompt, cfg, rng));
    }
}
BENCHMARK(bm_fixed_window_decode);

void bm_adaptive_decode(benchmark::State& state) {
    const auto& f = fixture();
    AdaptiveConfig cfg;
    cfg.variant = Variant::midpoint;
    cfg.window = 20;
    cfg.max_tokens = 200;
    for (auto _ : state) {
        Pcg32 rng(42, 0);
        benchmark::DoNotOptimize(adaptive_decode(f.draft, f.target, f.prompt, cfg, rng));
    }
}
BENCHMARK(bm_adaptive_decode);

} // namespace

BENCHMARK_MAIN();
