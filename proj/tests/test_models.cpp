#include <array>
#include <cstdio>
#include <filesystem>

#include <doctest.h>

#include "sdlab/language_model.hpp"

using namespace sdlab;

TEST_CASE("utf8 scalar splitting and errors") {
    const auto scalars = utf8_scalars("a\xc3\xa9z");
    REQUIRE(scalars.size() == 3);
    CHECK(scalars[1] == "\xc3\xa9");

    CHECK_THROWS_WITH_AS(static_cast<void>(utf8_scalars("ab\xff")),
                         doctest::Contains("offset 2"), TokenizeError);
    CHECK_THROWS_AS(static_cast<void>(utf8_scalars("\xc3")), TokenizeError);
}

TEST_CASE("vocabulary from corpus") {
    const auto vocab = Vocabulary::from_corpus("abab");
    CHECK(vocab.size() == 3); // a, b, eos
    CHECK(vocab.token(vocab.eos_id()) == Vocabulary::kEosToken);
    CHECK_THROWS_WITH_AS(static_cast<void>(vocab.encode("abc")),
                         doctest::Contains("offset 2"), TokenizeError);
    const auto ids = vocab.encode("ba");
    CHECK(vocab.decode(ids) == "ba");
}

TEST_CASE("train_ngram on abab") {
    const auto vocab = Vocabulary::from_corpus("abab");
    const auto a = vocab.encode("a")[0];
    const auto b = vocab.encode("b")[0];

    SUBCASE("alpha near zero concentrates on observed continuations") {
        const auto model = train_ngram("abab", 2, vocab, 1e-9);
        const auto dist = model.next_distribution(std::array<TokenId, 1>{a});
        CHECK(dist[static_cast<std::size_t>(b)] == doctest::Approx(1.0).epsilon(1e-6));
        // context b continues to a or eos, once each
        const auto dist_b = model.next_distribution(std::array<TokenId, 1>{b});
        CHECK(dist_b[static_cast<std::size_t>(a)] == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(dist_b[static_cast<std::size_t>(vocab.eos_id())] ==
              doctest::Approx(0.5).epsilon(1e-6));
    }

    SUBCASE("order 1 ignores context") {
        const auto model = train_ngram("abab", 1, vocab, 0.1);
        const auto d1 = model.next_distribution(std::array<TokenId, 1>{a});
        const auto d2 = model.next_distribution(std::array<TokenId, 1>{b});
        CHECK(d1 == d2);
    }

    SUBCASE("huge alpha approaches uniform") {
        const auto model = train_ngram("abab", 2, vocab, 1e9);
        const auto dist = model.next_distribution(std::array<TokenId, 1>{a});
        for (std::size_t i = 0; i < dist.size(); ++i) {
            CHECK(dist[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
        }
    }

    SUBCASE("unseen context falls back to unigram") {
        const auto model = train_ngram("abab", 3, vocab, 0.1);
        // eos never appears inside the corpus, so (eos, eos) is unseen
        const std::array<TokenId, 2> ctx{vocab.eos_id(), vocab.eos_id()};
        const auto fallback = model.next_distribution(ctx);
        const auto unigram = train_ngram("abab", 1, vocab, 0.1)
                                 .next_distribution(std::array<TokenId, 0>{});
        CHECK(fallback == unigram);
    }
}

TEST_CASE("ngram alpha > 0 yields full support") {
    const auto vocab = Vocabulary::from_corpus("abab");
    const auto model = train_ngram("abab", 2, vocab, 0.1);
    const auto a = vocab.encode("a")[0];
    const auto dist = model.next_distribution(std::array<TokenId, 1>{a});
    for (std::size_t i = 0; i < dist.size(); ++i) {
        CHECK(dist[i] > 0.0);
    }
}

TEST_CASE("train_ngram rejects bad input") {
    const auto vocab = Vocabulary::from_corpus("abab");
    CHECK_THROWS(static_cast<void>(train_ngram("", 2, vocab, 0.1)));
    CHECK_THROWS_AS(static_cast<void>(train_ngram("abc", 2, vocab, 0.1)), TokenizeError);
    CHECK_THROWS(static_cast<void>(train_ngram("abab", 0, vocab, 0.1)));
}

TEST_CASE("table model returns stored entries verbatim") {
    const auto vocab = Vocabulary::from_corpus("ab");
    TableModel model(vocab, ProbDist::uniform(3));
    const ProbDist stored({0.7, 0.2, 0.1});
    model.set({0}, stored);
    CHECK(model.next_distribution(std::array<TokenId, 1>{0}) == stored);
    CHECK(model.next_distribution(std::array<TokenId, 1>{1}) == ProbDist::uniform(3));
    CHECK_THROWS_AS(static_cast<void>(model.next_distribution(std::array<TokenId, 1>{9})),
                    std::out_of_range);
}

TEST_CASE("sample_token") {
    Pcg32 rng(42, 0);

    SUBCASE("one-hot always returns that token") {
        for (int i = 0; i < 50; ++i) {
            CHECK(sample_token(ProbDist::one_hot(5, 3), rng) == 3);
        }
    }

    SUBCASE("same seed reproduces the token stream") {
        const ProbDist dist({0.2, 0.3, 0.5});
        Pcg32 r1(7, 9), r2(7, 9);
        for (int i = 0; i < 200; ++i) {
            CHECK(sample_token(dist, r1) == sample_token(dist, r2));
        }
    }

    SUBCASE("uniform over 4 is close to 1/4 per token") {
        std::array<int, 4> hits{};
        const auto u4 = ProbDist::uniform(4);
        for (int i = 0; i < 100000; ++i) {
            ++hits[static_cast<std::size_t>(sample_token(u4, rng))];
        }
        for (int h : hits) {
            CHECK(h / 100000.0 == doctest::Approx(0.25).epsilon(0.04));
        }
    }
}

TEST_CASE("argmax_token") {
    CHECK(argmax_token(ProbDist({0.1, 0.7, 0.2})) == 1);
    CHECK(argmax_token(ProbDist({0.5, 0.5})) == 0); // ties break low
    CHECK(argmax_token(ProbDist::one_hot(6, 4)) == 4);
}

TEST_CASE("ngram persistence round trip") {
    const std::string corpus = "the cat sat on the mat. the cat ran.";
    const auto vocab = Vocabulary::from_corpus(corpus);
    const auto model = train_ngram(corpus, 3, vocab, 0.1);

    const auto path = std::filesystem::temp_directory_path() / "sdlab_model_roundtrip.json";
    save_ngram(model, path);
    const auto loaded = load_ngram(path);
    CHECK(loaded == model);
    std::filesystem::remove(path);
}
