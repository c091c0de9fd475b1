#include "dac/error.hpp"
#include "dac/fusion.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace dac;

namespace {

ScoredSequence seq(std::vector<double> surprisal, std::vector<double> attention) {
    std::vector<std::string> words(surprisal.size(), "t");
    return ScoredSequence(make_tokens(words), std::move(surprisal), std::move(attention));
}

std::vector<std::size_t> ranking(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] > v[b]; });
    return idx;
}

} // namespace

TEST_CASE("additive fusion endpoints and the default alpha") {
    const auto s = seq({2, 4}, {1, 3});
    CHECK(fuse_additive(s, 0.0).values == std::vector<double>{2, 4});
    CHECK(fuse_additive(s, 1.0).values == std::vector<double>{1, 3});

    const auto m = fuse_additive(s, 0.8);
    // 0.2*2 + 0.8*1, 0.2*4 + 0.8*3
    CHECK(m.values[0] == doctest::Approx(1.2));
    CHECK(m.values[1] == doctest::Approx(3.2));
    CHECK(m.fusion_used.mode == FusionMode::additive);
    CHECK(m.fusion_used.alpha == 0.8);
}

TEST_CASE("additive fusion rejects alpha outside [0,1]") {
    const auto s = seq({2, 4}, {1, 3});
    CHECK_THROWS_AS(fuse_additive(s, 1.3), ConfigError);
    CHECK_THROWS_AS(fuse_additive(s, -0.01), ConfigError);
    CHECK_THROWS_AS(fuse_additive(s, std::nan("")), ConfigError);
}

TEST_CASE("multiplicative fusion") {
    CHECK(fuse_multiplicative(seq({2, 4}, {1, 3})).values == std::vector<double>{2, 12});
    CHECK(fuse_multiplicative(seq({2, 4, 7}, {0, 0, 0})).values == std::vector<double>{0, 0, 0});

    const std::vector<double> surprisal{3.0, 0.5, 9.0, 2.0, 7.5};
    const auto m = fuse_multiplicative(seq(surprisal, std::vector<double>(5, 1.7)));
    CHECK(ranking(m.values) == ranking(surprisal));
}

TEST_CASE("minmax normalization") {
    CHECK(minmax_normalize(std::vector<double>{2, 4, 6}) == std::vector<double>{0, 0.5, 1});
    CHECK(minmax_normalize(std::vector<double>{5, 5, 5}) == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(minmax_normalize(std::vector<double>{0, 10}) == std::vector<double>{0, 1});
    CHECK_THROWS_AS(minmax_normalize(std::vector<double>{}), DomainError);
}

TEST_CASE("minmax normalization is idempotent on non-degenerate input") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(10);
        for (auto& x : v) {
            x = u(rng);
        }
        const auto once = minmax_normalize(v);
        const auto twice = minmax_normalize(once);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalized fusion scales both signals first") {
    const auto s = seq({2, 4, 6}, {10, 30, 20});
    const auto m = fuse_additive(s, 0.5, Normalization::minmax);
    // surprisal -> [0, .5, 1], attention -> [0, 1, .5]
    CHECK(m.values[0] == doctest::Approx(0.0));
    CHECK(m.values[1] == doctest::Approx(0.75));
    CHECK(m.values[2] == doctest::Approx(0.75));
    const auto p = fuse_multiplicative(s, Normalization::minmax);
    CHECK(p.values[1] == doctest::Approx(0.5));
    CHECK(p.values[2] == doctest::Approx(0.5));
}

TEST_CASE("ranking reductions at the alpha endpoints") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0, 12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> surprisal(15), attention(15);
        for (auto& x : surprisal) {
            x = u(rng);
        }
        for (auto& x : attention) {
            x = u(rng) / 4.0;
        }
        const auto s = seq(surprisal, attention);
        CHECK(ranking(fuse_additive(s, 0.0).values) == ranking(surprisal));
        CHECK(ranking(fuse_additive(s, 1.0).values) == ranking(attention));
        CHECK(ranking(fuse_additive(s, 0.0, Normalization::minmax).values) == ranking(surprisal));
    }
}

TEST_CASE("additive fusion is monotone in each signal") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 100; ++trial) {
        const double alpha = u(rng) / 10.0;
        const double i0 = u(rng), s0 = u(rng), bump = u(rng);
        const auto base = fuse_additive(seq({i0}, {s0}), alpha).values[0];
        CHECK(fuse_additive(seq({i0 + bump}, {s0}), alpha).values[0] >= base);
        CHECK(fuse_additive(seq({i0}, {s0 + bump}), alpha).values[0] >= base);
    }
}

TEST_CASE("fuse dispatches on the config") {
    const auto s = seq({2, 4}, {1, 3});
    CHECK(fuse(s, FusionConfig{FusionMode::multiplicative, std::nullopt, Normalization::none}).values ==
          std::vector<double>{2, 12});
    CHECK(fuse(s, FusionConfig{}).values[0] == doctest::Approx(1.2));
    CHECK_THROWS_AS(fuse(s, FusionConfig{FusionMode::additive, std::nullopt, Normalization::none}),
                    ConfigError);
}
