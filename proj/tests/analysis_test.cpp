#include "dac/analysis.hpp"
#include "dac/bigram_scorer.hpp"
#include "dac/error.hpp"
#include "dac/scripted_scorer.hpp"

#include "support/fixtures.hpp"
#include "support/hash_scorer.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace dac;

namespace {

ScoredSequence scored(const std::vector<TokenUnit>& tokens, const Scorer& scorer) {
    auto s = scorer.score_with_attention(tokens);
    return ScoredSequence(tokens, std::move(s.surprisal_bits), std::move(s.attention_score));
}

} // namespace

TEST_CASE("pearson fixtures") {
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
    // cov = 4/4... by hand: dx = [-1.5,-.5,.5,1.5], dy = [-1.5,.5,-.5,1.5]
    // sxy = 2.25 - .25 - .25 + 2.25 = 4, sxx = syy = 5 -> 0.8
    CHECK(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) == doctest::Approx(0.8));
}

TEST_CASE("pearson errors") {
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    UndefinedCorrelationError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), DimensionError);
}

TEST_CASE("pearson symmetry and affine invariance") {
    std::mt19937 rng(1);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> coef(-5, 5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(20), y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            x[i] = g(rng);
            y[i] = 0.5 * x[i] + g(rng);
        }
        const double r = pearson(x, y);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        CHECK(pearson(y, x) == doctest::Approx(r).epsilon(1e-12));
        double a = coef(rng);
        if (std::abs(a) < 1e-3) {
            a = 1.0;
        }
        const double b = coef(rng);
        std::vector<double> ax(20);
        for (std::size_t i = 0; i < 20; ++i) {
            ax[i] = a * x[i] + b;
        }
        CHECK(pearson(ax, y) == doctest::Approx((a > 0 ? 1.0 : -1.0) * r).epsilon(1e-9));
    }
}

TEST_CASE("identity compression shows no shift") {
    testing::HashScorer scorer(4);
    const auto tokens = testing::numbered_tokens(50);
    const auto original = scored(tokens, scorer);
    const auto report = entropy_shift_report(original, tokens, scorer);
    REQUIRE(report.records.size() == 50);
    for (const auto& r : report.records) {
        CHECK(r.delta() == 0.0);
        CHECK_FALSE(r.predecessor_dropped);
    }
    CHECK(report.summary.pearson == 1.0);
    CHECK(report.summary.large_with_dropped_predecessor == 0);
    CHECK(report.summary.large_with_kept_predecessor == 0);
}

TEST_CASE("dropping a predecessor shows up as a flagged shift") {
    ScriptedScorer scorer;
    scorer.add({"a", "b", "c", "d"}, {3, 2, 1, 4}, std::vector<double>{1, 1, 1, 1});
    scorer.add({"a", "c", "d"}, {3, 2, 4});
    const auto tokens = make_tokens(std::vector<std::string>{"a", "b", "c", "d"});
    const auto original = scored(tokens, scorer);
    const std::vector<TokenUnit> kept{tokens[0], tokens[2], tokens[3]};
    const auto report = entropy_shift_report(original, kept, scorer);
    REQUIRE(report.records.size() == 3);
    const auto& c = report.records[1];
    CHECK(c.orig_index == 2);
    CHECK(c.surprisal_before == 1.0);
    CHECK(c.surprisal_after == 2.0);
    CHECK(c.delta() == 1.0);
    CHECK(c.predecessor_dropped);
    CHECK_FALSE(report.records[0].predecessor_dropped);
    CHECK_FALSE(report.records[2].predecessor_dropped);
    // exactly 1 bit is not above the default 1-bit cutoff
    CHECK(report.summary.large_with_dropped_predecessor == 0);
    const auto strict = entropy_shift_report(original, kept, scorer, 0.5);
    CHECK(strict.summary.large_with_dropped_predecessor == 1);
    CHECK(strict.summary.large_fraction_dropped() == 1.0);
    CHECK(strict.summary.large_fraction_kept() == 0.0);
}

TEST_CASE("first surviving token after a dropped prefix counts as shifted context") {
    ScriptedScorer scorer;
    scorer.add({"a", "b"}, {1, 1}, std::vector<double>{1, 1});
    scorer.add({"b"}, {5});
    const auto tokens = make_tokens(std::vector<std::string>{"a", "b"});
    const auto report = entropy_shift_report(scored(tokens, scorer), std::vector<TokenUnit>{tokens[1]}, scorer);
    CHECK(report.records[0].predecessor_dropped);
    CHECK_FALSE(report.summary.pearson.has_value()); // a single point has no correlation
}

TEST_CASE("shift report rejects non-subsequences") {
    testing::HashScorer scorer(2);
    const auto tokens = testing::numbered_tokens(5);
    const auto original = scored(tokens, scorer);
    CHECK_THROWS_AS(entropy_shift_report(original, std::vector<TokenUnit>{tokens[3], tokens[1]}, scorer),
                    DomainError);
    auto foreign = tokens[2];
    foreign.surface = "zzz";
    CHECK_THROWS_AS(entropy_shift_report(original, std::vector<TokenUnit>{foreign}, scorer), DomainError);
    auto missing = tokens[2];
    missing.orig_index = 99;
    CHECK_THROWS_AS(entropy_shift_report(original, std::vector<TokenUnit>{missing}, scorer), DomainError);
}

TEST_CASE("shift correlation falls as compression gets more aggressive") {
    testing::TextGenerator gen(2024);
    const BigramScorer scorer(BigramModel({gen.text(30000)}));
    const auto tokens = scorer.tokenize(gen.text(2000));
    const auto original = scored(tokens, scorer);
    double previous = 1.0;
    for (double tau : {0.9, 0.7, 0.5, 0.3}) {
        CompressionConfig c;
        c.target_rate = tau;
        const auto r = compress(tokens, scorer, c);
        const auto report = entropy_shift_report(original, r.tokens, scorer);
        REQUIRE(report.summary.pearson.has_value());
        MESSAGE("tau " << tau << " pearson " << *report.summary.pearson);
        CHECK(*report.summary.pearson <= previous);
        previous = *report.summary.pearson;
        // Bigram surprisal only moves when the left neighbour changes.
        CHECK(report.summary.large_with_kept_predecessor == 0);
    }
}

TEST_CASE("cross-scorer similarity") {
    testing::TextGenerator gen(6);
    const BigramScorer a(BigramModel({gen.text(5000)}));
    const auto tokens = a.tokenize(gen.text(300));
    CHECK(cross_scorer_similarity(tokens, a, a) == doctest::Approx(1.0));

    ScriptedScorer s1, s2;
    const auto four = testing::numbered_tokens(4);
    s1.add(surfaces_of(four), {1, 2, 3, 4});
    s2.add(surfaces_of(four), {1, 3, 2, 4});
    CHECK(cross_scorer_similarity(four, s1, s2) == doctest::Approx(0.8));

    testing::TextGenerator other(600);
    const BigramScorer b(BigramModel({other.text(5000)}));
    const double r = cross_scorer_similarity(tokens, a, b);
    CHECK(std::isfinite(r));
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
}

TEST_CASE("overhead report accounts scorer calls and rate") {
    testing::HashScorer scorer(8);
    const auto tokens = testing::numbered_tokens(600);
    for (int d : {1, 5}) {
        CompressionConfig c;
        c.target_rate = 0.5;
        c.iterations = d;
        const auto run = compress(tokens, scorer, c);
        const auto with_timings = overhead_report(run.trace, run.timings);
        CHECK(with_timings.stages.size() == static_cast<std::size_t>(d));
        CHECK(with_timings.scorer_calls == static_cast<std::size_t>(d));
        CHECK(with_timings.attention_calls == 1);
        CHECK(with_timings.total_seconds.has_value());
        CHECK(with_timings.stages.back().seconds.has_value());
        CHECK(with_timings.achieved_rate == doctest::Approx(
                                                static_cast<double>(run.trace.kept_indices.size()) / 600.0));
        CHECK(with_timings.achieved_rate == run.trace.achieved_rate);
        CHECK(with_timings.tokens_removed == 600 - run.tokens.size());

        const auto structural = overhead_report(run.trace);
        CHECK(structural.scorer_calls == static_cast<std::size_t>(d));
        CHECK(structural.attention_calls == 1);
        CHECK_FALSE(structural.total_seconds.has_value());
    }
}

TEST_CASE("report serializations") {
    ScriptedScorer scorer;
    scorer.add({"a", "b", "c"}, {3, 2, 1}, std::vector<double>{1, 1, 1});
    scorer.add({"a", "c"}, {3, 4});
    const auto tokens = make_tokens(std::vector<std::string>{"a", "b", "c"});
    const auto report = entropy_shift_report(scored(tokens, scorer), std::vector<TokenUnit>{tokens[0], tokens[2]}, scorer);
    const auto j = to_json(report);
    CHECK(j.at("records").size() == 2);
    CHECK(j.at("records")[1].at("delta") == 3.0);
    CHECK(j.at("summary").at("large_with_dropped_predecessor") == 1);

    std::ostringstream csv;
    write_csv(csv, report);
    CHECK(csv.str() == "orig_index,surprisal_before,surprisal_after,delta,predecessor_dropped\n"
                       "0,3,3,0,0\n2,1,4,3,1\n");

    std::ostringstream table;
    write_table(table, report);
    CHECK(table.str().find("pearson(before, after): -1.0000") != std::string::npos);

    RunTimings t{0.5, {0.1, 0.2}, 2, 1};
    const auto back = timings_from_json(to_json(t));
    CHECK(back.stage_seconds == t.stage_seconds);
    CHECK(back.scorer_calls == 2);
    CHECK_THROWS_AS(timings_from_json(nlohmann::json::object()), Error);

    CompressionTrace trace;
    trace.stages.push_back(StageReport{1, 0.5, 1.0, 1, 0, 2, 1});
    trace.kept_indices = {0};
    trace.dropped_indices = {1};
    trace.achieved_rate = 0.5;
    std::ostringstream overhead;
    write_table(overhead, overhead_report(trace, t));
    CHECK(overhead.str().find("scorer calls: 2 (1 with attention)") != std::string::npos);
    CHECK(to_json(overhead_report(trace)).at("total_seconds").is_null());
}
