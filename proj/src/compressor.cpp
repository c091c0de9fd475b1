#include "dac/compressor.hpp"

#include "dac/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace dac {

int auto_iterations(std::size_t input_length) {
    const auto d = input_length / kTokensPerAutoIteration;
    return static_cast<int>(std::clamp<std::size_t>(d, 1, kMaxAutoIterations));
}

double stage_rate(double target_rate, int iterations, double delta_p, bool clamp) {
    const double rate = std::pow(target_rate, 1.0 / static_cast<double>(iterations)) + delta_p;
    return clamp ? std::min(1.0, rate) : rate;
}

std::size_t retained_count(std::size_t n, double delta_tau) {
    const double exact = delta_tau * static_cast<double>(n);
    const double nearest = std::round(exact);
    const double k = std::abs(exact - nearest) <= 1e-9 ? nearest : std::ceil(exact);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 0.0)), 1, n);
}

double percentile_threshold(std::span<const double> metrics, double delta_tau) {
    if (metrics.empty()) {
        throw DomainError("percentile threshold of an empty metric list");
    }
    if (!(delta_tau > 0.0)) {
        throw DomainError("stage rate must be positive");
    }
    const std::size_t k = retained_count(metrics.size(), delta_tau);
    std::vector<double> sorted(metrics.begin(), metrics.end());
    auto kth = sorted.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(sorted.begin(), kth, sorted.end(), std::greater<>());
    return *kth;
}

SweepOutcome sweep_stage(std::span<const double> metrics, double threshold, bool protect) {
    SweepOutcome out;
    bool previous_deleted = false;
    for (std::size_t j = 0; j < metrics.size(); ++j) {
        if (metrics[j] >= threshold) {
            out.kept.push_back(j);
            previous_deleted = false;
        } else if (protect && previous_deleted) {
            out.kept.push_back(j);
            ++out.protected_count;
            previous_deleted = false;
        } else {
            out.deleted.push_back(j);
            previous_deleted = true;
        }
    }
    return out;
}

EffectiveSettings resolve_settings(const CompressionConfig& config, std::size_t prompt_length) {
    EffectiveSettings s;
    s.iterations = config.dynamic_off ? 1 : config.iterations.value_or(auto_iterations(prompt_length));
    s.fusion = config.fusion;
    if (config.attention_off) {
        s.fusion.mode = FusionMode::additive;
        s.fusion.alpha = 0.0;
    }
    return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

CompressionTrace snapshot(const std::vector<StageReport>& stages,
                          const std::vector<std::size_t>& alive, std::size_t length) {
    CompressionTrace trace;
    trace.stages = stages;
    trace.kept_indices = alive;
    std::vector<bool> is_kept(length, false);
    for (auto i : alive) {
        is_kept[i] = true;
    }
    for (std::size_t i = 0; i < length; ++i) {
        if (!is_kept[i]) {
            trace.dropped_indices.push_back(i);
        }
    }
    trace.achieved_rate = static_cast<double>(alive.size()) / static_cast<double>(length);
    return trace;
}

} // namespace

CompressionResult compress(std::span<const TokenUnit> prompt, const Scorer& scorer,
                           const CompressionConfig& config) {
    if (const auto check = validate_config(config); !check) {
        std::string msg = "invalid compression config:";
        for (const auto& v : check.violations) {
            msg += " " + v + ";";
        }
        throw ConfigError(msg);
    }
    if (prompt.empty()) {
        throw DomainError("cannot compress an empty prompt");
    }

    const std::size_t length = prompt.size();
    const auto settings = resolve_settings(config, length);

    std::vector<TokenUnit> tokens(prompt.begin(), prompt.end());
    for (std::size_t i = 0; i < length; ++i) {
        tokens[i].orig_index = i;
    }

    CompressionResult result;
    std::vector<StageReport> stages;
    std::vector<std::size_t> alive(length);
    for (std::size_t i = 0; i < length; ++i) {
        alive[i] = i;
    }

    auto abort_run = [&](const std::exception& e) -> CompressionAborted {
        std::ostringstream msg;
        msg << "compression aborted after " << stages.size() << " of " << settings.iterations
            << " stages: " << e.what();
        return CompressionAborted(msg.str(), snapshot(stages, alive, length));
    };

    std::vector<double> attention;
    std::vector<double> surprisal;
    auto start = Clock::now();
    try {
        auto initial = scorer.score_with_attention(tokens);
        check_scores(initial.surprisal_bits, length, "surprisal");
        check_scores(initial.attention_score, length, "attention");
        surprisal = std::move(initial.surprisal_bits);
        attention = std::move(initial.attention_score);
    } catch (const std::exception& e) {
        throw abort_run(e);
    }
    ++result.timings.scorer_calls;
    ++result.timings.attention_calls;
    result.timings.initial_scoring_seconds = seconds_since(start);

    double delta_p = 0.0;
    for (int stage = 1; stage <= settings.iterations; ++stage) {
        start = Clock::now();
        const double delta_tau =
            stage_rate(config.target_rate, settings.iterations, delta_p, config.clamp_stage_rate);

        std::vector<TokenUnit> current;
        std::vector<double> current_attention;
        current.reserve(alive.size());
        current_attention.reserve(alive.size());
        for (auto idx : alive) {
            current.push_back(tokens[idx]);
            current_attention.push_back(attention[idx]);
        }

        if (stage > 1) {
            try {
                auto refreshed = scorer.score(current);
                check_scores(refreshed, current.size(), "surprisal");
                surprisal = std::move(refreshed);
            } catch (const std::exception& e) {
                throw abort_run(e);
            }
            ++result.timings.scorer_calls;
        }

        const ScoredSequence seq(std::move(current), surprisal, std::move(current_attention));
        const auto metrics = fuse(seq, settings.fusion);
        const double threshold = percentile_threshold(metrics.values, delta_tau);
        const auto outcome = sweep_stage(metrics.values, threshold, config.protect_consecutive);

        StageReport report;
        report.stage_index = static_cast<std::size_t>(stage);
        report.delta_tau = delta_tau;
        report.threshold = threshold;
        report.deleted = outcome.deleted.size();
        report.protected_count = outcome.protected_count;
        report.length_before = alive.size();
        report.length_after = outcome.kept.size();
        stages.push_back(report);

        const double denominator = config.delta_p_denominator == DeltaPDenominator::original
                                       ? static_cast<double>(length)
                                       : static_cast<double>(report.length_before);
        delta_p = static_cast<double>(outcome.protected_count) / denominator;

        std::vector<std::size_t> next;
        next.reserve(outcome.kept.size());
        for (auto pos : outcome.kept) {
            next.push_back(alive[pos]);
        }
        alive = std::move(next);
        result.timings.stage_seconds.push_back(seconds_since(start));
    }

    result.trace = snapshot(stages, alive, length);
    result.tokens.reserve(alive.size());
    for (auto idx : alive) {
        result.tokens.push_back(tokens[idx]);
    }
    return result;
}

} // namespace dac
