#pragma once

#include "dac/error.hpp"
#include "dac/scorer.hpp"
#include "dac/types.hpp"

#include <span>
#include <vector>

namespace dac {

inline constexpr int kMaxAutoIterations = 15;
inline constexpr std::size_t kTokensPerAutoIteration = 100;

// floor(length / 100) clamped to [1, 15].
int auto_iterations(std::size_t input_length);

// Retention fraction for one stage: target_rate^(1/iterations) + delta_p,
// capped at 1 when `clamp` is set.
double stage_rate(double target_rate, int iterations, double delta_p, bool clamp = true);

// Number of tokens the threshold must admit: ceil(delta_tau * n), within [1, n].
// Products that land within 1e-9 of an integer are treated as that integer.
std::size_t retained_count(std::size_t n, double delta_tau);

// The k-th largest metric with k = retained_count(n, delta_tau). At least k
// values satisfy metric >= threshold; ties at the threshold all pass.
// Throws DomainError on empty input or delta_tau <= 0.
double percentile_threshold(std::span<const double> metrics, double delta_tau);

struct SweepOutcome {
    std::vector<std::size_t> kept;     // positions in the current-stage sequence
    std::vector<std::size_t> deleted;
    std::size_t protected_count = 0;   // kept only because the predecessor was deleted
};

// Left-to-right pass: a token at or above the threshold is kept. Below it, the
// token is spared when protection is on and its immediate predecessor was
// deleted earlier in this same pass; otherwise it is deleted. Position 0 has no
// predecessor and is never spared.
SweepOutcome sweep_stage(std::span<const double> metrics, double threshold, bool protect);

// Settings after ablation flags and auto iteration are applied.
struct EffectiveSettings {
    int iterations = 1;
    FusionConfig fusion;
};

EffectiveSettings resolve_settings(const CompressionConfig& config, std::size_t prompt_length);

struct RunTimings {
    double initial_scoring_seconds = 0.0;  // the attention-carrying pass
    std::vector<double> stage_seconds;     // includes each stage's refresh call
    std::size_t scorer_calls = 0;
    std::size_t attention_calls = 0;
};

struct CompressionResult {
    std::vector<TokenUnit> tokens;  // survivors in original order
    CompressionTrace trace;
    RunTimings timings;
};

// A scorer failed partway through a run. Carries the trace up to the last
// completed stage; kept_indices are the survivors at that point.
class CompressionAborted : public ScorerError {
public:
    CompressionAborted(const std::string& what, CompressionTrace partial)
        : ScorerError(what), partial_(std::move(partial)) {}

    const CompressionTrace& partial_trace() const noexcept { return partial_; }

private:
    CompressionTrace partial_;
};

// Multi-stage attention-aware compression of `prompt`.
//
// One score_with_attention call on the whole prompt fixes the attention score
// of every token (by original position) and supplies stage-1 surprisal. Each
// later stage re-scores the surviving sequence with score(). Per stage: rate,
// fused metric, percentile threshold, protected sweep, compaction, and
// delta_p = spared / denominator for the next stage.
//
// Output tokens carry orig_index = their position in `prompt`.
// Throws ConfigError for an invalid config, DomainError for an empty prompt and
// CompressionAborted when the scorer fails.
CompressionResult compress(std::span<const TokenUnit> prompt, const Scorer& scorer,
                           const CompressionConfig& config);

} // namespace dac
