#pragma once

#include "dac/compressor.hpp"
#include "dac/scorer.hpp"
#include "dac/types.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace dac {

// Sample Pearson correlation. Throws DimensionError for unequal lengths or
// fewer than two points, UndefinedCorrelationError when either list is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

inline constexpr double kDefaultLargeShiftBits = 1.0;

struct ShiftRecord {
    std::size_t orig_index = 0;
    double surprisal_before = 0.0;
    double surprisal_after = 0.0;
    bool predecessor_dropped = false;

    double delta() const noexcept { return surprisal_after - surprisal_before; }
};

struct ShiftSummary {
    std::size_t tokens = 0;
    // Unset when the correlation is undefined (a constant side that differs
    // from the other). Identical before/after lists report exactly 1.
    std::optional<double> pearson;
    double large_shift_threshold = kDefaultLargeShiftBits;
    std::size_t with_dropped_predecessor = 0;
    std::size_t large_with_dropped_predecessor = 0;
    std::size_t with_kept_predecessor = 0;
    std::size_t large_with_kept_predecessor = 0;

    // Fraction of tokens in each group whose |shift| exceeds the threshold;
    // zero for an empty group.
    double large_fraction_dropped() const noexcept;
    double large_fraction_kept() const noexcept;
};

struct ShiftReport {
    std::vector<ShiftRecord> records;
    ShiftSummary summary;
};

// Re-scores the compressed tokens and compares each survivor's surprisal with
// its value in `original`. A survivor's predecessor counts as dropped when the
// token right before it in the original prompt is absent from `compressed`.
//
// Throws DomainError unless `compressed` is a subsequence of `original`
// (matched by orig_index and surface).
ShiftReport entropy_shift_report(const ScoredSequence& original,
                                 std::span<const TokenUnit> compressed, const Scorer& scorer,
                                 double large_shift_bits = kDefaultLargeShiftBits);

double cross_scorer_similarity(std::span<const TokenUnit> tokens, const Scorer& a, const Scorer& b);

struct StageOverhead {
    std::size_t stage_index = 0;
    std::optional<double> seconds;
    std::size_t length_before = 0;
    std::size_t deleted = 0;
};

struct OverheadReport {
    std::vector<StageOverhead> stages;
    std::optional<double> initial_scoring_seconds;
    std::optional<double> total_seconds;
    std::size_t scorer_calls = 0;
    std::size_t attention_calls = 0;
    std::size_t original_length = 0;
    std::size_t tokens_kept = 0;
    std::size_t tokens_removed = 0;
    double achieved_rate = 0.0;
};

// Without timings, call counts follow the run structure: one attention pass
// plus one refresh per stage after the first.
OverheadReport overhead_report(const CompressionTrace& trace,
                               const std::optional<RunTimings>& timings = std::nullopt);

nlohmann::json to_json(const ShiftReport& report);
nlohmann::json to_json(const OverheadReport& report);
nlohmann::json to_json(const RunTimings& timings);
RunTimings timings_from_json(const nlohmann::json& j);

void write_table(std::ostream& out, const ShiftReport& report);
void write_table(std::ostream& out, const OverheadReport& report);
void write_csv(std::ostream& out, const ShiftReport& report);

} // namespace dac
