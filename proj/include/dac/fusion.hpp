#pragma once

#include "dac/types.hpp"

#include <span>
#include <vector>

namespace dac {

// Per-token compression metric aligned with the ScoredSequence it came from.
struct MetricVector {
    std::vector<double> values;
    FusionConfig fusion_used;

    std::size_t size() const noexcept { return values.size(); }
};

// (1 - alpha) * surprisal + alpha * attention, on raw or min-max scaled signals.
// Throws ConfigError when alpha is outside [0, 1].
MetricVector fuse_additive(const ScoredSequence& seq, double alpha,
                           Normalization normalize = Normalization::none);

// surprisal * attention. Normalization, when requested, is applied to both
// signals before the product.
MetricVector fuse_multiplicative(const ScoredSequence& seq,
                                 Normalization normalize = Normalization::none);

// Dispatches on config.mode.
MetricVector fuse(const ScoredSequence& seq, const FusionConfig& config);

// Affine map onto [0, 1]; a constant input maps to 0.5 everywhere.
// Throws DomainError on empty input.
std::vector<double> minmax_normalize(std::span<const double> values);

} // namespace dac
