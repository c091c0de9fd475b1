#pragma once

#include "dac/types.hpp"

#include <vector>

namespace dac {

// Row-sum tolerance used when accepting a matrix as row-stochastic.
inline constexpr double kStochasticTolerance = 1e-3;

// Column sums of one normalized attention matrix: how much attention mass
// every query position sends to key position v. Masked (causal) entries are
// plain zeros and contribute nothing.
//
// Throws DimensionError for a non-square matrix and StochasticityError when a
// row sums further than kStochasticTolerance from 1.
std::vector<double> accumulate_head_scores(const AttentionMatrix& matrix);

// Mean of the per-head column sums over every layer and head. The reduction
// runs in layer-major, head-minor order so results are bit-stable.
//
// Throws Error for an empty stack.
std::vector<double> aggregate_attention(const AttentionStack& stack);

// Column sums of the causal matrix where row u (1-based) spreads 1/u over the
// keys 1..u. Element v is the harmonic tail sum over u = v..n of 1/u.
std::vector<double> synthetic_attention(std::size_t n);

// The matrix synthetic_attention summarizes, materialized.
AttentionMatrix causal_uniform_matrix(std::size_t n);

} // namespace dac
