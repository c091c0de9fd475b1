#pragma once

#include "dac/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dac {

// Lowest probability a backend may feed into the log; keeps surprisal finite.
inline constexpr double kProbabilityFloor = 0x1p-30;

struct ScoredSignals {
    std::vector<double> surprisal_bits;
    std::vector<double> attention_score;
};

// Scoring capability the compressor runs against. score() provides per-token
// surprisal in bits; score_with_attention() adds the accumulated attention
// score. Both must return exactly one value per input token.
//
// Implementations are shareable across threads once constructed.
class Scorer {
public:
    virtual ~Scorer() = default;

    virtual std::vector<TokenUnit> tokenize(std::string_view text) const = 0;
    virtual std::string detokenize(std::span<const TokenUnit> tokens) const = 0;

    virtual std::vector<double> score(std::span<const TokenUnit> tokens) const = 0;
    virtual ScoredSignals score_with_attention(std::span<const TokenUnit> tokens) const = 0;
};

// -log2(p). Throws DomainError unless 0 < p <= 1.
double surprisal_from_probability(double p);

// Whitespace tokenization with punctuation left attached; the reference
// behaviour shared by the bundled backends.
std::vector<TokenUnit> whitespace_tokenize(std::string_view text);
std::string space_join(std::span<const TokenUnit> tokens);

// Throws ProtocolError unless `values` has `expected` finite, non-negative entries.
void check_scores(std::span<const double> values, std::size_t expected, std::string_view what);

} // namespace dac
