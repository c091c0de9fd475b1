#include "dac/types.hpp"

#include "dac/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dac {

std::vector<TokenUnit> make_tokens(std::span<const std::string> surfaces) {
    std::vector<TokenUnit> tokens;
    tokens.reserve(surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        tokens.push_back(TokenUnit{surfaces[i], std::nullopt, i});
    }
    return tokens;
}

std::vector<std::string> surfaces_of(std::span<const TokenUnit> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        out.push_back(t.surface);
    }
    return out;
}

ScoredSequence::ScoredSequence(std::vector<TokenUnit> tokens,
                               std::vector<double> surprisal_bits,
                               std::vector<double> attention_score)
    : tokens_(std::move(tokens)),
      surprisal_bits_(std::move(surprisal_bits)),
      attention_score_(std::move(attention_score)) {
    if (surprisal_bits_.size() != tokens_.size() || attention_score_.size() != tokens_.size()) {
        std::ostringstream msg;
        msg << "scored sequence misaligned: " << tokens_.size() << " tokens, "
            << surprisal_bits_.size() << " surprisal values, " << attention_score_.size()
            << " attention values";
        throw DimensionError(msg.str());
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (tokens_[i].surface.empty()) {
            throw DomainError("token " + std::to_string(i) + " has an empty surface");
        }
        if (i > 0 && tokens_[i].orig_index <= tokens_[i - 1].orig_index) {
            throw DomainError("orig_index not strictly increasing at position " + std::to_string(i));
        }
        if (!std::isfinite(surprisal_bits_[i]) || surprisal_bits_[i] < 0.0) {
            throw DomainError("surprisal at position " + std::to_string(i) +
                              " must be finite and non-negative");
        }
        if (!std::isfinite(attention_score_[i]) || attention_score_[i] < 0.0) {
            throw DomainError("attention score at position " + std::to_string(i) +
                              " must be finite and non-negative");
        }
    }
}

AttentionMatrix::AttentionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw DimensionError("attention matrix holds " + std::to_string(values_.size()) +
                             " values, expected " + std::to_string(rows_ * cols_));
    }
}

AttentionMatrix::AttentionMatrix(std::size_t n, std::vector<double> values)
    : AttentionMatrix(n, n, std::move(values)) {}

AttentionStack::AttentionStack(std::vector<std::vector<AttentionMatrix>> layers)
    : layers_(std::move(layers)) {
    if (layers_.empty()) {
        return;
    }
    const std::size_t heads = layers_.front().size();
    bool first = true;
    for (const auto& layer : layers_) {
        if (layer.size() != heads) {
            throw DimensionError("attention stack layers have differing head counts");
        }
        for (const auto& m : layer) {
            if (!m.square()) {
                throw DimensionError("attention matrix is not square");
            }
            if (first) {
                n_ = m.rows();
                first = false;
            } else if (m.rows() != n_) {
                throw DimensionError("attention stack mixes sequence lengths " +
                                     std::to_string(n_) + " and " + std::to_string(m.rows()));
            }
        }
    }
}

ValidationResult validate_config(const CompressionConfig& config) {
    ValidationResult result;
    auto& v = result.violations;
    if (!(config.target_rate > 0.0 && config.target_rate < 1.0)) {
        v.emplace_back("target_rate out of (0,1)");
    }
    if (config.iterations && *config.iterations < 1) {
        v.emplace_back("iterations must be >= 1");
    }
    const auto& fusion = config.fusion;
    if (fusion.mode == FusionMode::additive) {
        if (!fusion.alpha) {
            v.emplace_back("alpha required for additive fusion");
        } else if (!(*fusion.alpha >= 0.0 && *fusion.alpha <= 1.0)) {
            v.emplace_back("alpha out of [0,1]");
        }
    } else if (fusion.alpha) {
        v.emplace_back("alpha only applies to additive fusion");
    }
    return result;
}

ValidationResult validate_trace(const CompressionTrace& trace, std::size_t original_length) {
    ValidationResult result;
    auto& v = result.violations;
    for (std::size_t i = 1; i < trace.kept_indices.size(); ++i) {
        if (trace.kept_indices[i] <= trace.kept_indices[i - 1]) {
            v.emplace_back("kept_indices not strictly increasing");
            break;
        }
    }
    std::vector<int> seen(original_length, 0);
    auto mark = [&](const std::vector<std::size_t>& indices) {
        for (auto idx : indices) {
            if (idx >= original_length) {
                v.emplace_back("index " + std::to_string(idx) + " outside the prompt");
                continue;
            }
            ++seen[idx];
        }
    };
    mark(trace.kept_indices);
    mark(trace.dropped_indices);
    for (std::size_t i = 0; i < original_length; ++i) {
        if (seen[i] != 1) {
            v.emplace_back("index " + std::to_string(i) + " appears " + std::to_string(seen[i]) +
                           " times across kept/dropped");
            break;
        }
    }
    for (const auto& stage : trace.stages) {
        if (stage.length_after + stage.deleted != stage.length_before) {
            v.emplace_back("stage " + std::to_string(stage.stage_index) +
                           " length bookkeeping inconsistent");
        }
    }
    return result;
}

const char* to_string(FusionMode mode) {
    return mode == FusionMode::additive ? "additive" : "multiplicative";
}

const char* to_string(Normalization normalize) {
    return normalize == Normalization::none ? "none" : "minmax";
}

const char* to_string(DeltaPDenominator denominator) {
    return denominator == DeltaPDenominator::original ? "original" : "current";
}

} // namespace dac
