#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dac {

struct TokenUnit {
    std::string surface;
    std::optional<std::int64_t> vocab_id;
    std::size_t orig_index = 0;

    friend bool operator==(const TokenUnit&, const TokenUnit&) = default;
};

// Builds TokenUnits with orig_index 0..n-1 from bare surfaces.
std::vector<TokenUnit> make_tokens(std::span<const std::string> surfaces);
std::vector<std::string> surfaces_of(std::span<const TokenUnit> tokens);

// Tokens aligned with their surprisal (bits) and accumulated attention.
// Construction enforces alignment, non-negativity, finiteness and strictly
// increasing orig_index; an instance is immutable afterwards.
class ScoredSequence {
public:
    ScoredSequence(std::vector<TokenUnit> tokens,
                   std::vector<double> surprisal_bits,
                   std::vector<double> attention_score);

    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }

    const std::vector<TokenUnit>& tokens() const noexcept { return tokens_; }
    const std::vector<double>& surprisal_bits() const noexcept { return surprisal_bits_; }
    const std::vector<double>& attention_score() const noexcept { return attention_score_; }

private:
    std::vector<TokenUnit> tokens_;
    std::vector<double> surprisal_bits_;
    std::vector<double> attention_score_;
};

// One n x n attention matrix, row-major. Row u holds how query u distributes
// its attention over keys v.
class AttentionMatrix {
public:
    AttentionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    // Square convenience constructor.
    AttentionMatrix(std::size_t n, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double operator()(std::size_t u, std::size_t v) const { return values_[u * cols_ + v]; }
    std::span<const double> row(std::size_t u) const {
        return {values_.data() + u * cols_, cols_};
    }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

// layers x heads matrices of a common size n.
class AttentionStack {
public:
    AttentionStack() = default;
    // layers[i][j] is head j of layer i. All matrices must be n x n with the
    // same n and every layer must have the same head count.
    explicit AttentionStack(std::vector<std::vector<AttentionMatrix>> layers);

    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t head_count() const noexcept { return layers_.empty() ? 0 : layers_.front().size(); }
    std::size_t matrix_count() const noexcept { return layer_count() * head_count(); }
    std::size_t n() const noexcept { return n_; }

    const AttentionMatrix& at(std::size_t layer, std::size_t head) const {
        return layers_.at(layer).at(head);
    }
    const std::vector<std::vector<AttentionMatrix>>& layers() const noexcept { return layers_; }

private:
    std::vector<std::vector<AttentionMatrix>> layers_;
    std::size_t n_ = 0;
};

enum class FusionMode { additive, multiplicative };
enum class Normalization { none, minmax };
enum class DeltaPDenominator { original, current };

struct FusionConfig {
    FusionMode mode = FusionMode::additive;
    std::optional<double> alpha = 0.8; // additive only
    Normalization normalize = Normalization::none;

    friend bool operator==(const FusionConfig&, const FusionConfig&) = default;
};

struct CompressionConfig {
    double target_rate = 0.5;          // fraction of tokens retained
    std::optional<int> iterations;     // nullopt means auto
    FusionConfig fusion;
    bool protect_consecutive = true;
    bool clamp_stage_rate = true;
    bool attention_off = false;        // ablation: surprisal only
    bool dynamic_off = false;          // ablation: single stage
    DeltaPDenominator delta_p_denominator = DeltaPDenominator::original;
};

struct ValidationResult {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return ok(); }
};

ValidationResult validate_config(const CompressionConfig& config);

struct StageReport {
    std::size_t stage_index = 0;   // 1-based
    double delta_tau = 0.0;
    double threshold = 0.0;
    std::size_t deleted = 0;
    std::size_t protected_count = 0;
    std::size_t length_before = 0;
    std::size_t length_after = 0;

    friend bool operator==(const StageReport&, const StageReport&) = default;
};

struct CompressionTrace {
    std::vector<StageReport> stages;
    std::vector<std::size_t> kept_indices;
    std::vector<std::size_t> dropped_indices;
    double achieved_rate = 0.0;

    friend bool operator==(const CompressionTrace&, const CompressionTrace&) = default;
};

// Checks that kept/dropped partition {0..original_length-1}, kept is strictly
// increasing, and each stage's length bookkeeping is consistent.
ValidationResult validate_trace(const CompressionTrace& trace, std::size_t original_length);

const char* to_string(FusionMode mode);
const char* to_string(Normalization normalize);
const char* to_string(DeltaPDenominator denominator);

} // namespace dac
