#include "dac/attention.hpp"

#include "dac/error.hpp"

#include <cmath>
#include <sstream>

namespace dac {

std::vector<double> accumulate_head_scores(const AttentionMatrix& matrix) {
    if (!matrix.square()) {
        std::ostringstream msg;
        msg << "attention matrix must be square, got " << matrix.rows() << "x" << matrix.cols();
        throw DimensionError(msg.str());
    }
    const std::size_t n = matrix.rows();
    std::vector<double> scores(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const auto row = matrix.row(u);
        double row_sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            row_sum += row[v];
            scores[v] += row[v];
        }
        if (std::abs(row_sum - 1.0) > kStochasticTolerance) {
            std::ostringstream msg;
            msg << "attention row " << u << " sums to " << row_sum << ", expected 1";
            throw StochasticityError(msg.str());
        }
    }
    return scores;
}

std::vector<double> aggregate_attention(const AttentionStack& stack) {
    if (stack.matrix_count() == 0) {
        throw Error("cannot aggregate an empty attention stack");
    }
    std::vector<double> total(stack.n(), 0.0);
    for (const auto& layer : stack.layers()) {
        for (const auto& head : layer) {
            const auto scores = accumulate_head_scores(head);
            for (std::size_t v = 0; v < total.size(); ++v) {
                total[v] += scores[v];
            }
        }
    }
    const double count = static_cast<double>(stack.matrix_count());
    for (auto& s : total) {
        s /= count;
    }
    return total;
}

std::vector<double> synthetic_attention(std::size_t n) {
    std::vector<double> scores(n, 0.0);
    double tail = 0.0;
    for (std::size_t v = n; v-- > 0;) {
        tail += 1.0 / static_cast<double>(v + 1);
        scores[v] = tail;
    }
    return scores;
}

AttentionMatrix causal_uniform_matrix(std::size_t n) {
    std::vector<double> values(n * n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const double w = 1.0 / static_cast<double>(u + 1);
        for (std::size_t v = 0; v <= u; ++v) {
            values[u * n + v] = w;
        }
    }
    return AttentionMatrix(n, std::move(values));
}

} // namespace dac
