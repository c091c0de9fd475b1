#include "dac/scorer.hpp"

#include "dac/error.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace dac {

double surprisal_from_probability(double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "probability out of (0,1]: " << p;
        throw DomainError(msg.str());
    }
    // -log2(1) is -0.0; normalize the sign.
    return p == 1.0 ? 0.0 : -std::log2(p);
}

std::vector<TokenUnit> whitespace_tokenize(std::string_view text) {
    std::vector<TokenUnit> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i > start) {
            tokens.push_back(TokenUnit{std::string(text.substr(start, i - start)), std::nullopt,
                                       tokens.size()});
        }
    }
    return tokens;
}

std::string space_join(std::span<const TokenUnit> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += tokens[i].surface;
    }
    return out;
}

void check_scores(std::span<const double> values, std::size_t expected, std::string_view what) {
    if (values.size() != expected) {
        std::ostringstream msg;
        msg << what << ": got " << values.size() << " values for " << expected << " tokens";
        throw ProtocolError(msg.str());
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            std::ostringstream msg;
            msg << what << ": value " << values[i] << " at position " << i
                << " is not finite and non-negative";
            throw ProtocolError(msg.str());
        }
    }
}

} // namespace dac
