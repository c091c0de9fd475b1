#include "dac/fusion.hpp"

#include "dac/error.hpp"

#include <algorithm>
#include <sstream>

namespace dac {

namespace {

std::vector<double> prepared(const std::vector<double>& signal, Normalization normalize) {
    if (normalize == Normalization::minmax && !signal.empty()) {
        return minmax_normalize(signal);
    }
    return signal;
}

} // namespace

std::vector<double> minmax_normalize(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("cannot normalize an empty list");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::vector<double> out(values.size(), 0.5);
    if (range > 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[i] = (values[i] - lo) / range;
        }
    }
    return out;
}

MetricVector fuse_additive(const ScoredSequence& seq, double alpha, Normalization normalize) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        std::ostringstream msg;
        msg << "alpha out of [0,1]: " << alpha;
        throw ConfigError(msg.str());
    }
    const auto surprisal = prepared(seq.surprisal_bits(), normalize);
    const auto attention = prepared(seq.attention_score(), normalize);
    MetricVector out{std::vector<double>(seq.size()),
                     FusionConfig{FusionMode::additive, alpha, normalize}};
    for (std::size_t t = 0; t < seq.size(); ++t) {
        out.values[t] = (1.0 - alpha) * surprisal[t] + alpha * attention[t];
    }
    return out;
}

MetricVector fuse_multiplicative(const ScoredSequence& seq, Normalization normalize) {
    const auto surprisal = prepared(seq.surprisal_bits(), normalize);
    const auto attention = prepared(seq.attention_score(), normalize);
    MetricVector out{std::vector<double>(seq.size()),
                     FusionConfig{FusionMode::multiplicative, std::nullopt, normalize}};
    for (std::size_t t = 0; t < seq.size(); ++t) {
        out.values[t] = surprisal[t] * attention[t];
    }
    return out;
}

MetricVector fuse(const ScoredSequence& seq, const FusionConfig& config) {
    if (config.mode == FusionMode::additive) {
        if (!config.alpha) {
            throw ConfigError("alpha required for additive fusion");
        }
        return fuse_additive(seq, *config.alpha, config.normalize);
    }
    return fuse_multiplicative(seq, config.normalize);
}

} // namespace dac
