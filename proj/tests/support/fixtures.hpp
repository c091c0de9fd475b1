#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dac::testing {

// Seeded synthetic text: a Zipf-distributed vocabulary where every word has a
// handful of favoured successors, so a bigram model finds real structure.
class TextGenerator {
public:
    explicit TextGenerator(std::uint32_t seed, std::size_t vocabulary = 400)
        : rng_(seed), vocab_(vocabulary) {
        std::vector<double> weights(vocabulary);
        for (std::size_t i = 0; i < vocabulary; ++i) {
            weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), 1.1);
        }
        zipf_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
        successors_.resize(vocabulary);
        for (auto& s : successors_) {
            for (int k = 0; k < 4; ++k) {
                s.push_back(zipf_(rng_));
            }
        }
    }

    std::vector<std::string> words(std::size_t count) {
        std::vector<std::string> out;
        out.reserve(count);
        std::size_t prev = zipf_(rng_);
        std::bernoulli_distribution follow(0.6);
        std::uniform_int_distribution<int> pick(0, 3);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t w = follow(rng_) ? successors_[prev][pick(rng_)] : zipf_(rng_);
            out.push_back(word(w));
            prev = w;
        }
        return out;
    }

    std::string text(std::size_t count) {
        std::string out;
        for (const auto& w : words(count)) {
            if (!out.empty()) {
                out += ' ';
            }
            out += w;
        }
        return out;
    }

    static std::string word(std::size_t id) {
        static const char* syllables[] = {"ka", "lo", "mi", "ne", "su", "ta", "ri", "po"};
        std::string w;
        std::size_t x = id + 1;
        while (x > 0) {
            w += syllables[x % 8];
            x /= 8;
        }
        return w;
    }

private:
    std::mt19937 rng_;
    std::size_t vocab_;
    std::discrete_distribution<std::size_t> zipf_;
    std::vector<std::vector<std::size_t>> successors_;
};

} // namespace dac::testing
