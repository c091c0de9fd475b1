#pragma once

#include "dac/scorer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace dac {

// Add-one smoothed bigram language model over whitespace tokens.
//
// Vocabulary is every corpus word plus an unknown-word symbol (id 0). The first
// token of a sequence is scored against the smoothed unigram distribution,
// later tokens against P(w | previous word). A word's context count is the
// number of times it occurs as the left side of a bigram, so every
// conditional distribution sums to 1 over the vocabulary.
class BigramModel {
public:
    static constexpr std::int64_t kUnknownId = 0;
    static constexpr const char* kUnknownSymbol = "<unk>";

    // Each document is tokenized separately; no bigram spans two documents.
    // Throws DomainError if the documents contain no tokens.
    explicit BigramModel(const std::vector<std::string>& documents);

    static BigramModel from_files(const std::vector<std::filesystem::path>& paths);

    std::size_t vocabulary_size() const noexcept { return words_.size(); }
    std::int64_t id_of(const std::string& word) const;
    const std::string& word_of(std::int64_t id) const { return words_.at(static_cast<std::size_t>(id)); }

    double unigram_probability(std::int64_t word) const;
    double conditional_probability(std::int64_t context, std::int64_t word) const;

    std::uint64_t context_count(std::int64_t context) const;
    std::uint64_t bigram_count(std::int64_t context, std::int64_t word) const;

private:
    static std::uint64_t key(std::int64_t a, std::int64_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    }

    std::vector<std::string> words_;
    std::unordered_map<std::string, std::int64_t> ids_;
    std::vector<std::uint64_t> unigram_counts_;
    std::vector<std::uint64_t> context_counts_;
    std::unordered_map<std::uint64_t, std::uint64_t> bigram_counts_;
    std::uint64_t total_tokens_ = 0;
};

// Reference scorer: bigram surprisal plus causal-uniform synthetic attention.
class BigramScorer final : public Scorer {
public:
    explicit BigramScorer(BigramModel model) : model_(std::move(model)) {}

    const BigramModel& model() const noexcept { return model_; }

    std::vector<TokenUnit> tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const TokenUnit> tokens) const override;
    std::vector<double> score(std::span<const TokenUnit> tokens) const override;
    ScoredSignals score_with_attention(std::span<const TokenUnit> tokens) const override;

private:
    BigramModel model_;
};

// Surprisal of each token under the model, in bits.
std::vector<double> bigram_score(const BigramModel& model, std::span<const TokenUnit> tokens);

} // namespace dac
