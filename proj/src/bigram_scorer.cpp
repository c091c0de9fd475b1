#include "dac/bigram_scorer.hpp"

#include "dac/attention.hpp"
#include "dac/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dac {

BigramModel::BigramModel(const std::vector<std::string>& documents) {
    words_.emplace_back(kUnknownSymbol);
    ids_.emplace(kUnknownSymbol, kUnknownId);
    unigram_counts_.push_back(0);
    context_counts_.push_back(0);

    for (const auto& doc : documents) {
        const auto tokens = whitespace_tokenize(doc);
        std::int64_t prev = -1;
        for (const auto& tok : tokens) {
            auto [it, inserted] = ids_.try_emplace(tok.surface, static_cast<std::int64_t>(words_.size()));
            if (inserted) {
                words_.push_back(tok.surface);
                unigram_counts_.push_back(0);
                context_counts_.push_back(0);
            }
            const std::int64_t id = it->second;
            ++unigram_counts_[static_cast<std::size_t>(id)];
            ++total_tokens_;
            if (prev >= 0) {
                ++context_counts_[static_cast<std::size_t>(prev)];
                ++bigram_counts_[key(prev, id)];
            }
            prev = id;
        }
    }
    if (total_tokens_ == 0) {
        throw DomainError("bigram corpus contains no tokens");
    }
}

BigramModel BigramModel::from_files(const std::vector<std::filesystem::path>& paths) {
    std::vector<std::string> documents;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error("cannot read corpus file " + path.string());
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        documents.push_back(buffer.str());
    }
    return BigramModel(documents);
}

std::int64_t BigramModel::id_of(const std::string& word) const {
    const auto it = ids_.find(word);
    return it == ids_.end() ? kUnknownId : it->second;
}

double BigramModel::unigram_probability(std::int64_t word) const {
    const auto count = unigram_counts_.at(static_cast<std::size_t>(word));
    return static_cast<double>(count + 1) /
           static_cast<double>(total_tokens_ + vocabulary_size());
}

double BigramModel::conditional_probability(std::int64_t context, std::int64_t word) const {
    return static_cast<double>(bigram_count(context, word) + 1) /
           static_cast<double>(context_count(context) + vocabulary_size());
}

std::uint64_t BigramModel::context_count(std::int64_t context) const {
    return context_counts_.at(static_cast<std::size_t>(context));
}

std::uint64_t BigramModel::bigram_count(std::int64_t context, std::int64_t word) const {
    const auto it = bigram_counts_.find(key(context, word));
    return it == bigram_counts_.end() ? 0 : it->second;
}

std::vector<double> bigram_score(const BigramModel& model, std::span<const TokenUnit> tokens) {
    std::vector<double> bits;
    bits.reserve(tokens.size());
    std::int64_t prev = -1;
    for (const auto& tok : tokens) {
        const std::int64_t id = model.id_of(tok.surface);
        double p = prev < 0 ? model.unigram_probability(id) : model.conditional_probability(prev, id);
        bits.push_back(surprisal_from_probability(std::max(p, kProbabilityFloor)));
        prev = id;
    }
    return bits;
}

std::vector<TokenUnit> BigramScorer::tokenize(std::string_view text) const {
    auto tokens = whitespace_tokenize(text);
    for (auto& tok : tokens) {
        tok.vocab_id = model_.id_of(tok.surface);
    }
    return tokens;
}

std::string BigramScorer::detokenize(std::span<const TokenUnit> tokens) const {
    return space_join(tokens);
}

std::vector<double> BigramScorer::score(std::span<const TokenUnit> tokens) const {
    return bigram_score(model_, tokens);
}

ScoredSignals BigramScorer::score_with_attention(std::span<const TokenUnit> tokens) const {
    return {bigram_score(model_, tokens), synthetic_attention(tokens.size())};
}

} // namespace dac
