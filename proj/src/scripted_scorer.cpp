#include "dac/scripted_scorer.hpp"

#include "dac/error.hpp"

#include <fstream>

namespace dac {

namespace {

std::string describe(const std::vector<std::string>& surfaces) {
    std::string out = "[";
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += surfaces[i];
    }
    return out + "]";
}

} // namespace

ScriptedScorer::ScriptedScorer(Script script) : script_(std::move(script)) {
    for (const auto& [tokens, entry] : script_) {
        check_scores(entry.surprisal_bits, tokens.size(), "scripted surprisal");
        if (entry.attention_score) {
            check_scores(*entry.attention_score, tokens.size(), "scripted attention");
        }
    }
}

void ScriptedScorer::add(std::vector<std::string> tokens, std::vector<double> surprisal,
                         std::optional<std::vector<double>> attention) {
    check_scores(surprisal, tokens.size(), "scripted surprisal");
    if (attention) {
        check_scores(*attention, tokens.size(), "scripted attention");
    }
    script_.insert_or_assign(std::move(tokens), ScriptEntry{std::move(surprisal), std::move(attention)});
}

ScriptedScorer ScriptedScorer::from_json(const nlohmann::json& j) {
    ScriptedScorer scorer;
    try {
        const auto& entries = j.is_array() ? j : j.at("entries");
        for (const auto& e : entries) {
            std::optional<std::vector<double>> attention;
            if (e.contains("attention") && !e.at("attention").is_null()) {
                attention = e.at("attention").get<std::vector<double>>();
            }
            scorer.add(e.at("tokens").get<std::vector<std::string>>(),
                       e.at("surprisal").get<std::vector<double>>(), std::move(attention));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed scorer script: ") + e.what());
    }
    return scorer;
}

ScriptedScorer ScriptedScorer::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read scorer script " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed scorer script " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json ScriptedScorer::to_json() const {
    auto entries = nlohmann::json::array();
    for (const auto& [tokens, entry] : script_) {
        nlohmann::json e{{"tokens", tokens}, {"surprisal", entry.surprisal_bits}};
        if (entry.attention_score) {
            e["attention"] = *entry.attention_score;
        }
        entries.push_back(std::move(e));
    }
    return nlohmann::json{{"entries", std::move(entries)}};
}

const ScriptEntry& ScriptedScorer::lookup(std::span<const TokenUnit> tokens) const {
    const auto key = surfaces_of(tokens);
    const auto it = script_.find(key);
    if (it == script_.end()) {
        throw ScriptedMissError("no scripted scores for " + describe(key));
    }
    return it->second;
}

std::vector<TokenUnit> ScriptedScorer::tokenize(std::string_view text) const {
    return whitespace_tokenize(text);
}

std::string ScriptedScorer::detokenize(std::span<const TokenUnit> tokens) const {
    return space_join(tokens);
}

std::vector<double> ScriptedScorer::score(std::span<const TokenUnit> tokens) const {
    return lookup(tokens).surprisal_bits;
}

ScoredSignals ScriptedScorer::score_with_attention(std::span<const TokenUnit> tokens) const {
    const auto& entry = lookup(tokens);
    if (!entry.attention_score) {
        throw ScriptedMissError("no scripted attention for " + describe(surfaces_of(tokens)));
    }
    return {entry.surprisal_bits, *entry.attention_score};
}

} // namespace dac
