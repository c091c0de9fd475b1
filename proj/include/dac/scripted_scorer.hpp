#pragma once

#include "dac/scorer.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dac {

struct ScriptEntry {
    std::vector<double> surprisal_bits;
    std::optional<std::vector<double>> attention_score;
};

// Replays canned scores keyed by the exact token-surface sequence. A request
// for a sequence the script does not cover raises ScriptedMissError; there is
// no fallback.
//
// JSON form: {"entries": [{"tokens": [...], "surprisal": [...],
//                          "attention": [...]}, ...]}, attention optional.
class ScriptedScorer final : public Scorer {
public:
    using Script = std::map<std::vector<std::string>, ScriptEntry>;

    ScriptedScorer() = default;
    explicit ScriptedScorer(Script script);

    static ScriptedScorer from_json(const nlohmann::json& j);
    static ScriptedScorer from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    // Replaces any existing entry for the same sequence.
    void add(std::vector<std::string> tokens, std::vector<double> surprisal,
             std::optional<std::vector<double>> attention = std::nullopt);

    std::vector<TokenUnit> tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const TokenUnit> tokens) const override;
    std::vector<double> score(std::span<const TokenUnit> tokens) const override;
    ScoredSignals score_with_attention(std::span<const TokenUnit> tokens) const override;

private:
    const ScriptEntry& lookup(std::span<const TokenUnit> tokens) const;

    Script script_;
};

} // namespace dac
