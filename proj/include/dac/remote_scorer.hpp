#pragma once

#include "dac/scorer.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dac {

// Wire protocol spoken with a model-scorer service (JSON over HTTP).
//
//   POST /v1/score
//     request  {"tokens": [str], "want_attention": bool, "request_id": str}
//              ("text": str may replace "tokens")
//     response {"request_id": str, "surprisal_bits": [num],
//               "attention_score": [num]        (present iff want_attention),
//               "tokenization": [str],
//               "model_info": {"name": str, "context_limit": int}}
//
//   POST /v1/debug/attention
//     request  {"tokens": [str], "request_id": str}
//     response {"request_id": str, "tokenization": [str], "layers": int,
//               "heads": int, "n": int, "matrices": [[[[num]]]]}
//              matrices[layer][head][query][key]
//
//   GET /v1/info
//     response {"model": str, "context_limit": int, "tokenizer": str,
//               "layers": int, "heads": int}
//
// Non-200 responses carry {"error": {"code": str, "message": str,
// "context_limit": int?, "request_id": str?}}. Codes: "capacity" (HTTP 413),
// "capability" (debug hook disabled), "invalid_request", "internal".
namespace wire {

nlohmann::json score_request(std::span<const TokenUnit> tokens, bool want_attention,
                             const std::string& request_id);
nlohmann::json debug_attention_request(std::span<const TokenUnit> tokens,
                                       const std::string& request_id);

// Validates a /v1/score response body against the request it answers.
// Throws ProtocolError on any shape or value violation.
ScoredSignals parse_score_response(const nlohmann::json& body, std::size_t token_count,
                                   bool want_attention);

// Throws ProtocolError on malformed payloads; the returned stack is not
// checked for stochasticity (aggregation does that).
AttentionStack parse_debug_attention_response(const nlohmann::json& body, std::size_t token_count);

// Maps an error body and HTTP status onto the matching ScorerError subtype and throws it.
[[noreturn]] void raise_error_response(int status, const std::string& body);

} // namespace wire

struct RemoteScorerOptions {
    int max_attempts = 3;
    std::chrono::milliseconds backoff{200};
    std::chrono::seconds timeout{120};
};

struct RemoteRequestRecord {
    std::string request_id;
    std::size_t token_count = 0;
    bool want_attention = false;
};

struct RemoteModelInfo {
    std::string model;
    std::size_t context_limit = 0;
    std::string tokenizer;
    std::size_t layers = 0;
    std::size_t heads = 0;
};

// Scorer backed by a model-scorer service. Tokenization is done locally with
// the reference whitespace rule so that traces are comparable across
// backends; the service scores the surfaces it is sent.
//
// Transport failures are retried with a fixed backoff; protocol and capacity
// errors are raised immediately. Safe for concurrent use.
class RemoteScorer final : public Scorer {
public:
    explicit RemoteScorer(std::string endpoint, RemoteScorerOptions options = {});

    const std::string& endpoint() const noexcept { return endpoint_; }

    std::vector<TokenUnit> tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const TokenUnit> tokens) const override;
    std::vector<double> score(std::span<const TokenUnit> tokens) const override;
    ScoredSignals score_with_attention(std::span<const TokenUnit> tokens) const override;

    ScoredSignals remote_score(std::span<const TokenUnit> tokens, bool want_attention) const;
    AttentionStack debug_raw_attention(std::span<const TokenUnit> tokens) const;
    RemoteModelInfo info() const;

    // Every /v1/score request issued so far, in order.
    std::vector<RemoteRequestRecord> request_log() const;
    void clear_request_log();

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
    nlohmann::json get(const std::string& path) const;
    std::string next_request_id() const;

    std::string endpoint_;
    std::string host_;        // scheme://host:port
    std::string path_prefix_; // optional base path, no trailing slash
    RemoteScorerOptions options_;

    mutable std::atomic<std::uint64_t> next_id_{0};
    mutable std::mutex log_mutex_;
    mutable std::vector<RemoteRequestRecord> log_;
};

} // namespace dac
