#include "dac/remote_scorer.hpp"

#include "dac/error.hpp"

#include <httplib.h>

#include <sstream>
#include <thread>

namespace dac {

using nlohmann::json;

namespace wire {

json score_request(std::span<const TokenUnit> tokens, bool want_attention,
                   const std::string& request_id) {
    return json{{"tokens", surfaces_of(tokens)},
                {"want_attention", want_attention},
                {"request_id", request_id}};
}

json debug_attention_request(std::span<const TokenUnit> tokens, const std::string& request_id) {
    return json{{"tokens", surfaces_of(tokens)}, {"request_id", request_id}};
}

namespace {

std::vector<double> number_list(const json& body, const char* field) {
    if (!body.contains(field)) {
        throw ProtocolError(std::string("response lacks \"") + field + "\"");
    }
    const auto& arr = body.at(field);
    if (!arr.is_array()) {
        throw ProtocolError(std::string("\"") + field + "\" is not an array");
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number()) {
            throw ProtocolError(std::string("\"") + field + "\" holds a non-number");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

ScoredSignals parse_score_response(const json& body, std::size_t token_count, bool want_attention) {
    if (!body.is_object()) {
        throw ProtocolError("score response is not a JSON object");
    }
    ScoredSignals out;
    out.surprisal_bits = number_list(body, "surprisal_bits");
    check_scores(out.surprisal_bits, token_count, "surprisal_bits");
    if (body.contains("tokenization")) {
        const auto& tok = body.at("tokenization");
        if (!tok.is_array() || tok.size() != token_count) {
            throw ProtocolError("tokenization length differs from the request");
        }
    }
    if (want_attention) {
        out.attention_score = number_list(body, "attention_score");
        check_scores(out.attention_score, token_count, "attention_score");
    } else if (body.contains("attention_score") && !body.at("attention_score").is_null()) {
        throw ProtocolError("attention_score returned without being requested");
    }
    return out;
}

AttentionStack parse_debug_attention_response(const json& body, std::size_t token_count) {
    try {
        const auto layers = body.at("layers").get<std::size_t>();
        const auto heads = body.at("heads").get<std::size_t>();
        const auto n = body.at("n").get<std::size_t>();
        if (n != token_count) {
            throw ProtocolError("debug attention n differs from the request length");
        }
        const auto& matrices = body.at("matrices");
        if (matrices.size() != layers) {
            throw ProtocolError("debug attention layer count mismatch");
        }
        std::vector<std::vector<AttentionMatrix>> stack;
        stack.reserve(layers);
        for (const auto& layer : matrices) {
            if (layer.size() != heads) {
                throw ProtocolError("debug attention head count mismatch");
            }
            std::vector<AttentionMatrix> row_of_heads;
            row_of_heads.reserve(heads);
            for (const auto& head : layer) {
                if (head.size() != n) {
                    throw ProtocolError("debug attention matrix has wrong row count");
                }
                std::vector<double> values;
                values.reserve(n * n);
                for (const auto& row : head) {
                    if (row.size() != n) {
                        throw ProtocolError("debug attention matrix has wrong column count");
                    }
                    for (const auto& x : row) {
                        values.push_back(x.get<double>());
                    }
                }
                row_of_heads.emplace_back(n, std::move(values));
            }
            stack.push_back(std::move(row_of_heads));
        }
        return AttentionStack(std::move(stack));
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed debug attention payload: ") + e.what());
    }
}

void raise_error_response(int status, const std::string& body) {
    std::string code;
    std::string message = body;
    std::optional<std::size_t> limit;
    std::string request_id;
    try {
        const auto j = json::parse(body);
        const auto& err = j.at("error");
        code = err.value("code", "");
        message = err.value("message", message);
        if (err.contains("context_limit") && err.at("context_limit").is_number_unsigned()) {
            limit = err.at("context_limit").get<std::size_t>();
        }
        request_id = err.value("request_id", "");
    } catch (const json::exception&) {
        // non-JSON error bodies keep the raw text
    }
    std::ostringstream what;
    what << "scorer service returned HTTP " << status;
    if (!code.empty()) {
        what << " (" << code << ")";
    }
    if (!request_id.empty()) {
        what << " for request " << request_id;
    }
    what << ": " << message;
    if (code == "capacity" || status == 413) {
        what << " [context limit " << limit.value_or(0) << "]";
        throw CapacityError(what.str(), limit.value_or(0));
    }
    if (code == "invalid_request" || code == "capability") {
        throw ProtocolError(what.str());
    }
    throw ScorerError(what.str());
}

} // namespace wire

RemoteScorer::RemoteScorer(std::string endpoint, RemoteScorerOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
    const auto scheme = endpoint_.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("scorer endpoint must include a scheme: " + endpoint_);
    }
    const auto slash = endpoint_.find('/', scheme + 3);
    host_ = endpoint_.substr(0, slash);
    if (slash != std::string::npos) {
        path_prefix_ = endpoint_.substr(slash);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') {
            path_prefix_.pop_back();
        }
    }
    if (options_.max_attempts < 1) {
        options_.max_attempts = 1;
    }
}

std::string RemoteScorer::next_request_id() const {
    return "dac-" + std::to_string(next_id_.fetch_add(1) + 1);
}

json RemoteScorer::post(const std::string& path, const json& body) const {
    const auto payload = body.dump();
    for (int attempt = 1;; ++attempt) {
        httplib::Client client(host_);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        auto res = client.Post(path_prefix_ + path, payload, "application/json");
        if (!res) {
            if (attempt >= options_.max_attempts) {
                throw TransportError("cannot reach scorer at " + endpoint_ + ": " +
                                         httplib::to_string(res.error()) + " after " +
                                         std::to_string(attempt) + " attempts",
                                     attempt);
            }
            std::this_thread::sleep_for(options_.backoff);
            continue;
        }
        if (res->status != 200) {
            wire::raise_error_response(res->status, res->body);
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw ProtocolError(std::string("scorer response is not JSON: ") + e.what());
        }
    }
}

json RemoteScorer::get(const std::string& path) const {
    for (int attempt = 1;; ++attempt) {
        httplib::Client client(host_);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        auto res = client.Get(path_prefix_ + path);
        if (!res) {
            if (attempt >= options_.max_attempts) {
                throw TransportError("cannot reach scorer at " + endpoint_ + " after " +
                                         std::to_string(attempt) + " attempts",
                                     attempt);
            }
            std::this_thread::sleep_for(options_.backoff);
            continue;
        }
        if (res->status != 200) {
            wire::raise_error_response(res->status, res->body);
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw ProtocolError(std::string("scorer response is not JSON: ") + e.what());
        }
    }
}

std::vector<TokenUnit> RemoteScorer::tokenize(std::string_view text) const {
    return whitespace_tokenize(text);
}

std::string RemoteScorer::detokenize(std::span<const TokenUnit> tokens) const {
    return space_join(tokens);
}

ScoredSignals RemoteScorer::remote_score(std::span<const TokenUnit> tokens, bool want_attention) const {
    const auto id = next_request_id();
    {
        std::lock_guard lock(log_mutex_);
        log_.push_back(RemoteRequestRecord{id, tokens.size(), want_attention});
    }
    const auto body = post("/v1/score", wire::score_request(tokens, want_attention, id));
    return wire::parse_score_response(body, tokens.size(), want_attention);
}

std::vector<double> RemoteScorer::score(std::span<const TokenUnit> tokens) const {
    return remote_score(tokens, false).surprisal_bits;
}

ScoredSignals RemoteScorer::score_with_attention(std::span<const TokenUnit> tokens) const {
    return remote_score(tokens, true);
}

AttentionStack RemoteScorer::debug_raw_attention(std::span<const TokenUnit> tokens) const {
    const auto body = post("/v1/debug/attention", wire::debug_attention_request(tokens, next_request_id()));
    return wire::parse_debug_attention_response(body, tokens.size());
}

RemoteModelInfo RemoteScorer::info() const {
    const auto j = get("/v1/info");
    try {
        RemoteModelInfo out;
        out.model = j.at("model").get<std::string>();
        out.context_limit = j.at("context_limit").get<std::size_t>();
        out.tokenizer = j.value("tokenizer", "");
        out.layers = j.value("layers", std::size_t{0});
        out.heads = j.value("heads", std::size_t{0});
        return out;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed /v1/info response: ") + e.what());
    }
}

std::vector<RemoteRequestRecord> RemoteScorer::request_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

void RemoteScorer::clear_request_log() {
    std::lock_guard lock(log_mutex_);
    log_.clear();
}

} // namespace dac
