#include "cli.hpp"

#include "dac/analysis.hpp"
#include "dac/bigram_scorer.hpp"
#include "dac/compressor.hpp"
#include "dac/remote_scorer.hpp"
#include "dac/scripted_scorer.hpp"
#include "dac/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace dac::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class IoError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << content) || !file.flush()) {
        throw IoError("cannot write " + path);
    }
}

struct ScorerFlags {
    std::string kind = "bigram";
    std::vector<std::string> corpus;
    std::string script;
    std::string endpoint;
};

void add_scorer_flags(CLI::App& cmd, ScorerFlags& flags) {
    cmd.add_option("--scorer", flags.kind, "Scoring backend")
        ->check(CLI::IsMember({"bigram", "scripted", "remote"}));
    cmd.add_option("--corpus", flags.corpus, "Training text for the bigram scorer");
    cmd.add_option("--script", flags.script, "JSON script for the scripted scorer");
    cmd.add_option("--endpoint", flags.endpoint,
                   std::string("Scorer service URL (falls back to $") + kEndpointEnv + ")");
}

std::unique_ptr<Scorer> make_scorer(const ScorerFlags& flags) {
    if (flags.kind == "bigram") {
        if (flags.corpus.empty()) {
            throw ConfigError("--scorer bigram needs at least one --corpus file");
        }
        std::vector<std::string> documents;
        for (const auto& path : flags.corpus) {
            documents.push_back(read_file(path));
        }
        return std::make_unique<BigramScorer>(BigramModel(documents));
    }
    if (flags.kind == "scripted") {
        if (flags.script.empty()) {
            throw ConfigError("--scorer scripted needs --script");
        }
        const auto text = read_file(flags.script);
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw IoError("malformed script " + flags.script + ": " + e.what());
        }
        return std::make_unique<ScriptedScorer>(ScriptedScorer::from_json(j));
    }
    std::string endpoint = flags.endpoint;
    if (endpoint.empty()) {
        if (const char* env = std::getenv(kEndpointEnv)) {
            endpoint = env;
        }
    }
    if (endpoint.empty()) {
        throw ConfigError(std::string("--scorer remote needs --endpoint or $") + kEndpointEnv);
    }
    return std::make_unique<RemoteScorer>(endpoint);
}

// "http(s)://..." selects a remote service, "bigram:a.txt,b.txt" a bigram
// model, "scripted:s.json" a script.
std::unique_ptr<Scorer> scorer_from_spec(const std::string& spec) {
    ScorerFlags flags;
    if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
        flags.kind = "remote";
        flags.endpoint = spec;
    } else if (spec.rfind("bigram:", 0) == 0) {
        std::stringstream list(spec.substr(7));
        for (std::string path; std::getline(list, path, ',');) {
            flags.corpus.push_back(path);
        }
    } else if (spec.rfind("scripted:", 0) == 0) {
        flags.kind = "scripted";
        flags.script = spec.substr(9);
    } else {
        throw ConfigError("unrecognized scorer '" + spec +
                          "' (use a URL, bigram:FILES or scripted:FILE)");
    }
    return make_scorer(flags);
}

std::vector<TokenUnit> load_prompt(const std::string& path, bool pre_tokenized, const Scorer& scorer) {
    const auto text = read_file(path);
    if (!pre_tokenized) {
        return scorer.tokenize(text);
    }
    try {
        const auto surfaces = json::parse(text).get<std::vector<std::string>>();
        return make_tokens(surfaces);
    } catch (const json::exception& e) {
        throw IoError("pre-tokenized input " + path + " is not a JSON string array: " + e.what());
    }
}

struct CompressFlags {
    double rate = 0.5;
    std::string iterations = "auto";
    std::string fusion = "additive";
    std::optional<double> alpha;
    std::string normalize = "none";
    bool no_protect = false;
    bool no_dynamic = false;
    bool attention_off = false;
    bool no_clamp = false;
    std::string delta_p_denominator = "original";
    ScorerFlags scorer;
    std::string input;
    std::string output;
    std::string trace;
    std::string timings;
    bool emit_tokens = false;
    bool pre_tokenized = false;
};

CompressionConfig build_config(const CompressFlags& f) {
    CompressionConfig config;
    config.target_rate = f.rate;
    if (f.iterations != "auto") {
        try {
            std::size_t used = 0;
            const int d = std::stoi(f.iterations, &used);
            if (used != f.iterations.size()) {
                throw std::invalid_argument(f.iterations);
            }
            config.iterations = d;
        } catch (const std::exception&) {
            throw ConfigError("--iterations must be a positive integer or 'auto'");
        }
    }
    config.fusion.mode = f.fusion == "additive" ? FusionMode::additive : FusionMode::multiplicative;
    if (config.fusion.mode == FusionMode::additive) {
        config.fusion.alpha = f.alpha.value_or(0.8);
    } else {
        config.fusion.alpha = f.alpha;
    }
    config.fusion.normalize = f.normalize == "minmax" ? Normalization::minmax : Normalization::none;
    config.protect_consecutive = !f.no_protect;
    config.dynamic_off = f.no_dynamic;
    config.attention_off = f.attention_off;
    config.clamp_stage_rate = !f.no_clamp;
    config.delta_p_denominator = f.delta_p_denominator == "current" ? DeltaPDenominator::current
                                                                    : DeltaPDenominator::original;
    if (const auto check = validate_config(config); !check) {
        std::string msg;
        for (const auto& v : check.violations) {
            msg += (msg.empty() ? "" : "; ") + v;
        }
        throw ConfigError(msg);
    }
    return config;
}

int cmd_compress(const CompressFlags& f, std::ostream& out, std::ostream& err) {
    const auto config = build_config(f);
    const auto scorer = make_scorer(f.scorer);
    const auto prompt = load_prompt(f.input, f.pre_tokenized, *scorer);
    if (prompt.empty()) {
        throw ConfigError("input contains no tokens");
    }

    CompressionResult result;
    try {
        result = compress(prompt, *scorer, config);
    } catch (const CompressionAborted& e) {
        std::string msg = e.what();
        if (!f.trace.empty()) {
            write_file(f.trace, trace_to_jsonl(e.partial_trace()), out);
            msg += " (partial trace written to " + f.trace + ")";
        }
        throw ScorerError(msg);
    }

    std::string body;
    if (f.emit_tokens) {
        body = json(surfaces_of(result.tokens)).dump() + "\n";
    } else {
        body = scorer->detokenize(result.tokens) + "\n";
    }
    write_file(f.output, body, out);
    if (!f.trace.empty()) {
        write_file(f.trace, trace_to_jsonl(result.trace), out);
    }
    if (!f.timings.empty()) {
        write_file(f.timings, to_json(result.timings).dump(2) + "\n", out);
    }
    err << "achieved rate: " << result.trace.achieved_rate << " (" << result.tokens.size() << "/"
        << prompt.size() << " tokens, " << result.trace.stages.size() << " stages)\n";
    return kOk;
}

CompressionTrace load_trace(const std::string& path) {
    std::istringstream in(read_file(path));
    try {
        return read_trace_jsonl(in);
    } catch (const Error& e) {
        throw IoError(path + ": " + e.what());
    }
}

struct ShiftFlags {
    std::string original;
    std::string trace;
    ScorerFlags scorer;
    bool pre_tokenized = false;
    double threshold = kDefaultLargeShiftBits;
    std::string format = "json";
    std::string csv;
    std::string output;
};

int cmd_shift(const ShiftFlags& f, std::ostream& out) {
    const auto trace = load_trace(f.trace);
    const auto scorer = make_scorer(f.scorer);
    const auto tokens = load_prompt(f.original, f.pre_tokenized, *scorer);
    if (const auto check = validate_trace(trace, tokens.size()); !check) {
        throw IoError("trace does not match the original prompt: " + check.violations.front());
    }
    auto surprisal = scorer->score(tokens);
    check_scores(surprisal, tokens.size(), "surprisal");
    const ScoredSequence original(tokens, std::move(surprisal), std::vector<double>(tokens.size(), 0.0));
    std::vector<TokenUnit> kept;
    for (auto idx : trace.kept_indices) {
        kept.push_back(tokens[idx]);
    }
    const auto report = entropy_shift_report(original, kept, *scorer, f.threshold);

    std::ostringstream body;
    if (f.format == "table") {
        write_table(body, report);
    } else {
        body << to_json(report).dump(2) << '\n';
    }
    write_file(f.output, body.str(), out);
    if (!f.csv.empty()) {
        std::ostringstream csv;
        write_csv(csv, report);
        write_file(f.csv, csv.str(), out);
    }
    return kOk;
}

struct CorrelateFlags {
    std::string scorer_a;
    std::string scorer_b;
    std::string input;
    bool pre_tokenized = false;
};

int cmd_correlate(const CorrelateFlags& f, std::ostream& out) {
    const auto a = scorer_from_spec(f.scorer_a);
    const auto b = scorer_from_spec(f.scorer_b);
    const auto tokens = load_prompt(f.input, f.pre_tokenized, *a);
    const double r = cross_scorer_similarity(tokens, *a, *b);
    out << json(r).dump() << '\n';
    return kOk;
}

struct OverheadFlags {
    std::string trace;
    std::string timings;
    std::string format = "json";
    std::string output;
};

int cmd_overhead(const OverheadFlags& f, std::ostream& out) {
    const auto trace = load_trace(f.trace);
    std::optional<RunTimings> timings;
    if (!f.timings.empty()) {
        try {
            timings = timings_from_json(json::parse(read_file(f.timings)));
        } catch (const json::exception& e) {
            throw IoError("malformed timings " + f.timings + ": " + e.what());
        } catch (const IoError&) {
            throw;
        } catch (const Error& e) {
            throw IoError(f.timings + ": " + e.what());
        }
    }
    const auto report = overhead_report(trace, timings);
    std::ostringstream body;
    if (f.format == "table") {
        write_table(body, report);
    } else {
        body << to_json(report).dump(2) << '\n';
    }
    write_file(f.output, body.str(), out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attention-aware dynamic prompt compression", "dac"};
    app.require_subcommand(1);

    CompressFlags cf;
    auto* compress_cmd = app.add_subcommand("compress", "Compress a prompt");
    compress_cmd->add_option("--rate", cf.rate, "Fraction of tokens to retain, in (0,1)");
    compress_cmd->add_option("--iterations", cf.iterations, "Number of stages, or 'auto'");
    compress_cmd->add_option("--fusion", cf.fusion, "Metric fusion")
        ->check(CLI::IsMember({"additive", "multiplicative"}));
    compress_cmd->add_option("--alpha", cf.alpha, "Attention weight for additive fusion");
    compress_cmd->add_option("--normalize", cf.normalize, "Signal scaling before fusion")
        ->check(CLI::IsMember({"none", "minmax"}));
    compress_cmd->add_flag("--no-protect", cf.no_protect, "Allow consecutive deletions");
    compress_cmd->add_flag("--no-dynamic", cf.no_dynamic, "Single stage");
    compress_cmd->add_flag("--attention-off", cf.attention_off, "Surprisal-only metric");
    compress_cmd->add_flag("--no-clamp", cf.no_clamp, "Do not cap stage rates at 1");
    compress_cmd->add_option("--delta-p-denominator", cf.delta_p_denominator,
                             "Length that spared-token counts are divided by")
        ->check(CLI::IsMember({"original", "current"}));
    add_scorer_flags(*compress_cmd, cf.scorer);
    compress_cmd->add_option("-i,--input", cf.input, "Prompt file ('-' for stdin)")->required();
    compress_cmd->add_option("-o,--output", cf.output, "Compressed output (default stdout)");
    compress_cmd->add_option("--trace", cf.trace, "Write the JSONL trace here");
    compress_cmd->add_option("--timings", cf.timings, "Write per-stage timings JSON here");
    compress_cmd->add_flag("--emit-tokens", cf.emit_tokens, "Write a JSON token array");
    compress_cmd->add_flag("--pre-tokenized", cf.pre_tokenized, "Input is a JSON token array");

    auto* analyze_cmd = app.add_subcommand("analyze", "Diagnostic reports");
    analyze_cmd->require_subcommand(1);

    ShiftFlags sf;
    auto* shift_cmd = analyze_cmd->add_subcommand("shift", "Surprisal shift after compression");
    shift_cmd->add_option("--original", sf.original, "Original prompt")->required();
    shift_cmd->add_option("--trace", sf.trace, "Trace of the compression run")->required();
    add_scorer_flags(*shift_cmd, sf.scorer);
    shift_cmd->add_flag("--pre-tokenized", sf.pre_tokenized, "Original is a JSON token array");
    shift_cmd->add_option("--threshold", sf.threshold, "Large-shift cutoff in bits");
    shift_cmd->add_option("--format", sf.format)->check(CLI::IsMember({"json", "table"}));
    shift_cmd->add_option("--csv", sf.csv, "Also write per-token records as CSV");
    shift_cmd->add_option("-o,--output", sf.output);

    CorrelateFlags rf;
    auto* correlate_cmd = analyze_cmd->add_subcommand("correlate", "Surprisal similarity of two scorers");
    correlate_cmd->add_option("--scorer-a", rf.scorer_a)->required();
    correlate_cmd->add_option("--scorer-b", rf.scorer_b)->required();
    correlate_cmd->add_option("-i,--input", rf.input)->required();
    correlate_cmd->add_flag("--pre-tokenized", rf.pre_tokenized);

    OverheadFlags of;
    auto* overhead_cmd = analyze_cmd->add_subcommand("overhead", "Compression cost accounting");
    overhead_cmd->add_option("--trace", of.trace)->required();
    overhead_cmd->add_option("--timings", of.timings, "Timings JSON from compress --timings");
    overhead_cmd->add_option("--format", of.format)->check(CLI::IsMember({"json", "table"}));
    overhead_cmd->add_option("-o,--output", of.output);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (compress_cmd->parsed()) {
            return cmd_compress(cf, out, err);
        }
        if (shift_cmd->parsed()) {
            return cmd_shift(sf, out);
        }
        if (correlate_cmd->parsed()) {
            return cmd_correlate(rf, out);
        }
        if (overhead_cmd->parsed()) {
            return cmd_overhead(of, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ScorerError& e) {
        err << "scorer error: " << e.what() << '\n';
        return kScorerError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}

} // namespace dac::cli
