#include "dac/analysis.hpp"

#include "dac/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_map>

namespace dac {

using nlohmann::json;

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DimensionError("pearson needs equal-length lists, got " + std::to_string(xs.size()) +
                             " and " + std::to_string(ys.size()));
    }
    if (xs.size() < 2) {
        throw DimensionError("pearson needs at least two points");
    }
    const double n = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw UndefinedCorrelationError("pearson is undefined for a constant list");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double ShiftSummary::large_fraction_dropped() const noexcept {
    return with_dropped_predecessor == 0
               ? 0.0
               : static_cast<double>(large_with_dropped_predecessor) /
                     static_cast<double>(with_dropped_predecessor);
}

double ShiftSummary::large_fraction_kept() const noexcept {
    return with_kept_predecessor == 0
               ? 0.0
               : static_cast<double>(large_with_kept_predecessor) /
                     static_cast<double>(with_kept_predecessor);
}

ShiftReport entropy_shift_report(const ScoredSequence& original,
                                 std::span<const TokenUnit> compressed, const Scorer& scorer,
                                 double large_shift_bits) {
    std::unordered_map<std::size_t, std::size_t> position_of;
    const auto& orig_tokens = original.tokens();
    for (std::size_t p = 0; p < orig_tokens.size(); ++p) {
        position_of.emplace(orig_tokens[p].orig_index, p);
    }

    std::vector<std::size_t> positions;
    positions.reserve(compressed.size());
    for (std::size_t i = 0; i < compressed.size(); ++i) {
        const auto it = position_of.find(compressed[i].orig_index);
        if (it == position_of.end() || orig_tokens[it->second].surface != compressed[i].surface) {
            throw DomainError("compressed token " + std::to_string(i) +
                              " does not occur in the original sequence");
        }
        if (!positions.empty() && it->second <= positions.back()) {
            throw DomainError("compressed tokens are not in original order");
        }
        positions.push_back(it->second);
    }

    std::vector<double> after;
    if (!compressed.empty()) {
        after = scorer.score(compressed);
        check_scores(after, compressed.size(), "surprisal");
    }

    ShiftReport report;
    report.summary.tokens = compressed.size();
    report.summary.large_shift_threshold = large_shift_bits;
    std::vector<double> before;
    before.reserve(compressed.size());
    for (std::size_t i = 0; i < compressed.size(); ++i) {
        const std::size_t p = positions[i];
        ShiftRecord rec;
        rec.orig_index = compressed[i].orig_index;
        rec.surprisal_before = original.surprisal_bits()[p];
        rec.surprisal_after = after[i];
        rec.predecessor_dropped = p > 0 && (i == 0 || positions[i - 1] != p - 1);
        before.push_back(rec.surprisal_before);

        const bool large = std::abs(rec.delta()) > large_shift_bits;
        if (rec.predecessor_dropped) {
            ++report.summary.with_dropped_predecessor;
            report.summary.large_with_dropped_predecessor += large ? 1 : 0;
        } else {
            ++report.summary.with_kept_predecessor;
            report.summary.large_with_kept_predecessor += large ? 1 : 0;
        }
        report.records.push_back(rec);
    }

    if (before == after && !before.empty()) {
        report.summary.pearson = 1.0;
    } else if (before.size() >= 2) {
        try {
            report.summary.pearson = pearson(before, after);
        } catch (const UndefinedCorrelationError&) {
            report.summary.pearson.reset();
        }
    }
    return report;
}

double cross_scorer_similarity(std::span<const TokenUnit> tokens, const Scorer& a, const Scorer& b) {
    const auto score_a = a.score(tokens);
    const auto score_b = b.score(tokens);
    check_scores(score_a, tokens.size(), "scorer A surprisal");
    check_scores(score_b, tokens.size(), "scorer B surprisal");
    return pearson(score_a, score_b);
}

OverheadReport overhead_report(const CompressionTrace& trace, const std::optional<RunTimings>& timings) {
    OverheadReport report;
    report.tokens_kept = trace.kept_indices.size();
    report.original_length = trace.kept_indices.size() + trace.dropped_indices.size();
    report.tokens_removed = trace.dropped_indices.size();
    report.achieved_rate = report.original_length == 0
                               ? 0.0
                               : static_cast<double>(report.tokens_kept) /
                                     static_cast<double>(report.original_length);
    for (std::size_t i = 0; i < trace.stages.size(); ++i) {
        const auto& s = trace.stages[i];
        StageOverhead so{s.stage_index, std::nullopt, s.length_before, s.deleted};
        if (timings && i < timings->stage_seconds.size()) {
            so.seconds = timings->stage_seconds[i];
        }
        report.stages.push_back(so);
    }
    if (timings) {
        report.scorer_calls = timings->scorer_calls;
        report.attention_calls = timings->attention_calls;
        report.initial_scoring_seconds = timings->initial_scoring_seconds;
        double total = timings->initial_scoring_seconds;
        for (double s : timings->stage_seconds) {
            total += s;
        }
        report.total_seconds = total;
    } else {
        report.attention_calls = 1;
        report.scorer_calls = std::max<std::size_t>(trace.stages.size(), 1);
    }
    return report;
}

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

} // namespace

json to_json(const ShiftReport& report) {
    auto records = json::array();
    for (const auto& r : report.records) {
        records.push_back(json{{"orig_index", r.orig_index},
                               {"surprisal_before", r.surprisal_before},
                               {"surprisal_after", r.surprisal_after},
                               {"delta", r.delta()},
                               {"predecessor_dropped", r.predecessor_dropped}});
    }
    const auto& s = report.summary;
    json summary{{"tokens", s.tokens},
                 {"pearson", optional_number(s.pearson)},
                 {"large_shift_threshold", s.large_shift_threshold},
                 {"with_dropped_predecessor", s.with_dropped_predecessor},
                 {"large_with_dropped_predecessor", s.large_with_dropped_predecessor},
                 {"large_fraction_dropped", s.large_fraction_dropped()},
                 {"with_kept_predecessor", s.with_kept_predecessor},
                 {"large_with_kept_predecessor", s.large_with_kept_predecessor},
                 {"large_fraction_kept", s.large_fraction_kept()}};
    return json{{"records", std::move(records)}, {"summary", std::move(summary)}};
}

json to_json(const OverheadReport& report) {
    auto stages = json::array();
    for (const auto& s : report.stages) {
        stages.push_back(json{{"stage_index", s.stage_index},
                              {"seconds", optional_number(s.seconds)},
                              {"length_before", s.length_before},
                              {"deleted", s.deleted}});
    }
    return json{{"stages", std::move(stages)},
                {"initial_scoring_seconds", optional_number(report.initial_scoring_seconds)},
                {"total_seconds", optional_number(report.total_seconds)},
                {"scorer_calls", report.scorer_calls},
                {"attention_calls", report.attention_calls},
                {"original_length", report.original_length},
                {"tokens_kept", report.tokens_kept},
                {"tokens_removed", report.tokens_removed},
                {"achieved_rate", report.achieved_rate}};
}

json to_json(const RunTimings& timings) {
    return json{{"initial_scoring_seconds", timings.initial_scoring_seconds},
                {"stage_seconds", timings.stage_seconds},
                {"scorer_calls", timings.scorer_calls},
                {"attention_calls", timings.attention_calls}};
}

RunTimings timings_from_json(const json& j) {
    try {
        RunTimings t;
        t.initial_scoring_seconds = j.at("initial_scoring_seconds").get<double>();
        t.stage_seconds = j.at("stage_seconds").get<std::vector<double>>();
        t.scorer_calls = j.at("scorer_calls").get<std::size_t>();
        t.attention_calls = j.at("attention_calls").get<std::size_t>();
        return t;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed timings: ") + e.what());
    }
}

void write_table(std::ostream& out, const ShiftReport& report) {
    out << std::left << std::setw(10) << "index" << std::right << std::setw(12) << "before"
        << std::setw(12) << "after" << std::setw(12) << "delta" << "  pred_dropped\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& r : report.records) {
        out << std::left << std::setw(10) << r.orig_index << std::right << std::setw(12)
            << r.surprisal_before << std::setw(12) << r.surprisal_after << std::setw(12)
            << r.delta() << "  " << (r.predecessor_dropped ? "yes" : "no") << '\n';
    }
    const auto& s = report.summary;
    out << "tokens: " << s.tokens << '\n';
    out << "pearson(before, after): ";
    if (s.pearson) {
        out << *s.pearson << '\n';
    } else {
        out << "undefined\n";
    }
    out << "large shifts (|delta| > " << s.large_shift_threshold << " bits): "
        << s.large_with_dropped_predecessor << "/" << s.with_dropped_predecessor
        << " with dropped predecessor, " << s.large_with_kept_predecessor << "/"
        << s.with_kept_predecessor << " with kept predecessor\n";
    out.unsetf(std::ios::floatfield);
}

void write_table(std::ostream& out, const OverheadReport& report) {
    out << std::left << std::setw(8) << "stage" << std::right << std::setw(14) << "seconds"
        << std::setw(10) << "before" << std::setw(10) << "deleted" << '\n';
    out << std::fixed << std::setprecision(6);
    for (const auto& s : report.stages) {
        out << std::left << std::setw(8) << s.stage_index << std::right << std::setw(14);
        if (s.seconds) {
            out << *s.seconds;
        } else {
            out << "-";
        }
        out << std::setw(10) << s.length_before << std::setw(10) << s.deleted << '\n';
    }
    out << "scorer calls: " << report.scorer_calls << " (" << report.attention_calls
        << " with attention)\n";
    if (report.total_seconds) {
        out << "compression seconds: " << *report.total_seconds << '\n';
    }
    out << std::setprecision(4);
    out << "tokens: " << report.original_length << " -> " << report.tokens_kept << " ("
        << report.tokens_removed << " removed, rate " << report.achieved_rate << ")\n";
    out.unsetf(std::ios::floatfield);
}

void write_csv(std::ostream& out, const ShiftReport& report) {
    out << "orig_index,surprisal_before,surprisal_after,delta,predecessor_dropped\n";
    out << std::setprecision(17);
    for (const auto& r : report.records) {
        out << r.orig_index << ',' << r.surprisal_before << ',' << r.surprisal_after << ','
            << r.delta() << ',' << (r.predecessor_dropped ? 1 : 0) << '\n';
    }
}

} // namespace dac
