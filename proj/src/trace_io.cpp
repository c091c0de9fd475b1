#include "dac/trace_io.hpp"

#include "dac/error.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace dac {

using nlohmann::json;

nlohmann::ordered_json to_json(const StageReport& stage) {
    return nlohmann::ordered_json{{"stage_index", stage.stage_index},
                                  {"delta_tau", stage.delta_tau},
                                  {"threshold", stage.threshold},
                                  {"deleted", stage.deleted},
                                  {"protected", stage.protected_count},
                                  {"length_before", stage.length_before},
                                  {"length_after", stage.length_after}};
}

StageReport stage_from_json(const json& j) {
    StageReport s;
    s.stage_index = j.at("stage_index").get<std::size_t>();
    s.delta_tau = j.at("delta_tau").get<double>();
    s.threshold = j.at("threshold").get<double>();
    s.deleted = j.at("deleted").get<std::size_t>();
    s.protected_count = j.at("protected").get<std::size_t>();
    s.length_before = j.at("length_before").get<std::size_t>();
    s.length_after = j.at("length_after").get<std::size_t>();
    return s;
}

void write_trace_jsonl(std::ostream& out, const CompressionTrace& trace) {
    for (const auto& stage : trace.stages) {
        out << to_json(stage).dump() << '\n';
    }
    nlohmann::ordered_json summary{{"kept_indices", trace.kept_indices},
                                   {"dropped_indices", trace.dropped_indices},
                                   {"achieved_rate", trace.achieved_rate}};
    out << summary.dump() << '\n';
}

std::string trace_to_jsonl(const CompressionTrace& trace) {
    std::ostringstream out;
    write_trace_jsonl(out, trace);
    return out.str();
}

CompressionTrace read_trace_jsonl(std::istream& in) {
    CompressionTrace trace;
    bool have_summary = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        if (have_summary) {
            throw Error("trace line " + std::to_string(line_no) + " follows the summary record");
        }
        try {
            auto j = json::parse(line);
            if (j.contains("stage_index")) {
                trace.stages.push_back(stage_from_json(j));
            } else {
                trace.kept_indices = j.at("kept_indices").get<std::vector<std::size_t>>();
                trace.dropped_indices = j.at("dropped_indices").get<std::vector<std::size_t>>();
                trace.achieved_rate = j.at("achieved_rate").get<double>();
                have_summary = true;
            }
        } catch (const json::exception& e) {
            throw Error("malformed trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_summary) {
        throw Error("trace has no summary record");
    }
    return trace;
}

} // namespace dac
