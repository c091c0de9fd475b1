#pragma once

#include "dac/types.hpp"

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace dac {

// JSON Lines layout: one object per stage, then one summary object carrying
// kept_indices, dropped_indices and achieved_rate.
void write_trace_jsonl(std::ostream& out, const CompressionTrace& trace);
std::string trace_to_jsonl(const CompressionTrace& trace);

// Throws Error on malformed input (missing summary, bad fields).
CompressionTrace read_trace_jsonl(std::istream& in);

nlohmann::ordered_json to_json(const StageReport& stage);
StageReport stage_from_json(const nlohmann::json& j);

} // namespace dac
