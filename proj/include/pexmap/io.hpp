#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "pexmap/params.hpp"

namespace pexmap {

inline constexpr const char* kVersion = "0.1.0";

std::string format_g17(double v);

nlohmann::json params_to_json(const Params& p);
Params params_from_json(const nlohmann::json& j);
Params params_from_file(const std::string& path);

// {"version": ..., "params": {...}, "seed": ...}; stable across reruns.
nlohmann::json meta_block(const Params& p, uint64_t seed);

// Full envelope: meta plus a "timestamp" key kept separate so that reruns
// differ only there.
nlohmann::json make_envelope(const Params& p, uint64_t seed);

std::string timestamp_utc();

// '#'-prefixed metadata lines for CSV outputs; the timestamp gets its own line.
std::string csv_preamble(const Params& p, uint64_t seed);

void write_text_file(const std::string& path, const std::string& text);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace pexmap
