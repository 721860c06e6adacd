#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "beamroam/sim.hpp"

namespace beamroam {

inline constexpr int kSchemaVersion = 1;

/// Reads a JSON scenario, applies defaults and validates. Throws ConfigError
/// with kParseError (syntax, types, unknown keys) or kValidationError.
Scenario load_scenario(const std::filesystem::path& path);
/// Same for in-memory text; relative trace files resolve against base_dir.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});

/// Every field, defaults included, as pretty-printed JSON.
std::string serialize_scenario(const Scenario& s);
/// Writes effective_config.json into out_dir.
void write_effective_config(const Scenario& s, const std::filesystem::path& out_dir);

struct SampleRow {
  double t = 0.0;
  Vec3 position;
  double snr_db = 0.0;
};

/// CSV with header t,x,y,z.
std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path);
/// CSV with header t,x,y,z,snr_db.
std::vector<SampleRow> read_samples_csv(const std::filesystem::path& path);

/// Writes text to path through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace beamroam
