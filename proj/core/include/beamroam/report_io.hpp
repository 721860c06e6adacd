#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "beamroam/sim.hpp"

namespace beamroam {

enum class ReportFormat { kCsv, kJson };

/// Column order of the per-client summary.
const std::vector<std::string>& summary_columns();

/// One row per client, values printed with %.6g; NaN prints as "nan".
std::string summary_csv(const MetricsReport& r);
/// Same values as summary_csv; NaN becomes null.
std::string summary_json(const MetricsReport& r);
std::string handoffs_csv(const MetricsReport& r);
std::string packets_csv(const MetricsReport& r);
std::string compare_csv(const CompareReport& c);
std::string compare_json(const CompareReport& c);

/// %.6g, with "nan" for NaN.
std::string format_number(double v);

/// Writes summary.<ext>, handoffs.csv and, when recorded, packets.csv into
/// out_dir atomically. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const MetricsReport& r, const std::filesystem::path& out_dir,
                                               ReportFormat format);

}  // namespace beamroam
