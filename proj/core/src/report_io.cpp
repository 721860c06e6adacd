#include "beamroam/report_io.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "beamroam/scenario_io.hpp"

namespace beamroam {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<double> row_values(const ClientMetrics& c) {
  return {static_cast<double>(c.client),
          c.mean_tput_mbps,
          c.median_tput_mbps,
          static_cast<double>(c.handoffs),
          c.mean_handoff_latency_s,
          static_cast<double>(c.retransmissions),
          static_cast<double>(c.handoff_retransmissions),
          c.buffered_bits_at_handoff,
          c.est_error_m,
          c.selection_accuracy,
          static_cast<double>(c.sent),
          static_cast<double>(c.delivered),
          static_cast<double>(c.lost_channel),
          static_cast<double>(c.dropped_buffer),
          static_cast<double>(c.in_flight_end),
          static_cast<double>(c.ecn_marks)};
}

std::string join_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\n";
}

// JSON numbers parsed back from the same %.6g text so both formats agree.
ojson json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  const double rounded = std::stod(format_number(v));
  if (rounded == std::floor(rounded) && std::abs(rounded) < 1e15) return static_cast<std::int64_t>(rounded);
  return rounded;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "client",       "mean_tput_mbps", "median_tput_mbps",       "handoffs",
      "mean_handoff_latency_s", "retransmissions", "handoff_retransmissions", "buffered_bits_at_handoff",
      "est_error_m",  "selection_accuracy", "sent",                "delivered",
      "lost_channel", "dropped_buffer",  "in_flight_end",          "ecn_marks"};
  return cols;
}

std::string summary_csv(const MetricsReport& r) {
  std::string out = join_line(summary_columns());
  for (const auto& c : r.clients) {
    std::vector<std::string> cells;
    for (double v : row_values(c)) cells.push_back(format_number(v));
    out += join_line(cells);
  }
  return out;
}

std::string summary_json(const MetricsReport& r) {
  ojson j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["mode"] = to_string(r.mode);
  j["duration_s"] = json_number(r.duration_s);
  j["max_buffer_bits"] = json_number(r.max_buffer_bits);
  ojson rows = ojson::array();
  const auto& cols = summary_columns();
  for (const auto& c : r.clients) {
    ojson row;
    const auto vals = row_values(c);
    for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = json_number(vals[i]);
    rows.push_back(row);
  }
  j["clients"] = rows;
  return j.dump(2) + "\n";
}

std::string handoffs_csv(const MetricsReport& r) {
  std::string out = "t,client,from,to,latency_s,buffered_bits,ap_buffer_bits\n";
  for (const auto& h : r.handoffs) {
    out += join_line({format_number(h.t), std::to_string(h.client), std::to_string(h.from_ap), std::to_string(h.to_ap),
                      h.latency_s < 0 ? "nan" : format_number(h.latency_s), format_number(h.buffered_bits),
                      format_number(h.ap_buffer_bits)});
  }
  return out;
}

std::string packets_csv(const MetricsReport& r) {
  std::string out = "t,event,client,ap,uid,seq,marked\n";
  for (const auto& p : r.packets) {
    out += join_line({format_number(p.t), p.event, std::to_string(p.client), std::to_string(p.ap),
                      std::to_string(p.uid), std::to_string(p.seq), p.marked ? "1" : "0"});
  }
  return out;
}

std::string compare_csv(const CompareReport& c) {
  std::string out = "metric,value\n";
  out += "seeds," + std::to_string(c.seeds.size()) + "\n";
  out += "dirf_mean_tput_mbps," + format_number(c.dirf_mean_tput_mbps) + "\n";
  out += "omrf_mean_tput_mbps," + format_number(c.omrf_mean_tput_mbps) + "\n";
  out += "ratio," + format_number(c.ratio) + "\n";
  for (const auto& [name, v] : c.deltas) out += "delta_" + name + "," + format_number(v) + "\n";
  return out;
}

std::string compare_json(const CompareReport& c) {
  ojson j;
  j["seeds"] = c.seeds;
  j["dirf_mean_tput_mbps"] = json_number(c.dirf_mean_tput_mbps);
  j["omrf_mean_tput_mbps"] = json_number(c.omrf_mean_tput_mbps);
  j["ratio"] = json_number(c.ratio);
  ojson d;
  for (const auto& [name, v] : c.deltas) d[name] = json_number(v);
  j["deltas"] = d.is_null() ? ojson::object() : d;
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_report(const MetricsReport& r, const std::filesystem::path& out_dir,
                                               ReportFormat format) {
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    written.push_back(out_dir / name);
    write_file_atomic(written.back(), text);
  };
  if (format == ReportFormat::kCsv) {
    put("summary.csv", summary_csv(r));
  } else {
    put("summary.json", summary_json(r));
  }
  put("handoffs.csv", handoffs_csv(r));
  if (!r.packets.empty()) put("packets.csv", packets_csv(r));
  return written;
}

}  // namespace beamroam
