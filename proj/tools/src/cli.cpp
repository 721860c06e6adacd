#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "beamroam/error.hpp"
#include "beamroam/report_io.hpp"
#include "beamroam/scenario_io.hpp"
#include "beamroam/sim.hpp"

namespace beamroam::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string format = "csv";
  bool print_rate_table = false;
};

ReportFormat report_format(const Options& o) { return o.format == "json" ? ReportFormat::kJson : ReportFormat::kCsv; }

Scenario load(const std::string& path, const Options& o) {
  Scenario s = load_scenario(path);
  if (o.seed) s.seed = *o.seed;
  return s;
}

void print_rate_table(std::ostream& out) {
  const auto t = PhyRateTable::defaults();
  out << "snr_db,rate_20mhz_mbps,rate_40mhz_mbps\n";
  for (std::size_t i = 0; i < t.mhz20.size(); ++i) {
    out << format_number(t.mhz20[i].snr_threshold_db) << ',' << format_number(t.mhz20[i].rate_mbps) << ','
        << format_number(i < t.mhz40.size() ? t.mhz40[i].rate_mbps : 0.0) << '\n';
  }
}

int cmd_run(const std::string& path, const Options& o, std::ostream& out) {
  const Scenario s = load(path, o);
  const auto report = run(s);
  write_effective_config(s, o.out_dir);
  emit_report(report, o.out_dir, report_format(o));
  out << (o.format == "json" ? summary_json(report) : summary_csv(report));
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, const std::vector<std::uint64_t>& seeds, const Options& o,
                std::ostream& out) {
  const Scenario d = load(a, o);
  const Scenario m = load(b, o);
  const auto c = compare(d, m, seeds);
  const std::string text = o.format == "json" ? compare_json(c) : compare_csv(c);
  write_file_atomic(fs::path(o.out_dir) / (o.format == "json" ? "compare.json" : "compare.csv"), text);
  out << text;
  return 0;
}

int cmd_estimate(const std::string& path, const std::string& scale, const Options& o, std::ostream& out) {
  const auto rows = read_samples_csv(path);
  std::vector<std::pair<double, Vec3>> db;
  for (const auto& r : rows) db.emplace_back(r.snr_db, r.position);
  const auto samples = SampleSet::from_db(db, scale == "db" ? SnrScale::kDecibel : SnrScale::kLinear);
  const auto est = estimate_ap_position(samples);
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["x"] = est.position.x;
    j["y"] = est.position.y;
    j["z"] = est.position.z;
    j["loss"] = est.loss;
    j["iterations"] = est.iterations;
    j["converged"] = est.converged;
    out << j.dump(2) << '\n';
  } else {
    out << "x,y,z,loss,iterations,converged\n"
        << format_number(est.position.x) << ',' << format_number(est.position.y) << ','
        << format_number(est.position.z) << ',' << format_number(est.loss) << ',' << est.iterations << ','
        << (est.converged ? 1 : 0) << '\n';
  }
  return 0;
}

// Samples come from the scenario's channel along the trace, taken under the
// starting AP until the walk first leaves its cell.
int cmd_select(const std::string& trace_path, const std::string& scenario_path, const Options& o, std::ostream& out) {
  const Scenario s = load(scenario_path, o);
  const MobilityTrace trace(read_trace_csv(trace_path));
  const ApLayout layout = directional_layout(s);
  std::vector<HandoffDecision> decisions;
  if (s.selector.kind == SelectorKind::kGreedySnr) {
    decisions = run_greedy_snr(trace, layout, s.antenna, scenario_channel(s));
  } else {
    const int first = nearest_on_floor(layout.positions(), trace.points().front().position);
    const auto lines = switch_lines_for(layout, first);
    const auto ch = scenario_channel(s);
    std::vector<std::pair<double, Vec3>> db;
    for (const auto& p : trace.points()) {
      if (std::any_of(lines.begin(), lines.end(), [&](const SwitchLine& l) { return l.signed_distance(p.position) > 0; }))
        break;
      db.emplace_back(snr_at(layout.ap(first), s.antenna, ch, p.position), p.position);
    }
    SelectionConfig cfg;
    cfg.mode = s.selector.kind == SelectorKind::kLiteral ? SelectorMode::kLiteral : SelectorMode::kRelative;
    cfg.direction_window_s = s.selector.direction_window_s;
    cfg.lookahead_m = s.selector.lookahead_m;
    cfg.exact_estimation = s.selector.exact_estimation;
    cfg.estimator = s.estimator;
    SampleSet samples;
    if (!cfg.exact_estimation) samples = SampleSet::from_db(db, s.snr_scale);
    decisions = run_selection(trace, layout, samples, cfg).decisions;
  }
  out << "t,from,to\n";
  for (const auto& d : decisions) out << format_number(d.t) << ',' << d.from_ap << ',' << d.to_ap << '\n';
  return 0;
}

// --- sweep -----------------------------------------------------------------

struct Vary {
  std::string field;
  std::vector<std::string> values;
};

const std::vector<std::string>& sweep_fields() {
  static const std::vector<std::string> f = {"aps",  "clients",  "speed",   "bandwidth",      "mode",
                                             "scheduler", "seed", "selector", "switch_latency", "transport"};
  return f;
}

double to_number(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("--vary " + field + ": '" + v + "' is not a number");
}

void apply(Scenario& s, const std::string& field, const std::string& v) {
  if (field == "aps") {
    s.layout.grid = true;
    s.layout.aps.clear();
    s.layout.count = static_cast<int>(to_number(field, v));
  } else if (field == "clients") {
    const auto n = static_cast<std::size_t>(to_number(field, v));
    const ClientSpec proto = s.clients.empty() ? ClientSpec{} : s.clients.front();
    s.clients.assign(n, proto);
  } else if (field == "speed") {
    for (auto& c : s.clients) c.trace.speed_mps = to_number(field, v);
  } else if (field == "bandwidth") {
    const int mhz = static_cast<int>(to_number(field, v));
    if (mhz != 20 && mhz != 40) throw UsageError("--vary bandwidth: expected 20 or 40");
    s.bandwidth = bandwidth_from_mhz(mhz);
  } else if (field == "mode") {
    if (v != "dirf" && v != "omrf") throw UsageError("--vary mode: expected dirf or omrf");
    s.mode = v == "dirf" ? RadioMode::kDirf : RadioMode::kOmrf;
  } else if (field == "scheduler") {
    if (v != "on" && v != "off") throw UsageError("--vary scheduler: expected on or off");
    s.scheduler.enabled = v == "on";
  } else if (field == "seed") {
    s.seed = static_cast<std::uint64_t>(to_number(field, v));
  } else if (field == "selector") {
    if (v == "relative") s.selector.kind = SelectorKind::kRelative;
    else if (v == "literal") s.selector.kind = SelectorKind::kLiteral;
    else if (v == "greedy_snr") s.selector.kind = SelectorKind::kGreedySnr;
    else throw UsageError("--vary selector: expected relative, literal or greedy_snr");
  } else if (field == "switch_latency") {
    s.network.switch_latency_s = to_number(field, v);
  } else if (field == "transport") {
    if (v != "tcp" && v != "udp") throw UsageError("--vary transport: expected tcp or udp");
    s.workload.transport = v == "tcp" ? Transport::kTcp : Transport::kUdp;
  }
}

Vary parse_vary(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError("--vary expects field=v1,v2,... (got '" + spec + "')");
  }
  Vary v{spec.substr(0, eq), {}};
  const auto& fields = sweep_fields();
  if (std::find(fields.begin(), fields.end(), v.field) == fields.end()) {
    std::string all;
    for (const auto& f : fields) all += (all.empty() ? "" : ", ") + f;
    throw UsageError("--vary: unknown field '" + v.field + "' (one of " + all + ")");
  }
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("--vary " + v.field + ": empty value");
    v.values.push_back(item);
  }
  return v;
}

struct Variant {
  std::vector<std::string> values;
  Scenario scenario;
  std::string dir;
};

int cmd_sweep(const std::string& path, const std::vector<std::string>& vary_specs, int jobs, const Options& o,
              std::ostream& out) {
  if (vary_specs.empty()) throw UsageError("sweep needs at least one --vary");
  const Scenario base = load(path, o);
  std::vector<Vary> vary;
  for (const auto& v : vary_specs) vary.push_back(parse_vary(v));

  // Cartesian product, first --vary slowest.
  std::vector<Variant> variants{{{}, base, ""}};
  for (const auto& v : vary) {
    std::vector<Variant> next;
    for (const auto& partial : variants) {
      for (const auto& value : v.values) {
        Variant x = partial;
        x.values.push_back(value);
        apply(x.scenario, v.field, value);
        x.dir += (x.dir.empty() ? "" : "_") + v.field + "-" + value;
        next.push_back(std::move(x));
      }
    }
    variants = std::move(next);
  }
  for (auto& v : variants) {
    v.scenario.name = base.name + "[" + v.dir + "]";
    try {
      v.scenario.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.code(), e.field(), 0, "variant " + v.dir + ": " + e.what());
    }
  }

  std::vector<MetricsReport> reports(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < variants.size(); i = next++) {
      try {
        const fs::path dir = fs::path(o.out_dir) / variants[i].dir;
        reports[i] = run(variants[i].scenario);
        write_effective_config(variants[i].scenario, dir);
        emit_report(reports[i], dir, report_format(o));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(
      variants.size(), jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::vector<std::string> metrics = {"mean_tput_mbps", "handoffs", "retransmissions",
                                            "handoff_retransmissions", "mean_handoff_latency_s"};
  auto values_of = [](const MetricsReport& r) {
    double retx = 0, hretx = 0, lat = 0;
    int lat_n = 0;
    for (const auto& c : r.clients) {
      retx += static_cast<double>(c.retransmissions);
      hretx += static_cast<double>(c.handoff_retransmissions);
      if (c.handoffs > 0) {
        lat += c.mean_handoff_latency_s;
        ++lat_n;
      }
    }
    return std::vector<double>{r.mean_client_tput_mbps(), static_cast<double>(r.total_handoffs()), retx, hretx,
                               lat_n ? lat / lat_n : std::nan("")};
  };

  std::string text;
  if (o.format == "json") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < variants.size(); ++i) {
      nlohmann::ordered_json row;
      for (std::size_t k = 0; k < vary.size(); ++k) row[vary[k].field] = variants[i].values[k];
      const auto vals = values_of(reports[i]);
      for (std::size_t k = 0; k < metrics.size(); ++k) {
        row[metrics[k]] = std::isnan(vals[k]) ? nlohmann::ordered_json(nullptr)
                                              : nlohmann::ordered_json(std::stod(format_number(vals[k])));
      }
      rows.push_back(row);
    }
    text = rows.dump(2) + "\n";
  } else {
    for (const auto& v : vary) text += v.field + ",";
    for (std::size_t k = 0; k < metrics.size(); ++k) text += metrics[k] + (k + 1 < metrics.size() ? "," : "\n");
    for (std::size_t i = 0; i < variants.size(); ++i) {
      for (const auto& v : variants[i].values) text += v + ",";
      const auto vals = values_of(reports[i]);
      for (std::size_t k = 0; k < vals.size(); ++k) text += format_number(vals[k]) + (k + 1 < vals.size() ? "," : "\n");
    }
  }
  write_file_atomic(fs::path(o.out_dir) / (o.format == "json" ? "sweep.json" : "sweep.csv"), text);
  out << text;
  return 0;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kParseError:
    case ErrorCode::kValidationError:
    case ErrorCode::kInvalidScenario:
    case ErrorCode::kMismatchedScenarios:
    case ErrorCode::kInvalidArgument:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mobility-aware AP selection and handoff scheduling simulator", "beamroam"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  Options o;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--out-dir", o.out_dir, "Directory for reports")->capture_default_str();
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--print-rate-table", o.print_rate_table, "Print the SNR to rate table and exit");

  std::string scenario, scenario_b, samples, trace, scale = "linear";
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> vary;
  int jobs = 0;

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  run_cmd->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "Run a dirf and an omrf scenario over the same seeds");
  cmp_cmd->add_option("dirf", scenario, "Directional scenario")->required();
  cmp_cmd->add_option("omrf", scenario_b, "Omni scenario")->required();
  cmp_cmd->add_option("--seeds", seeds, "Seeds to average over")->delimiter(',');

  auto* est_cmd = app.add_subcommand("estimate", "Estimate an AP position from SNR samples");
  est_cmd->add_option("samples", samples, "CSV with t,x,y,z,snr_db")->required();
  est_cmd->add_option("--snr-scale", scale, "How dB readings become ranks")
      ->check(CLI::IsMember({"linear", "db"}))
      ->capture_default_str();

  auto* sel_cmd = app.add_subcommand("select", "Replay a trace through the AP selector");
  sel_cmd->add_option("trace", trace, "CSV with t,x,y,z")->required();
  sel_cmd->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a grid of parameter values");
  sweep_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
  sweep_cmd->add_option("--vary", vary, "field=v1,v2,... (repeatable)")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  if (*seed_opt) o.seed = seed;

  try {
    if (o.print_rate_table) {
      print_rate_table(out);
      if (app.get_subcommands().empty()) return 0;
    }
    if (app.get_subcommands().empty()) {
      err << app.help();
      return 1;
    }
    if (*run_cmd) return cmd_run(scenario, o, out);
    if (*cmp_cmd) return cmd_compare(scenario, scenario_b, seeds, o, out);
    if (*est_cmd) return cmd_estimate(samples, scale, o, out);
    if (*sel_cmd) return cmd_select(trace, scenario, o, out);
    if (*sweep_cmd) return cmd_sweep(scenario, vary, jobs, o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace beamroam::cli
