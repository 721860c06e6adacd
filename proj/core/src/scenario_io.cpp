#include "beamroam/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "beamroam/error.hpp"

namespace beamroam {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Walks a parsed document, tracking the dotted path for diagnostics. JSON
// parsers drop locations, so the line is recovered by finding the key in
// the source text.
class Reader {
 public:
  Reader(std::string_view text, std::filesystem::path base) : text_(text), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what, ErrorCode code = ErrorCode::kParseError) const {
    const int line = locate(field);
    std::string msg = field + ": " + what;
    if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
    throw ConfigError(code, field, line, msg);
  }

  void only(const json& obj, const std::string& field, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(field, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end()) {
        fail(join(field, k), "unknown field");
      }
    }
  }

  void number(const json& obj, const std::string& field, const char* key, double& out) const {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(join(field, key), "expected a number");
    out = v.get<double>();
  }

  template <typename Int>
  void integer(const json& obj, const std::string& field, const char* key, Int& out) const {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(field, key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = static_cast<Int>(v.get<std::uint64_t>());
      } else {
        if (v.get<std::int64_t>() < 0) fail(join(field, key), "must be non-negative");
        out = static_cast<Int>(v.get<std::int64_t>());
      }
    } else {
      out = static_cast<Int>(v.get<std::int64_t>());
    }
  }

  void boolean(const json& obj, const std::string& field, const char* key, bool& out) const {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(join(field, key), "expected true or false");
    out = v.get<bool>();
  }

  std::string string(const json& obj, const std::string& field, const char* key, const std::string& dflt) const {
    if (!obj.contains(key)) return dflt;
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(join(field, key), "expected a string");
    return v.get<std::string>();
  }

  template <typename E>
  void choice(const json& obj, const std::string& field, const char* key, E& out,
              std::initializer_list<std::pair<const char*, E>> options) const {
    if (!obj.contains(key)) return;
    const std::string v = string(obj, field, key, "");
    for (const auto& [name, e] : options) {
      if (v == name) {
        out = e;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, e] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    fail(join(field, key), "'" + v + "' is not one of " + allowed);
  }

  Vec3 vec3(const json& v, const std::string& field) const {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      fail(field, "expected [x, y, z]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  void vec3(const json& obj, const std::string& field, const char* key, Vec3& out) const {
    if (obj.contains(key)) out = vec3(obj.at(key), join(field, key));
  }

  const std::filesystem::path& base() const { return base_; }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

 private:
  int locate(const std::string& field) const {
    // Last path component without any [index] suffix.
    std::string key = field.substr(field.find_last_of('.') == std::string::npos ? 0 : field.find_last_of('.') + 1);
    key = key.substr(0, key.find('['));
    if (key.empty()) return 0;
    const auto pos = text_.find("\"" + key + "\"");
    return pos == std::string_view::npos ? 0 : line_of_offset(text_, pos);
  }

  std::string_view text_;
  std::filesystem::path base_;
};

void read_trace(const Reader& r, const json& j, const std::string& f, TraceSpec& t) {
  r.only(j, f,
         {"kind", "speed_mps", "warmup_m", "height_m", "start_offset", "cyclic", "start", "heading_deg", "waypoints",
          "file"});
  r.choice(j, f, "kind", t.kind,
           {{"tour", TraceKind::kTour},
            {"straight", TraceKind::kStraight},
            {"random_waypoint", TraceKind::kRandomWaypoint},
            {"static", TraceKind::kStatic},
            {"waypoints", TraceKind::kWaypoints},
            {"file", TraceKind::kFile}});
  r.number(j, f, "speed_mps", t.speed_mps);
  r.number(j, f, "warmup_m", t.warmup_m);
  r.number(j, f, "height_m", t.height_m);
  r.integer(j, f, "start_offset", t.start_offset);
  r.boolean(j, f, "cyclic", t.cyclic);
  r.vec3(j, f, "start", t.start);
  r.number(j, f, "heading_deg", t.heading_deg);
  if (j.contains("waypoints")) {
    const auto& w = j.at("waypoints");
    if (!w.is_array()) r.fail(f + ".waypoints", "expected a list of [x, y, z]");
    for (std::size_t i = 0; i < w.size(); ++i) t.waypoints.push_back(r.vec3(w[i], f + ".waypoints[" + std::to_string(i) + "]"));
  }
  t.file = r.string(j, f, "file", "");
  if (t.kind == TraceKind::kFile) {
    if (t.file.empty()) r.fail(f + ".file", "a file trace needs a path", ErrorCode::kValidationError);
    std::filesystem::path p(t.file);
    if (p.is_relative() && !r.base().empty()) p = r.base() / p;
    t.file = std::filesystem::absolute(p).lexically_normal().string();
    try {
      t.points = read_trace_csv(t.file);
    } catch (const Error& e) {
      r.fail(f + ".file", e.what(), ErrorCode::kValidationError);
    }
  }
}

Scenario from_json(const json& doc, const Reader& r) {
  Scenario s;
  r.only(doc, "",
         {"schema_version", "name", "seed", "duration_s", "mode", "bandwidth_mhz", "room", "layout", "antenna", "channel",
          "loss", "clients", "workload", "selector", "estimator", "scheduler", "network", "output"});
  int version = kSchemaVersion;
  r.integer(doc, "", "schema_version", version);
  if (version != kSchemaVersion) r.fail("schema_version", "unsupported version " + std::to_string(version));
  s.name = r.string(doc, "", "name", s.name);
  r.integer(doc, "", "seed", s.seed);
  r.number(doc, "", "duration_s", s.duration_s);
  r.choice(doc, "", "mode", s.mode, {{"dirf", RadioMode::kDirf}, {"omrf", RadioMode::kOmrf}});
  if (doc.contains("bandwidth_mhz")) {
    int mhz = 20;
    r.integer(doc, "", "bandwidth_mhz", mhz);
    if (mhz != 20 && mhz != 40) r.fail("bandwidth_mhz", "must be 20 or 40", ErrorCode::kValidationError);
    s.bandwidth = bandwidth_from_mhz(mhz);
  }

  if (doc.contains("room")) {
    const auto& j = doc.at("room");
    r.only(j, "room", {"x_min", "x_max", "y_min", "y_max", "ceiling_m"});
    r.number(j, "room", "x_min", s.room.x_min);
    r.number(j, "room", "x_max", s.room.x_max);
    r.number(j, "room", "y_min", s.room.y_min);
    r.number(j, "room", "y_max", s.room.y_max);
    r.number(j, "room", "ceiling_m", s.room.ceiling_m);
  }

  if (doc.contains("antenna")) {
    const auto& j = doc.at("antenna");
    r.only(j, "antenna", {"boresight_gain_db", "beamwidth_deg", "back_lobe_db"});
    r.number(j, "antenna", "boresight_gain_db", s.antenna.boresight_gain_db);
    r.number(j, "antenna", "beamwidth_deg", s.antenna.beamwidth_deg);
    r.number(j, "antenna", "back_lobe_db", s.antenna.back_lobe_db);
  }

  if (doc.contains("layout")) {
    const auto& j = doc.at("layout");
    r.only(j, "layout", {"kind", "count", "aps"});
    const std::string kind = r.string(j, "layout", "kind", "grid");
    if (kind == "grid") {
      s.layout.grid = true;
      r.integer(j, "layout", "count", s.layout.count);
      if (j.contains("aps")) r.fail("layout.aps", "only explicit layouts list APs");
    } else if (kind == "explicit") {
      s.layout.grid = false;
      if (!j.contains("aps") || !j.at("aps").is_array()) r.fail("layout.aps", "explicit layout needs an aps list");
      const auto& aps = j.at("aps");
      for (std::size_t i = 0; i < aps.size(); ++i) {
        const std::string f = "layout.aps[" + std::to_string(i) + "]";
        r.only(aps[i], f, {"position", "boresight", "beamwidth_deg", "boresight_gain_db"});
        ApDescriptor ap;
        ap.id = static_cast<int>(i);
        ap.beamwidth_deg = s.antenna.beamwidth_deg;
        ap.boresight_gain_db = s.antenna.boresight_gain_db;
        if (!aps[i].contains("position")) r.fail(f + ".position", "missing");
        r.vec3(aps[i], f, "position", ap.position);
        r.vec3(aps[i], f, "boresight", ap.boresight);
        r.number(aps[i], f, "beamwidth_deg", ap.beamwidth_deg);
        r.number(aps[i], f, "boresight_gain_db", ap.boresight_gain_db);
        s.layout.aps.push_back(ap);
      }
      s.layout.count = static_cast<int>(s.layout.aps.size());
    } else {
      r.fail("layout.kind", "'" + kind + "' is not one of grid, explicit");
    }
  }

  if (doc.contains("channel")) {
    const auto& j = doc.at("channel");
    r.only(j, "channel",
           {"ref_loss_db", "path_loss_exponent", "tx_power_dbm", "noise_floor_dbm", "shadowing_sigma_db",
            "shadowing_cell_m"});
    r.number(j, "channel", "ref_loss_db", s.channel.ref_loss_db);
    r.number(j, "channel", "path_loss_exponent", s.channel.path_loss_exponent);
    r.number(j, "channel", "tx_power_dbm", s.channel.tx_power_dbm);
    r.number(j, "channel", "noise_floor_dbm", s.channel.noise_floor_dbm);
    r.number(j, "channel", "shadowing_sigma_db", s.channel.shadowing_sigma_db);
    r.number(j, "channel", "shadowing_cell_m", s.channel.shadowing_cell_m);
  }

  if (doc.contains("loss")) {
    const auto& j = doc.at("loss");
    r.only(j, "loss", {"low_snr_db", "high_snr_db", "p_low", "p_mid", "p_high", "k_mobility"});
    r.number(j, "loss", "low_snr_db", s.loss.low_snr_db);
    r.number(j, "loss", "high_snr_db", s.loss.high_snr_db);
    r.number(j, "loss", "p_low", s.loss.p_low);
    r.number(j, "loss", "p_mid", s.loss.p_mid);
    r.number(j, "loss", "p_high", s.loss.p_high);
    r.number(j, "loss", "k_mobility", s.loss.k_mobility);
  }

  if (doc.contains("clients")) {
    const auto& j = doc.at("clients");
    if (!j.is_array()) r.fail("clients", "expected a list");
    s.clients.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string f = "clients[" + std::to_string(i) + "]";
      r.only(j[i], f, {"trace"});
      ClientSpec c;
      if (j[i].contains("trace")) read_trace(r, j[i].at("trace"), f + ".trace", c.trace);
      s.clients.push_back(c);
    }
  }

  if (doc.contains("workload")) {
    const auto& j = doc.at("workload");
    r.only(j, "workload", {"transport", "packet_bytes", "duration_s"});
    r.choice(j, "workload", "transport", s.workload.transport, {{"tcp", Transport::kTcp}, {"udp", Transport::kUdp}});
    r.number(j, "workload", "packet_bytes", s.workload.packet_bytes);
    r.number(j, "workload", "duration_s", s.workload.duration_s);
  }

  if (doc.contains("selector")) {
    const auto& j = doc.at("selector");
    r.only(j, "selector", {"mode", "direction_window_s", "lookahead_m", "exact_estimation"});
    r.choice(j, "selector", "mode", s.selector.kind,
             {{"relative", SelectorKind::kRelative},
              {"literal", SelectorKind::kLiteral},
              {"greedy_snr", SelectorKind::kGreedySnr}});
    r.number(j, "selector", "direction_window_s", s.selector.direction_window_s);
    r.number(j, "selector", "lookahead_m", s.selector.lookahead_m);
    r.boolean(j, "selector", "exact_estimation", s.selector.exact_estimation);
  }

  if (doc.contains("estimator")) {
    const auto& j = doc.at("estimator");
    auto& e = s.estimator;
    r.only(j, "estimator",
           {"learning_rate", "max_iters", "grad_tol", "lr_growth", "init", "ceiling_height_m", "snr_scale",
            "pair_strategy", "max_all_pairs", "pairs_per_sample", "pair_seed"});
    r.number(j, "estimator", "learning_rate", e.learning_rate);
    r.integer(j, "estimator", "max_iters", e.max_iters);
    r.number(j, "estimator", "grad_tol", e.grad_tol);
    r.number(j, "estimator", "lr_growth", e.lr_growth);
    if (j.contains("init")) {
      const auto& v = j.at("init");
      if (v.is_string() && v.get<std::string>() == "centroid") {
        e.init = InitStrategy::kCentroidAtCeiling;
      } else {
        e.init = InitStrategy::kExplicit;
        e.init_point = r.vec3(v, "estimator.init");
      }
    }
    r.number(j, "estimator", "ceiling_height_m", e.ceiling_height_m);
    r.choice(j, "estimator", "snr_scale", s.snr_scale, {{"linear", SnrScale::kLinear}, {"db", SnrScale::kDecibel}});
    r.choice(j, "estimator", "pair_strategy", e.pairs.strategy,
             {{"auto", PairStrategy::kAuto}, {"all", PairStrategy::kAllPairs}, {"random", PairStrategy::kRandomPairs}});
    r.integer(j, "estimator", "max_all_pairs", e.pairs.max_all_pairs);
    r.integer(j, "estimator", "pairs_per_sample", e.pairs.random_pairs_per_sample);
    r.integer(j, "estimator", "pair_seed", e.pairs.seed);
  }

  if (doc.contains("scheduler")) {
    const auto& j = doc.at("scheduler");
    auto& c = s.scheduler;
    r.only(j, "scheduler", {"enabled", "mss_bits", "rtt_s", "buffer_bits", "safety_factor", "marking_mode"});
    r.boolean(j, "scheduler", "enabled", c.enabled);
    r.number(j, "scheduler", "mss_bits", c.mss_bits);
    r.number(j, "scheduler", "rtt_s", c.rtt_s);
    r.number(j, "scheduler", "buffer_bits", c.buffer_bits);
    r.number(j, "scheduler", "safety_factor", c.safety_factor);
    r.choice(j, "scheduler", "marking_mode", c.marking_mode,
             {{"stride", MarkingMode::kDeterministicStride}, {"random", MarkingMode::kSeededRandom}});
  }

  if (doc.contains("network")) {
    const auto& j = doc.at("network");
    auto& n = s.network;
    r.only(j, "network",
           {"switch_latency_s", "rto_s", "wired_delay_s", "controller_delay_s", "max_window_pkts",
            "initial_window_pkts", "report_interval_s", "mac_overhead"});
    r.number(j, "network", "switch_latency_s", n.switch_latency_s);
    r.number(j, "network", "rto_s", n.rto_s);
    r.number(j, "network", "wired_delay_s", n.wired_delay_s);
    r.number(j, "network", "controller_delay_s", n.controller_delay_s);
    r.number(j, "network", "max_window_pkts", n.max_window_pkts);
    r.number(j, "network", "initial_window_pkts", n.initial_window_pkts);
    r.number(j, "network", "report_interval_s", n.report_interval_s);
    r.number(j, "network", "mac_overhead", n.mac_overhead);
  }

  if (doc.contains("output")) {
    const auto& j = doc.at("output");
    r.only(j, "output", {"packet_trace"});
    r.boolean(j, "output", "packet_trace", s.packet_trace);
  }

  try {
    s.validate();
  } catch (const ConfigError& e) {
    r.fail(e.field(), std::string(e.what()).substr(e.field().size() + 2), ErrorCode::kValidationError);
  }
  return s;
}

ojson vec(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

const char* pair_name(PairStrategy p) {
  switch (p) {
    case PairStrategy::kAuto: return "auto";
    case PairStrategy::kAllPairs: return "all";
    case PairStrategy::kRandomPairs: return "random";
  }
  return "auto";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

// Rows of a numeric CSV whose header must start with the given columns.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  int lineno = 0;
  std::vector<std::vector<double>> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!header) {
      if (cells.size() < columns.size() || !std::equal(columns.begin(), columns.end(), cells.begin())) {
        std::string want;
        for (const auto& c : columns) want += (want.empty() ? "" : ",") + c;
        throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": header must be " + want);
      }
      header = true;
      continue;
    }
    if (cells.size() < columns.size()) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                              std::to_string(columns.size()) + " columns");
    }
    std::vector<double> row;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cells[i], &used));
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": column " + columns[i] +
                                                " is not a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header) throw Error(ErrorCode::kParseError, path.string() + ": missing header");
  return rows;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(ErrorCode::kParseError, "", line, "line " + std::to_string(line) + ": " + e.what());
  }
  Reader r(text, base_dir);
  return from_json(doc, r);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kIoError, "", 0, e.what());
  }
  return parse_scenario(text, path.parent_path());
}

std::string serialize_scenario(const Scenario& s) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["duration_s"] = s.duration_s;
  j["mode"] = to_string(s.mode);
  j["bandwidth_mhz"] = bandwidth_mhz(s.bandwidth);
  j["room"] = {{"x_min", s.room.x_min},
               {"x_max", s.room.x_max},
               {"y_min", s.room.y_min},
               {"y_max", s.room.y_max},
               {"ceiling_m", s.room.ceiling_m}};
  if (s.layout.grid) {
    j["layout"] = {{"kind", "grid"}, {"count", s.layout.count}};
  } else {
    ojson aps = ojson::array();
    for (const auto& ap : s.layout.aps) {
      aps.push_back({{"position", vec(ap.position)},
                     {"boresight", vec(ap.boresight)},
                     {"beamwidth_deg", ap.beamwidth_deg},
                     {"boresight_gain_db", ap.boresight_gain_db}});
    }
    j["layout"] = {{"kind", "explicit"}, {"aps", aps}};
  }
  j["antenna"] = {{"boresight_gain_db", s.antenna.boresight_gain_db},
                  {"beamwidth_deg", s.antenna.beamwidth_deg},
                  {"back_lobe_db", s.antenna.back_lobe_db}};
  j["channel"] = {{"ref_loss_db", s.channel.ref_loss_db},
                  {"path_loss_exponent", s.channel.path_loss_exponent},
                  {"tx_power_dbm", s.channel.tx_power_dbm},
                  {"noise_floor_dbm", s.channel.noise_floor_dbm},
                  {"shadowing_sigma_db", s.channel.shadowing_sigma_db},
                  {"shadowing_cell_m", s.channel.shadowing_cell_m}};
  j["loss"] = {{"low_snr_db", s.loss.low_snr_db}, {"high_snr_db", s.loss.high_snr_db}, {"p_low", s.loss.p_low},
               {"p_mid", s.loss.p_mid},           {"p_high", s.loss.p_high},           {"k_mobility", s.loss.k_mobility}};
  ojson clients = ojson::array();
  for (const auto& c : s.clients) {
    const auto& t = c.trace;
    ojson tr = {{"kind", to_string(t.kind)},     {"speed_mps", t.speed_mps},       {"warmup_m", t.warmup_m},
                {"height_m", t.height_m},        {"start_offset", t.start_offset}, {"cyclic", t.cyclic},
                {"start", vec(t.start)},         {"heading_deg", t.heading_deg}};
    ojson w = ojson::array();
    for (const auto& p : t.waypoints) w.push_back(vec(p));
    tr["waypoints"] = w;
    tr["file"] = t.file;
    clients.push_back({{"trace", tr}});
  }
  j["clients"] = clients;
  j["workload"] = {{"transport", to_string(s.workload.transport)},
                   {"packet_bytes", s.workload.packet_bytes},
                   {"duration_s", s.workload.duration_s}};
  j["selector"] = {{"mode", to_string(s.selector.kind)},
                   {"direction_window_s", s.selector.direction_window_s},
                   {"lookahead_m", s.selector.lookahead_m},
                   {"exact_estimation", s.selector.exact_estimation}};
  const auto& e = s.estimator;
  j["estimator"] = {{"learning_rate", e.learning_rate},
                    {"max_iters", e.max_iters},
                    {"grad_tol", e.grad_tol},
                    {"lr_growth", e.lr_growth},
                    {"init", e.init == InitStrategy::kCentroidAtCeiling ? ojson("centroid") : vec(e.init_point)},
                    {"ceiling_height_m", e.ceiling_height_m},
                    {"snr_scale", s.snr_scale == SnrScale::kLinear ? "linear" : "db"},
                    {"pair_strategy", pair_name(e.pairs.strategy)},
                    {"max_all_pairs", e.pairs.max_all_pairs},
                    {"pairs_per_sample", e.pairs.random_pairs_per_sample},
                    {"pair_seed", e.pairs.seed}};
  const auto& c = s.scheduler;
  j["scheduler"] = {{"enabled", c.enabled},
                    {"mss_bits", c.mss_bits},
                    {"rtt_s", c.rtt_s},
                    {"buffer_bits", c.buffer_bits},
                    {"safety_factor", c.safety_factor},
                    {"marking_mode", c.marking_mode == MarkingMode::kDeterministicStride ? "stride" : "random"}};
  const auto& n = s.network;
  j["network"] = {{"switch_latency_s", n.switch_latency_s},
                  {"rto_s", n.rto_s},
                  {"wired_delay_s", n.wired_delay_s},
                  {"controller_delay_s", n.controller_delay_s},
                  {"max_window_pkts", n.max_window_pkts},
                  {"initial_window_pkts", n.initial_window_pkts},
                  {"report_interval_s", n.report_interval_s},
                  {"mac_overhead", n.mac_overhead}};
  j["output"] = {{"packet_trace", s.packet_trace}};
  return j.dump(2) + "\n";
}

void write_effective_config(const Scenario& s, const std::filesystem::path& out_dir) {
  write_file_atomic(out_dir / "effective_config.json", serialize_scenario(s));
}

std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path) {
  std::vector<TracePoint> out;
  for (const auto& r : read_numeric_csv(path, {"t", "x", "y", "z"})) out.push_back({r[0], {r[1], r[2], r[3]}});
  if (out.empty()) throw Error(ErrorCode::kParseError, path.string() + ": no samples");
  return out;
}

std::vector<SampleRow> read_samples_csv(const std::filesystem::path& path) {
  std::vector<SampleRow> out;
  for (const auto& r : read_numeric_csv(path, {"t", "x", "y", "z", "snr_db"})) {
    out.push_back({r[0], {r[1], r[2], r[3]}, r[4]});
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    out << text;
    if (!out.flush()) throw Error(ErrorCode::kIoError, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename " + tmp + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace beamroam
