#include <cmath>
#include <limits>

#include "beamroam/error.hpp"
#include "beamroam/sim.hpp"

namespace beamroam {

namespace {

double mean_of(const MetricsReport& r, double ClientMetrics::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : r.clients) {
    if (std::isnan(c.*field)) continue;
    sum += c.*field;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

double mean_count(const MetricsReport& r, std::uint64_t ClientMetrics::*field) {
  if (r.clients.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : r.clients) sum += static_cast<double>(c.*field);
  return sum / static_cast<double>(r.clients.size());
}

}  // namespace

CompareReport compare(const Scenario& dirf, const Scenario& omrf, const std::vector<std::uint64_t>& seeds) {
  Scenario probe = omrf;
  probe.mode = dirf.mode;
  probe.name = dirf.name;
  if (!(probe == dirf)) {
    throw Error(ErrorCode::kMismatchedScenarios, "compare: scenarios differ in more than mode and name");
  }
  if (dirf.mode != RadioMode::kDirf || omrf.mode != RadioMode::kOmrf) {
    throw Error(ErrorCode::kMismatchedScenarios, "compare: expected a dirf scenario and an omrf scenario");
  }

  CompareReport out;
  out.seeds = seeds.empty() ? std::vector<std::uint64_t>{dirf.seed} : seeds;

  struct Acc {
    double tput = 0, median = 0, handoffs = 0, latency = 0, retx = 0, lost = 0;
  } a, b;
  auto accumulate = [](Acc& acc, const MetricsReport& r) {
    acc.tput += r.mean_client_tput_mbps();
    acc.median += mean_of(r, &ClientMetrics::median_tput_mbps);
    acc.handoffs += mean_count(r, &ClientMetrics::handoffs);
    const double lat = mean_of(r, &ClientMetrics::mean_handoff_latency_s);
    acc.latency += std::isnan(lat) ? 0.0 : lat;
    acc.retx += mean_count(r, &ClientMetrics::retransmissions);
    acc.lost += mean_count(r, &ClientMetrics::lost_channel);
  };
  for (auto seed : out.seeds) {
    Scenario d = dirf, o = omrf;
    d.seed = o.seed = seed;
    accumulate(a, run(d));
    accumulate(b, run(o));
  }
  const double n = static_cast<double>(out.seeds.size());
  out.dirf_mean_tput_mbps = a.tput / n;
  out.omrf_mean_tput_mbps = b.tput / n;
  out.ratio = out.omrf_mean_tput_mbps > 0 ? out.dirf_mean_tput_mbps / out.omrf_mean_tput_mbps
                                          : std::numeric_limits<double>::infinity();
  out.deltas = {{"mean_tput_mbps", (a.tput - b.tput) / n},
                {"median_tput_mbps", (a.median - b.median) / n},
                {"handoffs", (a.handoffs - b.handoffs) / n},
                {"mean_handoff_latency_s", (a.latency - b.latency) / n},
                {"retransmissions", (a.retx - b.retx) / n},
                {"lost_channel", (a.lost - b.lost) / n}};
  return out;
}

}  // namespace beamroam
