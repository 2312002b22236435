// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "msim/config.hpp"
#include "msim/montecarlo.hpp"
#include "msim/msim.h"
#include "msim/pathspace.hpp"
#include "msim/predict.hpp"
#include "msim/relativity.hpp"
#include "msim/report.hpp"
#include "oracles.hpp"

using namespace msim;

namespace {

constexpr int kGrid = 24;
constexpr double kTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string fixture(const char* name) { return std::string(MSIM_FIXTURE_DIR) + "/" + name; }

std::string serialize(const std::vector<EventRecord>& events) {
  std::ostringstream os;
  write_events(os, events);
  return os.str();
}

double z_score(double observed_fraction, double p, double n) {
  return std::abs(observed_fraction - p) / std::sqrt(p * (1.0 - p) / n);
}

Outcome closed_form_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto paths = subensemble_paths(Subensemble::Long);
  double worst = 0.0;
  oracle::for_grid(kGrid, [&](double a, double b, double g) {
    const PhaseSettings ph(a, b, g);
    for (int s : {+1, -1})
      for (int w : {+1, -1}) {
        JointAmplitude sum = 0.0;
        for (const auto& p : paths) sum += joint_amplitude(p, {s, w}, ph);
        worst = std::max(worst, std::abs(std::norm(sum) - oracle::qm_joint(s, w, a, b, g)));
      }
  });
  const double dt = seconds_since(t0);
  return {worst <= kTol && dt < 5.0, fmt("max |error| %.3g over %d^3 grid, %.3f s", worst, kGrid, dt)};
}

Outcome correlator_identities() {
  double worst = 0.0;
  oracle::for_grid(kGrid, [&](double a, double b, double g) {
    const auto c = qm_correlators(PhaseSettings(a, b, g));
    worst = std::max({worst, std::abs(c.e_sigma_omega - 2.0 / 3.0 * std::cos(a + g)),
                      std::abs(c.e_sigma - 2.0 / 3.0 * std::cos(a + b)),
                      std::abs(c.e_omega - 2.0 / 3.0 * std::cos(g - b))});
  });
  return {worst <= kTol, fmt("max |error| %.3g", worst)};
}

Outcome t1_equals_qm() {
  double worst = 0.0;
  oracle::for_grid(kGrid, [&](double a, double b, double g) {
    const PhaseSettings ph(a, b, g);
    const auto ms = ms_joint(Timing::T1, ph);
    for (int s : {+1, -1})
      for (int w : {+1, -1})
        worst = std::max(worst, std::abs(ms.at(s, w) - oracle::qm_joint(s, w, a, b, g)));
  });
  // The kernel composes priors, 50/50 before-impacts and ratio conditionals.
  const auto chain_class = timing_class(Timing::T1).to_string();
  return {worst <= kTol, fmt("max |MS(T1) - QM| %.3g, class %s", worst, chain_class.c_str())};
}

Outcome t2_marginal() {
  double worst = 0.0;
  oracle::for_grid(kGrid, [&](double a, double b, double g) {
    const auto t = ms_joint(Timing::T2, PhaseSettings(a, b, g));
    for (int s : {+1, -1}) worst = std::max(worst, std::abs(t.marginal(s) - 3.0 / 32.0));
  });
  const double qm = qm_joint(PhaseSettings(0.0, 0.0, 0.0)).marginal(+1);
  const bool contradicts = std::abs(qm - 5.0 / 32.0) <= 1e-15;
  return {worst <= 1e-15 && contradicts,
          fmt("max |P - 3/32| %.3g; QM at alpha=beta=0: %.17g (5/32)", worst, qm)};
}

Outcome motion_experiment() {
  const PhaseSettings zero(0.0, 0.0, 0.0);
  const double qm = qm_correlators(zero).e_sigma;
  const double ms = ms_correlators(Timing::T2, zero).e_sigma;
  return {std::abs(qm - 2.0 / 3.0) <= 1e-15 && ms == 0.0,
          fmt("E_sigma QM %.17g, MS(T2) %.17g", qm, ms)};
}

Outcome rest_experiment() {
  msim_config* cfg = nullptr;
  if (msim_config_default(&cfg) != MSIM_OK) return {false, msim_last_error()};
  char* raw = nullptr;
  const auto status = msim_scan(cfg, MSIM_TIMING_T3, MSIM_PHASE_BETA, 0.0, oracle::kPi, 25,
                                MSIM_Q_E_SIGMA_OMEGA, MSIM_FORMAT_CSV, &raw);
  msim_config_free(cfg);
  if (status != MSIM_OK) return {false, msim_last_error()};
  std::istringstream csv(raw);
  msim_string_free(raw);
  std::string line;
  std::getline(csv, line);
  double worst = 0.0, at_half_pi = NAN, at_zero = NAN;
  int rows = 0;
  while (std::getline(csv, line)) {
    double beta = 0, qm = 0, ms = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &beta, &qm, &ms) != 3) return {false, line};
    worst = std::max({worst, std::abs(qm - 2.0 / 3.0),
                      std::abs(ms - oracle::rest_experiment_ms(beta))});
    if (rows == 0) at_zero = ms;
    if (rows == 12) at_half_pi = ms;
    ++rows;
  }
  const bool pass = rows == 25 && worst <= kTol && std::abs(at_half_pi - 2.0 / 9.0) <= kTol &&
                    std::abs(at_zero - 2.0 / 3.0) <= kTol;
  return {pass, fmt("%d rows, max |error| %.3g, MS at beta=pi/2 %.15g, at 0 %.15g", rows,
                    worst, at_half_pi, at_zero)};
}

Outcome negativity() {
  msim_config* cfg = nullptr;
  if (msim_config_load_file(fixture("moving_t2.json").c_str(), &cfg) != MSIM_OK)
    return {false, msim_last_error()};
  msim_prediction* p = nullptr;
  msim_prediction_values v{};
  const bool got = msim_predict(cfg, MSIM_THEORY_MS, MSIM_TIMING_AUTO, &p) == MSIM_OK &&
                   msim_prediction_values_get(p, &v) == MSIM_OK;
  msim_prediction_free(p);
  msim_config_free(cfg);
  if (!got) return {false, msim_last_error()};
  const std::string cmd = std::string("\"") + MSIM_CLI_PATH + "\" simulate --config \"" +
                          fixture("moving_t2.json") + "\" --trials 1000 > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const bool pass = v.joint[0][1] == -1.0 / 64.0 && v.valid == 0 && code == 2;
  return {pass, fmt("joint(+,-) = %.17g, valid=%d, simulate exit %d", v.joint[0][1], v.valid,
                    code)};
}

Outcome monte_carlo_agreement() {
  const PhaseSettings ph(0.0, oracle::kPi / 2.0, 0.0);
  std::string detail;
  bool pass = true;
  for (auto theory : {Theory::QM, Theory::MS}) {
    RunConfig cfg = load_config(fixture("rest_t3.json"));
    cfg.theory = theory;
    cfg.timing = Timing::T3;
    cfg.phases = ph;
    cfg.trials = 1000000;
    cfg.seed = 20260101;
    const auto t0 = std::chrono::steady_clock::now();
    const auto events = simulate(cfg, 1);
    const double dt = seconds_since(t0);
    const auto report =
        estimate_correlators(select_window(events, cfg.window_center, cfg.window_width));
    const double expected = theory == Theory::QM ? 2.0 / 3.0 : 2.0 / 9.0;
    const double se = std::sqrt((1.0 - expected * expected) / report.selected);
    const double z = std::abs(report.estimate.e_sigma_omega - expected) / se;
    const bool identical = serialize(events) == serialize(simulate(cfg, 1));
    pass = pass && z <= 4.0 && dt < 10.0 && identical;
    detail += fmt("%s E=%.5f (expect %.5f, z=%.2f, %.2f s, rerun %s)%s",
                  theory == Theory::QM ? "QM" : "MS(T3)", report.estimate.e_sigma_omega,
                  expected, z, dt, identical ? "identical" : "DIFFERS",
                  theory == Theory::QM ? "; " : "");
  }
  return {pass, detail};
}

Outcome timing_classifier() {
  struct Case {
    const char* file;
    TimingClass expected;
  };
  const Case cases[] = {{"rest_t1.json", timing_class(Timing::T1)},
                        {"moving_t2.json", timing_class(Timing::T2)},
                        {"rest_t3.json", timing_class(Timing::T3)}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto g = load_config(fixture(c.file)).geometry;
    const auto r = canonical_timing(g);
    bool ok = !r.mixed() && *r.timing == c.expected && r.paths.size() == 3;
    for (const auto& p : r.paths) ok = ok && p.timing == c.expected;
    if (c.expected == timing_class(Timing::T2) || c.expected == timing_class(Timing::T3))
      for (const auto& p : r.paths)
        ok = ok && p.events[1].time < p.events[0].time && p.events[0].time < p.events[2].time;
    pass = pass && ok;
    detail += std::string(c.file) + " -> " + (r.mixed() ? "Mixed" : r.timing->to_string()) + "; ";
  }
  return {pass, detail};
}

Outcome spectrum() {
  RunConfig cfg = default_config();
  cfg.theory = Theory::QM;
  cfg.trials = 1000000;
  cfg.seed = 11;
  cfg.jitter_sigma = 0.0;
  const double bin = 1e-10;
  const auto s = histogram_time_delays(simulate(cfg), bin, cfg.geometry.arms);
  const double centers[] = {0.0, -1e-9, 1e-9, -2e-9};
  const double weights[] = {3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0};
  const double path_difference = cfg.geometry.arms.long_arm - cfg.geometry.arms.short_arm;
  bool pass = s.peaks.size() == 4 && std::abs(path_difference - 0.3) <= 1e-12;
  std::string detail = fmt("%zu peaks:", s.peaks.size());
  for (int i = 0; i < 4; ++i) {
    bool found = false;
    for (double p : s.peaks) found = found || std::abs(p - centers[i]) <= bin * 1.0000001;
    const double n = static_cast<double>(s.counts_near(centers[i]));
    const double z = z_score(n / s.total, weights[i], static_cast<double>(s.total));
    pass = pass && found && z <= 4.0;
    detail += fmt(" %+.0f ns n=%.0f z=%.2f%s", centers[i] * 1e9, n, z, found ? "" : " MISSING");
  }
  return {pass, detail};
}

Outcome no_signaling() {
  bool pass = true;
  std::string detail = "analytic max dev:";
  std::vector<std::pair<Theory, std::optional<Timing>>> targets = {
      {Theory::QM, std::nullopt}, {Theory::MS, Timing::T1}, {Theory::MS, Timing::T2},
      {Theory::MS, Timing::T3}};
  for (const auto& [theory, timing] : targets) {
    const auto r = no_signaling_audit(theory, timing, kGrid, kTol);
    pass = pass && r.ok && r.max_nonselective_deviation <= kTol;
    detail += fmt(" %.2g", r.max_nonselective_deviation);
  }
  detail += "; empirical z:";
  const PhaseSettings ph(0.3, 1.2, 2.0);
  for (const auto& [theory, timing] : targets) {
    RunConfig cfg = default_config();
    cfg.theory = theory;
    cfg.timing = timing;
    cfg.phases = ph;
    cfg.trials = 1000000;
    cfg.seed = 5;
    std::uint64_t plus = 0;
    const auto events = simulate(cfg);
    for (const auto& e : events) plus += e.sigma > 0;
    const double n = static_cast<double>(events.size());
    const double z = z_score(plus / n, 0.5, n);
    pass = pass && z <= 4.0;
    detail += fmt(" %.2f", z);
  }
  return {pass, detail};
}

Outcome paradox_rates() {
  msim_link_rates r{};
  if (msim_detector_link_rates(&r) != MSIM_OK) return {false, msim_last_error()};
  const bool pass = r.both_fire == 0.25 && r.neither_fires == 0.25 && r.exactly_one == 0.5;
  return {pass, fmt("both %.17g, neither %.17g, exactly one %.17g", r.both_fire,
                    r.neither_fires, r.exactly_one)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form fidelity", closed_form_fidelity},
      {"correlator identities", correlator_identities},
      {"T1 equals QM", t1_equals_qm},
      {"T2 marginal 3/32", t2_marginal},
      {"motion experiment E_sigma", motion_experiment},
      {"rest experiment beta scan", rest_experiment},
      {"negativity surfacing", negativity},
      {"Monte Carlo agreement", monte_carlo_agreement},
      {"timing classifier", timing_classifier},
      {"spectrum peaks 3:3:1:1", spectrum},
      {"no-signaling audit", no_signaling},
      {"paradox rates", paradox_rates},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
