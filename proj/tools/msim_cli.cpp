// msim: command-line front end over the msim C library.
//
// Human-readable tables go to stdout, diagnostics to stderr, machine files
// to --out DIR in --format. Exit codes: 0 success, 1 configuration or usage
// error, 2 probability outside [0, 1], 3 failed statistical check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "msim/msim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidity = 2;
constexpr int kExitStatistics = 3;

int exit_code(msim_status s) {
  switch (s) {
    case MSIM_OK: return kExitOk;
    case MSIM_E_VALIDITY: return kExitValidity;
    case MSIM_E_STATISTICS: return kExitStatistics;
    default: return kExitConfig;
  }
}

// Carries a failed status up to main.
struct Failure {
  msim_status status;
};

void check(msim_status s, const char* what) {
  if (s == MSIM_OK) return;
  std::cerr << "msim: " << what << ": " << msim_last_error() << '\n';
  throw Failure{s};
}

struct StringDeleter {
  void operator()(char* s) const { msim_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

template <class T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<msim_config, HandleDeleter<msim_config, msim_config_free>>;
using Prediction =
    std::unique_ptr<msim_prediction, HandleDeleter<msim_prediction, msim_prediction_free>>;
using Classification = std::unique_ptr<
    msim_classification, HandleDeleter<msim_classification, msim_classification_free>>;
using Run = std::unique_ptr<msim_run, HandleDeleter<msim_run, msim_run_free>>;
using Audit = std::unique_ptr<msim_audit, HandleDeleter<msim_audit, msim_audit_free>>;

template <class F>
std::string take_string(F&& call, const char* what) {
  char* raw = nullptr;
  check(call(&raw), what);
  CString owned(raw);
  return owned ? std::string(owned.get()) : std::string();
}

const std::map<std::string, msim_theory> kTheories = {{"qm", MSIM_THEORY_QM},
                                                     {"ms", MSIM_THEORY_MS}};
const std::map<std::string, msim_timing> kTimings = {
    {"t1", MSIM_TIMING_T1}, {"t2", MSIM_TIMING_T2}, {"t3", MSIM_TIMING_T3}};
const std::map<std::string, msim_format> kFormats = {{"csv", MSIM_FORMAT_CSV},
                                                    {"json", MSIM_FORMAT_JSON}};
const std::map<std::string, msim_phase> kPhases = {
    {"alpha", MSIM_PHASE_ALPHA}, {"beta", MSIM_PHASE_BETA}, {"gamma", MSIM_PHASE_GAMMA}};
const std::map<std::string, msim_quantity> kQuantities = {
    {"e_sigma_omega", MSIM_Q_E_SIGMA_OMEGA},
    {"e_sigma", MSIM_Q_E_SIGMA},
    {"e_omega", MSIM_Q_E_OMEGA},
    {"marginal_plus", MSIM_Q_MARGINAL_PLUS}};

// Options shared by most subcommands.
struct Common {
  std::string config_path;
  std::optional<std::string> theory;
  std::optional<std::string> timing;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, beta, gamma;
  std::string out_dir;
  std::string format = "csv";
};

void add_config(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Experiment configuration (JSON)")
      ->check(CLI::ExistingFile);
}
void add_theory(CLI::App* cmd, Common& c) {
  cmd->add_option("--theory", c.theory, "qm or ms (default: the config's)")
      ->check(CLI::IsMember({"qm", "ms"}));
}
void add_timing(CLI::App* cmd, Common& c) {
  cmd->add_option("--timing", c.timing,
                  "t1, t2 or t3 (default: the config's, else its geometry)")
      ->check(CLI::IsMember({"t1", "t2", "t3"}));
}
void add_phases(CLI::App* cmd, Common& c) {
  cmd->add_option("--alpha", c.alpha, "Override phase alpha (rad)");
  cmd->add_option("--beta", c.beta, "Override phase beta (rad)");
  cmd->add_option("--gamma", c.gamma, "Override phase gamma (rad)");
}
void add_output(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out_dir, "Directory for machine-readable files");
  cmd->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

Config load(const Common& c) {
  msim_config* raw = nullptr;
  if (c.config_path.empty())
    check(msim_config_default(&raw), "default config");
  else
    check(msim_config_load_file(c.config_path.c_str(), &raw), "config");
  Config cfg(raw);
  const auto warnings =
      take_string([&](char** o) { return msim_config_warnings(cfg.get(), o); }, "config");
  if (!warnings.empty()) std::cerr << "msim: warning: " << warnings;
  if (c.theory) check(msim_config_set_theory(cfg.get(), kTheories.at(*c.theory)), "theory");
  if (c.timing) check(msim_config_set_timing(cfg.get(), kTimings.at(*c.timing)), "timing");
  if (c.trials) check(msim_config_set_trials(cfg.get(), *c.trials), "trials");
  if (c.seed) check(msim_config_set_seed(cfg.get(), *c.seed), "seed");
  if (c.alpha || c.beta || c.gamma) {
    double ph[3] = {0.0, 0.0, 0.0};
    check(msim_config_get_phases(cfg.get(), &ph[0], &ph[1], &ph[2]), "phases");
    check(msim_config_set_phases(cfg.get(), c.alpha.value_or(ph[0]),
                                 c.beta.value_or(ph[1]), c.gamma.value_or(ph[2])),
          "phases");
  }
  return cfg;
}

msim_theory theory_of(const Config& cfg) {
  msim_theory t = MSIM_THEORY_QM;
  check(msim_config_get_theory(cfg.get(), &t), "theory");
  return t;
}

msim_timing timing_of(const Common& c) {
  return c.timing ? kTimings.at(*c.timing) : MSIM_TIMING_AUTO;
}

void write_file(const Common& c, const std::string& name, const std::string& body) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(c.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(body.data(), static_cast<std::streamsize>(body.size()))) {
    std::cerr << "msim: cannot write " << path.string() << '\n';
    throw Failure{MSIM_E_IO};
  }
  std::cerr << "msim: wrote " << path.string() << '\n';
}

void prepare_out(const Common& c) {
  if (c.out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) {
    std::cerr << "msim: cannot create " << c.out_dir << ": " << ec.message() << '\n';
    throw Failure{MSIM_E_IO};
  }
}

int cmd_predict(const Common& c) {
  auto cfg = load(c);
  msim_prediction* raw = nullptr;
  check(msim_predict(cfg.get(), theory_of(cfg), timing_of(c), &raw), "predict");
  Prediction p(raw);
  std::cout << take_string(
      [&](char** o) { return msim_prediction_render(p.get(), MSIM_FORMAT_TEXT, o); },
      "predict");
  prepare_out(c);
  if (!c.out_dir.empty())
    write_file(c, "prediction." + c.format,
               take_string([&](char** o) {
                 return msim_prediction_render(p.get(), kFormats.at(c.format), o);
               }, "predict"));
  msim_prediction_values v{};
  check(msim_prediction_values_get(p.get(), &v), "predict");
  if (!v.valid) {
    std::cerr << "msim: prediction leaves the validity domain (negative joint "
                 "probability)\n";
    return kExitValidity;
  }
  return kExitOk;
}

int cmd_classify(const Common& c) {
  auto cfg = load(c);
  msim_classification* raw = nullptr;
  check(msim_classify(cfg.get(), &raw), "classify");
  Classification cls(raw);
  std::cout << take_string([&](char** o) {
    return msim_classification_render(cls.get(), MSIM_FORMAT_TEXT, o);
  }, "classify");
  prepare_out(c);
  if (!c.out_dir.empty())
    write_file(c, "classification." + c.format, take_string([&](char** o) {
                 return msim_classification_render(cls.get(), kFormats.at(c.format), o);
               }, "classify"));
  return kExitOk;
}

int cmd_simulate(const Common& c, bool run_check, double nsigma, double bin_width,
                 unsigned threads) {
  auto cfg = load(c);
  msim_run* raw = nullptr;
  check(msim_simulate(cfg.get(), threads, &raw), "simulate");
  Run run(raw);
  std::uint64_t n = 0;
  check(msim_run_event_count(run.get(), &n), "simulate");
  std::cout << "trials: " << n << '\n';
  prepare_out(c);
  const auto fmt = kFormats.at(c.format);
  if (!c.out_dir.empty()) {
    const auto events = (std::filesystem::path(c.out_dir) / "events.csv").string();
    check(msim_run_write_events(run.get(), events.c_str()), "events");
    std::cerr << "msim: wrote " << events << '\n';
    write_file(c, "spectrum." + c.format, take_string([&](char** o) {
                 return msim_run_spectrum_render(run.get(), bin_width, fmt, o);
               }, "spectrum"));
  }
  std::cout << take_string([&](char** o) {
    return msim_run_estimate_render(run.get(), MSIM_FORMAT_TEXT, o);
  }, "estimate");
  if (!c.out_dir.empty())
    write_file(c, "estimate." + c.format, take_string([&](char** o) {
                 return msim_run_estimate_render(run.get(), fmt, o);
               }, "estimate"));
  if (!run_check) return kExitOk;
  char* report = nullptr;
  const auto status = msim_run_check(run.get(), nsigma, &report);
  CString owned(report);
  if (owned) std::cout << '\n' << owned.get();
  if (status != MSIM_OK) check(status, "check");
  return kExitOk;
}

int cmd_scan(const Common& c, const std::string& param, double from, double to,
             int steps, const std::string& quantity) {
  auto cfg = load(c);
  const auto fmt = kFormats.at(c.format);
  const auto body = take_string([&](char** o) {
    return msim_scan(cfg.get(), timing_of(c), kPhases.at(param), from, to, steps,
                     kQuantities.at(quantity), fmt, o);
  }, "scan");
  std::cout << body;
  prepare_out(c);
  if (!c.out_dir.empty()) write_file(c, "scan." + c.format, body);
  return kExitOk;
}

int cmd_paradox() {
  msim_link_rates r{};
  check(msim_detector_link_rates(&r), "paradox");
  std::printf("D2(+) and D2(-) in relative motion, each before the other\n");
  std::printf("%-28s %8s\n", "outcome", "rate");
  std::printf("%-28s %8.4f\n", "both fire", r.both_fire);
  std::printf("%-28s %8.4f\n", "neither fires", r.neither_fires);
  std::printf("%-28s %8.4f\n", "exactly one fires", r.exactly_one);
  std::printf("%-28s %8.4f\n", "total",
              r.both_fire + r.neither_fires + r.exactly_one);
  std::printf(
      "Each detector decides independently, so one photon yields two counts "
      "or none half of the time.\n");
  return kExitOk;
}

int cmd_audit(const Common& c, int grid) {
  struct Target {
    msim_theory theory;
    msim_timing timing;
    const char* name;
  };
  std::vector<Target> targets;
  const bool want_qm = !c.theory || *c.theory == "qm";
  const bool want_ms = !c.theory || *c.theory == "ms";
  if (want_qm) targets.push_back({MSIM_THEORY_QM, MSIM_TIMING_AUTO, "qm"});
  if (want_ms) {
    for (const auto& [name, t] : kTimings)
      if (!c.timing || *c.timing == name)
        targets.push_back({MSIM_THEORY_MS, t, name == "t1" ? "ms_t1" : name == "t2" ? "ms_t2" : "ms_t3"});
  }
  prepare_out(c);
  bool all_ok = true;
  for (const auto& t : targets) {
    msim_audit* raw = nullptr;
    check(msim_audit_run(t.theory, t.timing, grid, &raw), "audit");
    Audit a(raw);
    std::cout << take_string(
                     [&](char** o) { return msim_audit_render(a.get(), MSIM_FORMAT_TEXT, o); },
                     "audit")
              << '\n';
    if (!c.out_dir.empty())
      write_file(c, std::string("audit_") + t.name + "." + c.format,
                 take_string([&](char** o) {
                   return msim_audit_render(a.get(), kFormats.at(c.format), o);
                 }, "audit"));
    int ok = 0;
    check(msim_audit_ok(a.get(), &ok), "audit");
    all_ok = all_ok && ok;
  }
  if (!all_ok) {
    std::cerr << "msim: no-signaling audit failed\n";
    return kExitStatistics;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum and Multisimultaneity predictions for a three-interferometer "
               "Franson-type experiment"};
  app.set_version_flag("--version", std::string(msim_version()));
  app.require_subcommand(1);

  Common c;
  auto* predict = app.add_subcommand("predict", "Closed-form joint table and correlators");
  add_config(predict, c);
  add_theory(predict, c);
  add_timing(predict, c);
  add_phases(predict, c);
  add_output(predict, c);

  auto* classify = app.add_subcommand("classify", "Before / non-before labels of the geometry");
  add_config(classify, c);
  add_output(classify, c);

  bool run_check = false;
  double nsigma = 4.0;
  double bin_width = 1e-10;
  unsigned threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo events, spectrum and estimate");
  add_config(simulate, c);
  add_theory(simulate, c);
  add_timing(simulate, c);
  add_phases(simulate, c);
  simulate->add_option("--trials", c.trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", c.seed, "Random seed");
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  simulate->add_option("--bin-width", bin_width, "Spectrum bin width (s)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--check", run_check,
                     "Compare windowed counts with the prediction (exit 3 on failure)");
  simulate->add_option("--nsigma", nsigma, "Standard errors allowed by --check")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_output(simulate, c);

  std::string param = "beta";
  double from = 0.0, to = 3.141592653589793;
  int steps = 25;
  std::string quantity = "e_sigma_omega";
  auto* scan = app.add_subcommand("scan", "QM and MS side by side over one phase");
  add_config(scan, c);
  add_timing(scan, c);
  add_phases(scan, c);
  scan->add_option("--param", param, "alpha, beta or gamma")
      ->capture_default_str()
      ->check(CLI::IsMember({"alpha", "beta", "gamma"}));
  scan->add_option("--from", from, "Start of the range (rad)")
      ->capture_default_str();
  scan->add_option("--to", to, "End of the range (rad)")
      ->capture_default_str();
  scan->add_option("--steps", steps, "Number of points (>= 2)")
      ->capture_default_str();
  scan->add_option("--quantity", quantity,
                   "e_sigma_omega, e_sigma, e_omega or marginal_plus")
      ->capture_default_str()
      ->check(CLI::IsMember({"e_sigma_omega", "e_sigma", "e_omega", "marginal_plus"}));
  add_output(scan, c);

  auto* paradox = app.add_subcommand("paradox", "Detector firing rates of the relativistic link");

  int grid = 24;
  auto* audit = app.add_subcommand("audit", "No-signaling check of the photon-1 marginal");
  add_theory(audit, c);
  add_timing(audit, c);
  audit->add_option("--grid", grid, "Phase grid points per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 400));
  add_output(audit, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*predict) return cmd_predict(c);
    if (*classify) return cmd_classify(c);
    if (*simulate) return cmd_simulate(c, run_check, nsigma, bin_width, threads);
    if (*scan) return cmd_scan(c, param, from, to, steps, quantity);
    if (*paradox) return cmd_paradox();
    if (*audit) return cmd_audit(c, grid);
  } catch (const Failure& f) {
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "msim: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
