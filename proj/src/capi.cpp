#include "msim/msim.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "msim/config.hpp"
#include "msim/error.hpp"
#include "msim/montecarlo.hpp"
#include "msim/predict.hpp"
#include "msim/relativity.hpp"
#include "msim/report.hpp"

struct msim_config {
  msim::ExperimentConfig config;
  std::vector<std::string> warnings;
};

struct msim_prediction {
  msim::PredictionTable table;
  std::uint64_t config_hash = 0;
};

struct msim_classification {
  msim::TimingReport report;
  std::uint64_t config_hash = 0;
};

struct msim_run {
  msim::ExperimentConfig config;
  std::vector<msim::EventRecord> events;
  std::uint64_t config_hash = 0;
};

struct msim_audit {
  msim::AuditReport report;
};

namespace {

thread_local std::string g_last_error;

msim_status fail(msim_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

template <class F>
msim_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const msim::ValidityError& e) {
    return fail(MSIM_E_VALIDITY, e.what());
  } catch (const msim::UnsupportedTimingError& e) {
    return fail(MSIM_E_UNSUPPORTED_TIMING, e.what());
  } catch (const msim::EmptySelectionError& e) {
    return fail(MSIM_E_EMPTY_SELECTION, e.what());
  } catch (const msim::ConfigError& e) {
    return fail(MSIM_E_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MSIM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MSIM_E_INTERNAL, e.what());
  } catch (...) {
    return fail(MSIM_E_INTERNAL, "unknown error");
  }
}

#define MSIM_REQUIRE(cond)                                         \
  do {                                                             \
    if (!(cond)) return fail(MSIM_E_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

msim_status emit(char** out, const std::string& s) {
  *out = copy_string(s);
  return MSIM_OK;
}

bool valid_format(msim_format f) {
  return f == MSIM_FORMAT_TEXT || f == MSIM_FORMAT_CSV || f == MSIM_FORMAT_JSON;
}

bool valid_timing(msim_timing t) {
  return t == MSIM_TIMING_AUTO || t == MSIM_TIMING_T1 || t == MSIM_TIMING_T2 ||
         t == MSIM_TIMING_T3;
}

std::optional<msim::Timing> to_timing(msim_timing t) {
  if (t == MSIM_TIMING_AUTO) return std::nullopt;
  return static_cast<msim::Timing>(t);
}

msim_timing from_timing(msim::Timing t) { return static_cast<msim_timing>(t); }

msim::Theory to_theory(msim_theory t) {
  return t == MSIM_THEORY_MS ? msim::Theory::MS : msim::Theory::QM;
}

// Timing the run or prediction actually uses: none for QM.
std::optional<msim::Timing> effective_timing(const msim::ExperimentConfig& c,
                                             msim::Theory theory,
                                             msim_timing requested) {
  if (theory == msim::Theory::QM) return std::nullopt;
  return msim::resolve_timing(c, to_timing(requested));
}

msim::EstimateReport windowed_estimate(const msim_run* run) {
  const auto selected = msim::select_window(run->events, run->config.window_center,
                                            run->config.window_width);
  return msim::estimate_correlators(selected);
}

}  // namespace

extern "C" {

const char* msim_version(void) {
  static const std::string v(msim::version());
  return v.c_str();
}

const char* msim_last_error(void) { return g_last_error.c_str(); }

void msim_string_free(char* s) { std::free(s); }

msim_status msim_config_default(msim_config** out) {
  MSIM_REQUIRE(out);
  return guarded([&] {
    *out = new msim_config{msim::default_config(), {}};
    return MSIM_OK;
  });
}

msim_status msim_config_load_file(const char* path, msim_config** out) {
  MSIM_REQUIRE(path && out);
  return guarded([&] {
    std::ifstream probe(path);
    if (!probe) return fail(MSIM_E_IO, std::string("cannot open ") + path);
    auto cfg = std::make_unique<msim_config>();
    cfg->config = msim::load_config(path, &cfg->warnings);
    *out = cfg.release();
    return MSIM_OK;
  });
}

msim_status msim_config_load_string(const char* text, msim_config** out) {
  MSIM_REQUIRE(text && out);
  return guarded([&] {
    auto cfg = std::make_unique<msim_config>();
    cfg->config = msim::parse_config(text, &cfg->warnings);
    *out = cfg.release();
    return MSIM_OK;
  });
}

msim_status msim_config_emit(const msim_config* cfg, char** out) {
  MSIM_REQUIRE(cfg && out);
  return guarded([&] { return emit(out, msim::emit_config(cfg->config)); });
}

msim_status msim_config_warnings(const msim_config* cfg, char** out) {
  MSIM_REQUIRE(cfg && out);
  return guarded([&] {
    std::string text;
    for (const auto& w : cfg->warnings) text += w + "\n";
    return emit(out, text);
  });
}

msim_status msim_config_hash(const msim_config* cfg, uint64_t* out) {
  MSIM_REQUIRE(cfg && out);
  return guarded([&] {
    *out = msim::config_hash(cfg->config);
    return MSIM_OK;
  });
}

msim_status msim_config_get_phases(const msim_config* cfg, double* alpha,
                                   double* beta, double* gamma) {
  MSIM_REQUIRE(cfg && alpha && beta && gamma);
  *alpha = cfg->config.phases.alpha();
  *beta = cfg->config.phases.beta();
  *gamma = cfg->config.phases.gamma();
  return MSIM_OK;
}

msim_status msim_config_set_phases(msim_config* cfg, double alpha, double beta,
                                   double gamma) {
  MSIM_REQUIRE(cfg);
  return guarded([&] {
    cfg->config.phases = msim::PhaseSettings(alpha, beta, gamma);
    return MSIM_OK;
  });
}

msim_status msim_config_set_theory(msim_config* cfg, msim_theory theory) {
  MSIM_REQUIRE(cfg && (theory == MSIM_THEORY_QM || theory == MSIM_THEORY_MS));
  cfg->config.theory = to_theory(theory);
  return MSIM_OK;
}

msim_status msim_config_set_timing(msim_config* cfg, msim_timing timing) {
  MSIM_REQUIRE(cfg && valid_timing(timing));
  cfg->config.timing = to_timing(timing);
  return MSIM_OK;
}

msim_status msim_config_set_trials(msim_config* cfg, uint64_t trials) {
  MSIM_REQUIRE(cfg);
  if (trials < 1) return fail(MSIM_E_CONFIG, "trials must be >= 1");
  cfg->config.trials = trials;
  return MSIM_OK;
}

msim_status msim_config_set_seed(msim_config* cfg, uint64_t seed) {
  MSIM_REQUIRE(cfg);
  cfg->config.seed = seed;
  return MSIM_OK;
}

msim_status msim_config_get_theory(const msim_config* cfg, msim_theory* out) {
  MSIM_REQUIRE(cfg && out);
  *out = cfg->config.theory == msim::Theory::MS ? MSIM_THEORY_MS : MSIM_THEORY_QM;
  return MSIM_OK;
}

void msim_config_free(msim_config* cfg) { delete cfg; }

msim_status msim_resolve_timing(const msim_config* cfg, msim_timing requested,
                                msim_timing* out) {
  MSIM_REQUIRE(cfg && out && valid_timing(requested));
  return guarded([&] {
    *out = from_timing(msim::resolve_timing(cfg->config, to_timing(requested)));
    return MSIM_OK;
  });
}

msim_status msim_predict(const msim_config* cfg, msim_theory theory,
                         msim_timing timing, msim_prediction** out) {
  MSIM_REQUIRE(cfg && out && valid_timing(timing));
  MSIM_REQUIRE(theory == MSIM_THEORY_QM || theory == MSIM_THEORY_MS);
  return guarded([&] {
    const auto th = to_theory(theory);
    auto p = std::make_unique<msim_prediction>();
    p->table = msim::predict(th, effective_timing(cfg->config, th, timing),
                             cfg->config.phases);
    p->config_hash = msim::config_hash(cfg->config);
    *out = p.release();
    return MSIM_OK;
  });
}

msim_status msim_prediction_values_get(const msim_prediction* p,
                                       msim_prediction_values* out) {
  MSIM_REQUIRE(p && out);
  return guarded([&] {
    const auto& t = p->table;
    for (int s = 0; s < 2; ++s) {
      for (int w = 0; w < 2; ++w) out->joint[s][w] = t.joint[s][w];
      out->marginal_sigma[s] = t.marginal_sigma[s];
    }
    const auto c = msim::correlators(t);
    out->e_sigma_omega = c.e_sigma_omega;
    out->e_sigma = c.e_sigma;
    out->e_omega = c.e_omega;
    out->valid = t.valid ? 1 : 0;
    return MSIM_OK;
  });
}

msim_status msim_prediction_render(const msim_prediction* p, msim_format format,
                                   char** out) {
  MSIM_REQUIRE(p && out && valid_format(format));
  return guarded([&] {
    switch (format) {
      case MSIM_FORMAT_CSV: return emit(out, msim::prediction_csv(p->table));
      case MSIM_FORMAT_JSON:
        return emit(out, msim::prediction_json(p->table, {p->config_hash}));
      default: return emit(out, msim::prediction_text(p->table));
    }
  });
}

void msim_prediction_free(msim_prediction* p) { delete p; }

msim_status msim_classify(const msim_config* cfg, msim_classification** out) {
  MSIM_REQUIRE(cfg && out);
  return guarded([&] {
    auto c = std::make_unique<msim_classification>();
    c->report = msim::canonical_timing(cfg->config.geometry);
    c->config_hash = msim::config_hash(cfg->config);
    *out = c.release();
    return MSIM_OK;
  });
}

msim_status msim_classification_summary(const msim_classification* c, int* mixed,
                                        msim_timing* timing, char** label) {
  MSIM_REQUIRE(c);
  return guarded([&] {
    const auto& r = c->report;
    if (mixed) *mixed = r.mixed() ? 1 : 0;
    if (timing) {
      *timing = MSIM_TIMING_AUTO;
      if (!r.mixed())
        if (auto t = msim::supported_timing(*r.timing)) *timing = from_timing(*t);
    }
    if (label) *label = copy_string(r.mixed() ? "Mixed" : r.timing->to_string());
    return MSIM_OK;
  });
}

msim_status msim_classification_render(const msim_classification* c,
                                       msim_format format, char** out) {
  MSIM_REQUIRE(c && out && valid_format(format));
  return guarded([&] {
    switch (format) {
      case MSIM_FORMAT_CSV: return emit(out, msim::classification_csv(c->report));
      case MSIM_FORMAT_JSON:
        return emit(out, msim::classification_json(c->report, {c->config_hash}));
      default: return emit(out, msim::classification_text(c->report));
    }
  });
}

void msim_classification_free(msim_classification* c) { delete c; }

msim_status msim_simulate(const msim_config* cfg, unsigned threads,
                          msim_run** out) {
  MSIM_REQUIRE(cfg && out);
  return guarded([&] {
    auto run = std::make_unique<msim_run>();
    run->config = cfg->config;
    if (run->config.theory == msim::Theory::MS)
      run->config.timing = msim::resolve_timing(run->config);
    run->events = msim::simulate(run->config, threads);
    run->config_hash = msim::config_hash(run->config);
    *out = run.release();
    return MSIM_OK;
  });
}

msim_status msim_run_event_count(const msim_run* run, uint64_t* out) {
  MSIM_REQUIRE(run && out);
  *out = run->events.size();
  return MSIM_OK;
}

msim_status msim_run_write_events(const msim_run* run, const char* path) {
  MSIM_REQUIRE(run && path);
  return guarded([&] {
    std::ofstream file(path, std::ios::binary);
    if (!file) return fail(MSIM_E_IO, std::string("cannot write ") + path);
    msim::write_events(file, run->events);
    file.flush();
    if (!file) return fail(MSIM_E_IO, std::string("write failed: ") + path);
    return MSIM_OK;
  });
}

msim_status msim_run_estimate(const msim_run* run, msim_estimate_values* out) {
  MSIM_REQUIRE(run && out);
  return guarded([&] {
    const auto r = windowed_estimate(run);
    for (int s = 0; s < 2; ++s)
      for (int w = 0; w < 2; ++w) out->counts[s][w] = r.counts[s][w];
    out->selected = r.selected;
    out->e_sigma_omega = r.estimate.e_sigma_omega;
    out->se_sigma_omega = r.standard_error.e_sigma_omega;
    out->e_sigma = r.estimate.e_sigma;
    out->se_sigma = r.standard_error.e_sigma;
    out->e_omega = r.estimate.e_omega;
    out->se_omega = r.standard_error.e_omega;
    return MSIM_OK;
  });
}

msim_status msim_run_estimate_render(const msim_run* run, msim_format format,
                                     char** out) {
  MSIM_REQUIRE(run && out && valid_format(format));
  return guarded([&] {
    const auto r = windowed_estimate(run);
    switch (format) {
      case MSIM_FORMAT_CSV: return emit(out, msim::estimate_csv(r));
      case MSIM_FORMAT_JSON:
        return emit(out, msim::estimate_json(r, {run->config_hash}));
      default: return emit(out, msim::estimate_text(r));
    }
  });
}

msim_status msim_run_spectrum_render(const msim_run* run, double bin_width,
                                     msim_format format, char** out) {
  MSIM_REQUIRE(run && out && valid_format(format));
  return guarded([&] {
    const auto s = msim::histogram_time_delays(run->events, bin_width,
                                               run->config.geometry.arms);
    if (format == MSIM_FORMAT_JSON)
      return emit(out, msim::spectrum_json(s, {run->config_hash}));
    return emit(out, msim::spectrum_csv(s));
  });
}

msim_status msim_run_check(const msim_run* run, double nsigma, char** report) {
  MSIM_REQUIRE(run && nsigma > 0.0);
  return guarded([&] {
    const auto est = windowed_estimate(run);
    const auto table = msim::predict(run->config.theory, run->config.timing,
                                     run->config.phases);
    const auto check = msim::check_agreement(est, table, nsigma);
    if (report) {
      std::string text;
      for (const auto& d : check.details) text += d + "\n";
      text += check.passed ? "agreement: PASS\n" : "agreement: FAIL\n";
      *report = copy_string(text);
    }
    if (!check.passed)
      return fail(MSIM_E_STATISTICS,
                  "simulated counts deviate from the prediction by more than " +
                      msim::format_number(nsigma) + " standard errors");
    return MSIM_OK;
  });
}

void msim_run_free(msim_run* run) { delete run; }

msim_status msim_scan(const msim_config* cfg, msim_timing timing,
                      msim_phase parameter, double from, double to, int steps,
                      msim_quantity quantity, msim_format format, char** out) {
  MSIM_REQUIRE(cfg && out && valid_timing(timing) && valid_format(format));
  MSIM_REQUIRE(parameter >= MSIM_PHASE_ALPHA && parameter <= MSIM_PHASE_GAMMA);
  MSIM_REQUIRE(quantity >= MSIM_Q_E_SIGMA_OMEGA && quantity <= MSIM_Q_MARGINAL_PLUS);
  return guarded([&] {
    const auto t = msim::resolve_timing(cfg->config, to_timing(timing));
    const auto p = static_cast<msim::PhaseParameter>(parameter);
    const auto q = static_cast<msim::Quantity>(quantity);
    const auto rows = msim::phase_scan(cfg->config.phases, p, from, to, steps, q, t);
    if (format == MSIM_FORMAT_JSON)
      return emit(out, msim::scan_json(rows, p, q, t,
                                       {msim::config_hash(cfg->config)}));
    return emit(out, msim::scan_csv(rows, p, q, t));
  });
}

msim_status msim_detector_link_rates(msim_link_rates* out) {
  MSIM_REQUIRE(out);
  const auto r = msim::detector_link_rates();
  out->both_fire = r.both_fire;
  out->neither_fires = r.neither_fires;
  out->exactly_one = r.exactly_one;
  return MSIM_OK;
}

msim_status msim_audit_run(msim_theory theory, msim_timing timing, int grid_steps,
                           msim_audit** out) {
  MSIM_REQUIRE(out && valid_timing(timing));
  MSIM_REQUIRE(theory == MSIM_THEORY_QM || theory == MSIM_THEORY_MS);
  return guarded([&] {
    auto a = std::make_unique<msim_audit>();
    const auto th = to_theory(theory);
    std::optional<msim::Timing> t;
    if (th == msim::Theory::MS) t = to_timing(timing);
    if (th == msim::Theory::MS && !t)
      return fail(MSIM_E_UNSUPPORTED_TIMING, "audit: ms needs an explicit timing");
    a->report = msim::no_signaling_audit(th, t, grid_steps);
    *out = a.release();
    return MSIM_OK;
  });
}

msim_status msim_audit_ok(const msim_audit* a, int* ok) {
  MSIM_REQUIRE(a && ok);
  *ok = a->report.ok ? 1 : 0;
  return MSIM_OK;
}

msim_status msim_audit_render(const msim_audit* a, msim_format format,
                              char** out) {
  MSIM_REQUIRE(a && out && valid_format(format));
  return guarded([&] {
    switch (format) {
      case MSIM_FORMAT_CSV: return emit(out, msim::audit_csv(a->report));
      case MSIM_FORMAT_JSON: return emit(out, msim::audit_json(a->report));
      default: return emit(out, msim::audit_text(a->report));
    }
  });
}

void msim_audit_free(msim_audit* a) { delete a; }

}  // extern "C"
