#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "msim/msim.h"

namespace {

std::string fixture(const char* name) { return std::string(MSIM_FIXTURE_DIR) + "/" + name; }

std::string take(char* s) {
  std::string out = s ? s : "";
  msim_string_free(s);
  return out;
}

msim_config* load(const char* name) {
  msim_config* cfg = nullptr;
  REQUIRE(msim_config_load_file(fixture(name).c_str(), &cfg) == MSIM_OK);
  return cfg;
}

}  // namespace

TEST_CASE("errors map to status codes with messages") {
  msim_config* cfg = nullptr;
  CHECK(msim_config_load_file(fixture("missing.json").c_str(), &cfg) == MSIM_E_IO);
  CHECK(cfg == nullptr);
  CHECK(std::string(msim_last_error()).find("missing.json") != std::string::npos);
  CHECK(msim_config_load_string("{\"arms\": 1}", &cfg) == MSIM_E_CONFIG);
  CHECK(std::string(msim_last_error()).size() > 0);
  CHECK(msim_config_load_string(nullptr, &cfg) == MSIM_E_ARGUMENT);
  CHECK(msim_config_default(nullptr) == MSIM_E_ARGUMENT);
  CHECK(msim_predict(nullptr, MSIM_THEORY_QM, MSIM_TIMING_AUTO, nullptr) == MSIM_E_ARGUMENT);
  REQUIRE(msim_config_default(&cfg) == MSIM_OK);
  CHECK(std::string(msim_last_error()).empty());
  CHECK(msim_config_set_timing(cfg, static_cast<msim_timing>(9)) == MSIM_E_ARGUMENT);
  CHECK(msim_config_set_trials(cfg, 0) == MSIM_E_CONFIG);
  msim_config_free(cfg);
  msim_config_free(nullptr);
}

TEST_CASE("predict through handles") {
  msim_config* cfg = nullptr;
  REQUIRE(msim_config_default(&cfg) == MSIM_OK);
  msim_prediction* p = nullptr;
  REQUIRE(msim_predict(cfg, MSIM_THEORY_QM, MSIM_TIMING_AUTO, &p) == MSIM_OK);
  msim_prediction_values v{};
  REQUIRE(msim_prediction_values_get(p, &v) == MSIM_OK);
  CHECK(v.joint[0][0] == doctest::Approx(9.0 / 64.0));
  CHECK(v.e_sigma == doctest::Approx(2.0 / 3.0));
  CHECK(v.valid == 1);
  char* json = nullptr;
  REQUIRE(msim_prediction_render(p, MSIM_FORMAT_JSON, &json) == MSIM_OK);
  CHECK(take(json).find("\"theory\": \"qm\"") != std::string::npos);
  msim_prediction_free(p);

  REQUIRE(msim_predict(cfg, MSIM_THEORY_MS, MSIM_TIMING_T2, &p) == MSIM_OK);
  REQUIRE(msim_prediction_values_get(p, &v) == MSIM_OK);
  CHECK(v.valid == 0);
  CHECK(v.joint[0][1] == doctest::Approx(-1.0 / 64.0));
  CHECK(v.e_sigma == 0.0);
  msim_prediction_free(p);

  // AUTO resolves to the default geometry's class.
  msim_timing t = MSIM_TIMING_T3;
  REQUIRE(msim_resolve_timing(cfg, MSIM_TIMING_AUTO, &t) == MSIM_OK);
  CHECK(t == MSIM_TIMING_T1);
  msim_config_free(cfg);
}

TEST_CASE("mixed geometry has no automatic timing") {
  msim_config* cfg = load("mixed.json");
  msim_classification* c = nullptr;
  REQUIRE(msim_classify(cfg, &c) == MSIM_OK);
  int mixed = 0;
  msim_timing t = MSIM_TIMING_T1;
  char* label = nullptr;
  REQUIRE(msim_classification_summary(c, &mixed, &t, &label) == MSIM_OK);
  CHECK(mixed == 1);
  CHECK(t == MSIM_TIMING_AUTO);
  CHECK(take(label) == "Mixed");
  msim_classification_free(c);
  msim_prediction* p = nullptr;
  CHECK(msim_predict(cfg, MSIM_THEORY_MS, MSIM_TIMING_AUTO, &p) == MSIM_E_UNSUPPORTED_TIMING);
  CHECK(msim_predict(cfg, MSIM_THEORY_QM, MSIM_TIMING_AUTO, &p) == MSIM_OK);
  msim_prediction_free(p);
  msim_config_free(cfg);
}

TEST_CASE("simulate, estimate and check") {
  msim_config* cfg = load("rest_t3.json");
  REQUIRE(msim_config_set_trials(cfg, 100000) == MSIM_OK);
  msim_run* run = nullptr;
  REQUIRE(msim_simulate(cfg, 1, &run) == MSIM_OK);
  std::uint64_t n = 0;
  REQUIRE(msim_run_event_count(run, &n) == MSIM_OK);
  CHECK(n == 100000);
  msim_estimate_values e{};
  REQUIRE(msim_run_estimate(run, &e) == MSIM_OK);
  CHECK(e.selected == e.counts[0][0] + e.counts[0][1] + e.counts[1][0] + e.counts[1][1]);
  CHECK(std::abs(e.e_sigma_omega - 2.0 / 9.0) < 4.0 * e.se_sigma_omega);
  char* report = nullptr;
  CHECK(msim_run_check(run, 4.0, &report) == MSIM_OK);
  CHECK(take(report).find("agreement: PASS") != std::string::npos);
  CHECK(msim_run_check(run, 1e-9, nullptr) == MSIM_E_STATISTICS);
  char* spectrum = nullptr;
  REQUIRE(msim_run_spectrum_render(run, 1e-10, MSIM_FORMAT_CSV, &spectrum) == MSIM_OK);
  CHECK(take(spectrum).rfind("delay_s,count\n", 0) == 0);
  CHECK(msim_run_spectrum_render(run, 1e-9, MSIM_FORMAT_CSV, &spectrum) == MSIM_E_CONFIG);

  const std::string path = "capi_events.csv";
  REQUIRE(msim_run_write_events(run, path.c_str()) == MSIM_OK);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "trial,path,subensemble,sigma,omega,t1_s,t2_s");
  in.close();
  std::remove(path.c_str());
  CHECK(msim_run_write_events(run, "/nonexistent-dir/x.csv") == MSIM_E_IO);
  msim_run_free(run);
  msim_config_free(cfg);
}

TEST_CASE("simulate refuses invalid phases") {
  msim_config* cfg = load("moving_t2.json");
  msim_run* run = nullptr;
  CHECK(msim_simulate(cfg, 1, &run) == MSIM_E_VALIDITY);
  CHECK(run == nullptr);
  CHECK(std::string(msim_last_error()).find("-0.015625") != std::string::npos);
  msim_config_free(cfg);
}

TEST_CASE("scan, audit and link rates") {
  msim_config* cfg = nullptr;
  REQUIRE(msim_config_default(&cfg) == MSIM_OK);
  char* csv = nullptr;
  REQUIRE(msim_scan(cfg, MSIM_TIMING_T3, MSIM_PHASE_BETA, 0.0, 3.141592653589793, 3,
                    MSIM_Q_E_SIGMA_OMEGA, MSIM_FORMAT_CSV, &csv) == MSIM_OK);
  const auto text = take(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(msim_scan(cfg, MSIM_TIMING_T3, MSIM_PHASE_BETA, 0.0, 1.0, 1, MSIM_Q_E_SIGMA,
                  MSIM_FORMAT_CSV, &csv) == MSIM_E_CONFIG);
  msim_config_free(cfg);

  msim_audit* a = nullptr;
  REQUIRE(msim_audit_run(MSIM_THEORY_MS, MSIM_TIMING_T2, 4, &a) == MSIM_OK);
  int ok = 0;
  REQUIRE(msim_audit_ok(a, &ok) == MSIM_OK);
  CHECK(ok == 1);
  msim_audit_free(a);
  CHECK(msim_audit_run(MSIM_THEORY_MS, MSIM_TIMING_AUTO, 4, &a) == MSIM_E_UNSUPPORTED_TIMING);

  msim_link_rates r{};
  REQUIRE(msim_detector_link_rates(&r) == MSIM_OK);
  CHECK(r.both_fire == 0.25);
  CHECK(r.neither_fires == 0.25);
  CHECK(r.exactly_one == 0.5);
}

TEST_CASE("config emit and setters") {
  msim_config* cfg = nullptr;
  REQUIRE(msim_config_default(&cfg) == MSIM_OK);
  REQUIRE(msim_config_set_phases(cfg, 0.5, -0.5, 7.0) == MSIM_OK);
  double a = 0, b = 0, g = 0;
  REQUIRE(msim_config_get_phases(cfg, &a, &b, &g) == MSIM_OK);
  CHECK(a == 0.5);
  CHECK(b == doctest::Approx(2.0 * 3.141592653589793 - 0.5));
  std::uint64_t h1 = 0, h2 = 0;
  REQUIRE(msim_config_hash(cfg, &h1) == MSIM_OK);
  char* text = nullptr;
  REQUIRE(msim_config_emit(cfg, &text) == MSIM_OK);
  msim_config* back = nullptr;
  REQUIRE(msim_config_load_string(text, &back) == MSIM_OK);
  msim_string_free(text);
  REQUIRE(msim_config_hash(back, &h2) == MSIM_OK);
  CHECK(h1 == h2);
  REQUIRE(msim_config_set_seed(back, 99) == MSIM_OK);
  REQUIRE(msim_config_hash(back, &h2) == MSIM_OK);
  CHECK(h1 != h2);
  msim_config_free(back);
  msim_config_free(cfg);
  CHECK(std::string(msim_version()).size() > 0);
}
