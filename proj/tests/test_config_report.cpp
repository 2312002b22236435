#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <functional>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "msim/config.hpp"
#include "msim/error.hpp"
#include "msim/report.hpp"

using namespace msim;

namespace {

std::string fixture(const char* name) { return std::string(MSIM_FIXTURE_DIR) + "/" + name; }

std::string edit(const std::function<void(nlohmann::json&)>& change) {
  auto j = nlohmann::json::parse(emit_config(default_config()));
  change(j);
  return j.dump();
}

}  // namespace

TEST_CASE("config round-trips through its canonical form") {
  for (const char* f : {"rest_t1.json", "moving_t2.json", "rest_t3.json", "mixed.json",
                        "qm_baseline.json"}) {
    const auto c = load_config(fixture(f));
    const auto text = emit_config(c);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
  }
  const auto d = default_config();
  CHECK(parse_config(emit_config(d)) == d);
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["extra"] = 1; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["arms"]["M"] = 2.0; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["phases"].erase("beta"); })),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["arms"]["L"] = "long"; })),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["run"]["trials"] = -5; })),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["run"]["theory"] = "bohm"; })),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["run"]["timing"] = "t9"; })),
                  UnsupportedTimingError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["splitters"].erase(2); })),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(edit([](auto& j) { j["splitters"][1]["id"] = "BS11"; })), ConfigError);
  CHECK_THROWS_AS(
      parse_config(edit([](auto& j) { j["splitters"][0]["velocity"] = 1.0; })),
      ConfigError);
  CHECK_THROWS_AS(parse_config(edit([](auto& j) { j["arms"]["l"] = 2.0; })), ConfigError);
  CHECK_THROWS_AS(load_config(fixture("missing.json")), ConfigError);
}

TEST_CASE("coherence-length warning") {
  std::vector<std::string> warnings;
  parse_config(edit([](auto& j) { j["arms"]["coherence_length"] = 1.0; }), &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("timing resolution") {
  CHECK(resolve_timing(load_config(fixture("rest_t1.json"))) == Timing::T1);
  CHECK(resolve_timing(load_config(fixture("moving_t2.json"))) == Timing::T2);
  CHECK(resolve_timing(load_config(fixture("rest_t3.json"))) == Timing::T3);
  const auto mixed = load_config(fixture("mixed.json"));
  CHECK_THROWS_AS(resolve_timing(mixed), UnsupportedTimingError);
  CHECK(resolve_timing(mixed, Timing::T2) == Timing::T2);
  auto pinned = mixed;
  pinned.timing = Timing::T3;
  CHECK(resolve_timing(pinned) == Timing::T3);
}

TEST_CASE("config hash tracks content") {
  const auto c = default_config();
  CHECK(config_hash(c) == config_hash(parse_config(emit_config(c))));
  auto d = c;
  d.seed = 2;
  CHECK(config_hash(c) != config_hash(d));
}

TEST_CASE("prediction JSON round-trips") {
  for (auto table : {qm_joint(PhaseSettings(0.1, 0.2, 0.3)),
                     ms_joint(Timing::T2, PhaseSettings(0.0, 0.0, 0.0)),
                     ms_joint(Timing::T3, PhaseSettings(1.0, 5.0, 2.5))}) {
    const auto text = prediction_json(table, {42});
    CHECK(parse_prediction_json(text) == table);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["meta"]["tool"] == "msim");
    CHECK(j["meta"]["config_hash"] == "000000000000002a");
  }
  CHECK_THROWS_AS(parse_prediction_json("{}"), ConfigError);
}

TEST_CASE("prediction CSV") {
  const auto csv = prediction_csv(ms_joint(Timing::T2, PhaseSettings()));
  CHECK(csv.rfind("theory,timing,alpha,", 0) == 0);
  CHECK(csv.find("\nms,t2,0,0,0,0.109375,-0.015625,") != std::string::npos);
  CHECK(csv.find(",false\n") != std::string::npos);
}

TEST_CASE("estimate JSON round-trips") {
  EstimateReport r;
  r.counts = {{{10, 3}, {4, 11}}};
  r.selected = 28;
  r.estimate = {0.1 + 0.2, -1.0 / 3.0, 1e-300};
  r.standard_error = {0.05, 0.07, 0.11};
  const auto back = parse_estimate_json(estimate_json(r));
  CHECK(back.counts == r.counts);
  CHECK(back.selected == r.selected);
  CHECK(back.estimate == r.estimate);
  CHECK(back.standard_error == r.standard_error);
}

TEST_CASE("event files round-trip bit-exactly") {
  RunConfig cfg = default_config();
  cfg.trials = 2000;
  cfg.jitter_sigma = 1e-11;
  for (auto theory : {Theory::QM, Theory::MS}) {
    cfg.theory = theory;
    cfg.timing = Timing::T1;
    const auto events = simulate(cfg);
    std::stringstream buf;
    write_events(buf, events);
    const auto back = read_events(buf);
    REQUIRE(back.size() == events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      CHECK(back[i].trial == events[i].trial);
      CHECK(back[i].path == events[i].path);
      CHECK(back[i].subensemble == events[i].subensemble);
      CHECK(back[i].sigma == events[i].sigma);
      CHECK(back[i].omega == events[i].omega);
      CHECK(std::bit_cast<std::uint64_t>(back[i].t1) ==
            std::bit_cast<std::uint64_t>(events[i].t1));
      if (events[i].coincident())
        CHECK(std::bit_cast<std::uint64_t>(back[i].t2) ==
              std::bit_cast<std::uint64_t>(events[i].t2));
      else
        CHECK(std::isnan(back[i].t2));
    }
  }
  std::stringstream bad("trial,path\n");
  CHECK_THROWS_AS(read_events(bad), ConfigError);
  std::stringstream short_row("trial,path,subensemble,sigma,omega,t1_s,t2_s\n1,*,L\n");
  CHECK_THROWS_AS(read_events(short_row), ConfigError);
}

TEST_CASE("classification, spectrum, audit and scan outputs") {
  const auto report = canonical_timing(load_config(fixture("moving_t2.json")).geometry);
  const auto cj = nlohmann::json::parse(classification_json(report));
  CHECK(cj["rule"] == "t2");
  CHECK(cj["paths"].size() == 3);
  CHECK(classification_csv(report).rfind("path,frame,", 0) == 0);

  const auto mixed = canonical_timing(load_config(fixture("mixed.json")).geometry);
  CHECK(nlohmann::json::parse(classification_json(mixed))["mixed"] == true);

  const auto audit = no_signaling_audit(Theory::MS, Timing::T3, 3);
  CHECK(nlohmann::json::parse(audit_json(audit))["ok"] == true);
  CHECK(audit_csv(audit).find("\nms,t3,3,") != std::string::npos);

  const auto rows = phase_scan(PhaseSettings(), PhaseParameter::Beta, 0.0, 1.0, 2,
                               Quantity::ESigmaOmega, Timing::T3);
  const auto csv = scan_csv(rows, PhaseParameter::Beta, Quantity::ESigmaOmega, Timing::T3);
  CHECK(csv.rfind("beta,qm_e_sigma_omega,ms_t3_e_sigma_omega,ms_valid\n", 0) == 0);
  CHECK(nlohmann::json::parse(scan_json(rows, PhaseParameter::Beta, Quantity::ESigmaOmega,
                                        Timing::T3))["rows"]
            .size() == 2);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-1.0 / 64.0) == "-0.015625");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(format_number(third)) == third);
}
