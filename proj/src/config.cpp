#include "msim/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "msim/error.hpp"

namespace msim {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

void check_keys(const json& obj, std::string_view section,
                std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {}) {
  if (!obj.is_object())
    throw ConfigError("config: section '" + std::string(section) +
                      "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known)
      throw ConfigError("config: unknown key '" + key + "' in section '" +
                        std::string(section) + "'");
  }
  for (auto key : required)
    if (!obj.contains(std::string(key)))
      throw ConfigError("config: missing key '" + std::string(key) +
                        "' in section '" + std::string(section) + "'");
}

double number(const json& obj, std::string_view section, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("config: " + std::string(section) + "." + key +
                      " must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_integer(const json& obj, std::string_view section,
                               const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned())
    throw ConfigError("config: " + std::string(section) + "." + key +
                      " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& obj, std::string_view section, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string())
    throw ConfigError("config: " + std::string(section) + "." + key +
                      " must be a string");
  return v.get<std::string>();
}

}  // namespace

ExperimentConfig parse_config(std::string_view input,
                              std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(doc, "<root>", {"arms", "phases", "splitters", "delays", "run"});

  ExperimentConfig c;
  const auto& arms = doc["arms"];
  check_keys(arms, "arms", {"L", "l", "s"}, {"coherence_length"});
  c.geometry.arms.long_arm = number(arms, "arms", "L");
  c.geometry.arms.short_arm = number(arms, "arms", "l");
  c.geometry.arms.link_segment = number(arms, "arms", "s");
  if (arms.contains("coherence_length"))
    c.geometry.arms.coherence_length = number(arms, "arms", "coherence_length");

  const auto& phases = doc["phases"];
  check_keys(phases, "phases", {"alpha", "beta", "gamma"});
  c.phases = PhaseSettings(number(phases, "phases", "alpha"),
                           number(phases, "phases", "beta"),
                           number(phases, "phases", "gamma"));

  const auto& splitters = doc["splitters"];
  if (!splitters.is_array() || splitters.size() != 3)
    throw ConfigError("config: 'splitters' must list BS11, BS21 and BS22");
  std::set<SplitterId> seen;
  for (const auto& s : splitters) {
    check_keys(s, "splitters[]", {"id", "position", "velocity"});
    BeamSplitterSpec spec;
    spec.id = parse_splitter_id(text(s, "splitters[]", "id"));
    spec.position = number(s, "splitters[]", "position");
    spec.velocity = number(s, "splitters[]", "velocity");
    if (!seen.insert(spec.id).second)
      throw ConfigError("config: duplicate splitter id " +
                        std::string(to_string(spec.id)));
    c.geometry.beam_splitters[static_cast<std::size_t>(spec.id)] = spec;
  }

  const auto& delays = doc["delays"];
  check_keys(delays, "delays", {"photon1", "photon2"});
  c.geometry.delays.photon1 = number(delays, "delays", "photon1");
  c.geometry.delays.photon2 = number(delays, "delays", "photon2");

  const auto& run = doc["run"];
  check_keys(run, "run", {"theory", "trials", "seed", "jitter", "window"},
             {"timing"});
  c.theory = parse_theory(text(run, "run", "theory"));
  if (run.contains("timing")) c.timing = parse_timing(text(run, "run", "timing"));
  c.trials = unsigned_integer(run, "run", "trials");
  c.seed = unsigned_integer(run, "run", "seed");
  c.jitter_sigma = number(run, "run", "jitter");
  const auto& window = run["window"];
  check_keys(window, "run.window", {"center", "width"});
  c.window_center = number(window, "run.window", "center");
  c.window_width = number(window, "run.window", "width");

  // Timing may be resolved later from the geometry.
  auto probe = c;
  if (probe.theory == Theory::MS && !probe.timing) probe.timing = Timing::T1;
  probe.validate();
  auto w = c.geometry.validate();
  if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), warnings);
}

std::string emit_config(const ExperimentConfig& c) {
  ordered doc;
  const auto& arms = c.geometry.arms;
  doc["arms"] = {{"L", arms.long_arm},
                 {"l", arms.short_arm},
                 {"s", arms.link_segment},
                 {"coherence_length", arms.coherence_length}};
  doc["phases"] = {{"alpha", c.phases.alpha()},
                   {"beta", c.phases.beta()},
                   {"gamma", c.phases.gamma()}};
  doc["splitters"] = ordered::array();
  for (const auto& s : c.geometry.beam_splitters)
    doc["splitters"].push_back({{"id", std::string(to_string(s.id))},
                                {"position", s.position},
                                {"velocity", s.velocity}});
  doc["delays"] = {{"photon1", c.geometry.delays.photon1},
                   {"photon2", c.geometry.delays.photon2}};
  ordered run;
  run["theory"] = std::string(to_string(c.theory));
  if (c.timing) run["timing"] = std::string(to_string(*c.timing));
  run["trials"] = c.trials;
  run["seed"] = c.seed;
  run["jitter"] = c.jitter_sigma;
  run["window"] = {{"center", c.window_center}, {"width", c.window_width}};
  doc["run"] = run;
  return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : emit_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.geometry.arms = {1.3, 1.0, 0.5, 1e-4};
  c.geometry.beam_splitters = {
      BeamSplitterSpec{SplitterId::BS11, -1.0, 0.0},
      BeamSplitterSpec{SplitterId::BS21, 3.0, 0.0},
      BeamSplitterSpec{SplitterId::BS22, 4.0, 0.0}};
  c.trials = 100000;
  c.seed = 1;
  c.window_center = 0.0;
  c.window_width = 5e-10;
  return c;
}

Timing resolve_timing(const ExperimentConfig& config,
                      std::optional<Timing> requested) {
  if (requested) return *requested;
  if (config.timing) return *config.timing;
  const auto report = canonical_timing(config.geometry);
  if (report.mixed())
    throw UnsupportedTimingError(
        "geometry yields a Mixed timing (labels differ across subensemble-L "
        "paths); pass --timing explicitly");
  const auto t = supported_timing(*report.timing);
  if (!t)
    throw UnsupportedTimingError("no Multisimultaneity rule for timing " +
                                 report.timing->to_string());
  return *t;
}

}  // namespace msim
