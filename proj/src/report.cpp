#include "msim/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "msim/error.hpp"

#ifndef MSIM_VERSION
#define MSIM_VERSION "0.0.0"
#endif

namespace msim {

namespace {

using ordered = nlohmann::ordered_json;

constexpr std::array<SplitterId, 3> kSplitters = {
    SplitterId::BS11, SplitterId::BS21, SplitterId::BS22};

const char* sign_text(int s) { return s > 0 ? "+" : "-"; }

std::string pair_key(int s, int w) {
  return std::string(sign_text(s)) + sign_text(w);
}

ordered meta_json(const OutputMeta& meta) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(meta.config_hash));
  return {{"tool", "msim"}, {"version", version()}, {"config_hash", buf}};
}

ordered phases_json(const PhaseSettings& ph) {
  return {{"alpha", ph.alpha()}, {"beta", ph.beta()}, {"gamma", ph.gamma()}};
}

ordered correlators_json(const Correlators& c) {
  return {{"e_sigma_omega", c.e_sigma_omega},
          {"e_sigma", c.e_sigma},
          {"e_omega", c.e_omega}};
}

Correlators parse_correlators(const ordered& j) {
  return {j.at("e_sigma_omega").get<double>(), j.at("e_sigma").get<double>(),
          j.at("e_omega").get<double>()};
}

ordered parse_json(std::string_view text) {
  try {
    return ordered::parse(text);
  } catch (const ordered::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

std::string timing_text(const std::optional<Timing>& t) {
  return t ? std::string(to_string(*t)) : std::string();
}

double parse_double(std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ConfigError("events: bad number '" + std::string(field) + "'");
  return v;
}

template <class Int>
Int parse_int(std::string_view field) {
  Int v{};
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ConfigError("events: bad integer '" + std::string(field) + "'");
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

template <class Int>
void append_int(std::string& out, Int v) {
  char buf[24];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string_view version() { return MSIM_VERSION; }

std::string format_number(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

std::string prediction_json(const PredictionTable& t, const OutputMeta& meta) {
  ordered j;
  j["meta"] = meta_json(meta);
  j["theory"] = std::string(to_string(t.theory));
  j["timing"] = t.timing ? ordered(std::string(to_string(*t.timing))) : ordered();
  if (t.timing) j["timing_class"] = timing_class(*t.timing).to_string();
  j["phases"] = phases_json(t.phases);
  ordered joint;
  for (int s : kSigns)
    for (int w : kSigns) joint[pair_key(s, w)] = t.at(s, w);
  j["joint"] = joint;
  j["marginal_sigma"] = {{"+", t.marginal(+1)}, {"-", t.marginal(-1)}};
  j["correlators"] = correlators_json(correlators(t));
  j["valid"] = t.valid;
  j["negative"] = ordered::array();
  for (const auto& n : t.negative)
    j["negative"].push_back(
        {{"sigma", n.sigma}, {"omega", n.omega}, {"value", n.value}});
  return j.dump(2) + "\n";
}

PredictionTable parse_prediction_json(std::string_view text) {
  const auto j = parse_json(text);
  try {
    PredictionTable t;
    t.theory = parse_theory(j.at("theory").get<std::string>());
    if (!j.at("timing").is_null())
      t.timing = parse_timing(j.at("timing").get<std::string>());
    const auto& ph = j.at("phases");
    t.phases = PhaseSettings(ph.at("alpha").get<double>(),
                             ph.at("beta").get<double>(),
                             ph.at("gamma").get<double>());
    for (int s : kSigns) {
      for (int w : kSigns)
        t.joint[sign_index(s)][sign_index(w)] =
            j.at("joint").at(pair_key(s, w)).get<double>();
      t.marginal_sigma[sign_index(s)] =
          j.at("marginal_sigma").at(sign_text(s)).get<double>();
    }
    t.valid = j.at("valid").get<bool>();
    for (const auto& n : j.at("negative"))
      t.negative.push_back({n.at("sigma").get<int>(), n.at("omega").get<int>(),
                            n.at("value").get<double>()});
    return t;
  } catch (const ordered::exception& e) {
    throw ConfigError(std::string("prediction JSON: ") + e.what());
  }
}

std::string prediction_csv(const PredictionTable& t) {
  const auto c = correlators(t);
  std::string out =
      "theory,timing,alpha,beta,gamma,p_pp,p_pm,p_mp,p_mm,marginal_p,"
      "marginal_m,e_sigma_omega,e_sigma,e_omega,valid\n";
  out += std::string(to_string(t.theory)) + "," + timing_text(t.timing);
  for (double v : {t.phases.alpha(), t.phases.beta(), t.phases.gamma(),
                   t.at(+1, +1), t.at(+1, -1), t.at(-1, +1), t.at(-1, -1),
                   t.marginal(+1), t.marginal(-1), c.e_sigma_omega, c.e_sigma,
                   c.e_omega}) {
    out += ',';
    append_number(out, v);
  }
  out += t.valid ? ",true\n" : ",false\n";
  return out;
}

std::string classification_json(const TimingReport& r, const OutputMeta& meta) {
  ordered j;
  j["meta"] = meta_json(meta);
  j["mixed"] = r.mixed();
  if (r.timing) {
    j["timing"] = r.timing->to_string();
    const auto rule = supported_timing(*r.timing);
    j["rule"] = rule ? ordered(std::string(to_string(*rule))) : ordered();
  } else {
    j["timing"] = nullptr;
    j["rule"] = nullptr;
  }
  j["paths"] = ordered::array();
  for (const auto& p : r.paths) {
    ordered jp;
    jp["path"] = p.path.code();
    jp["timing"] = p.timing.to_string();
    ordered lab;
    for (const auto& ev : p.events)
      lab[std::string(to_string(ev.splitter))] = {{"t", ev.time},
                                                  {"x", ev.position}};
    jp["lab"] = lab;
    ordered frames;
    for (auto f : kSplitters) {
      ordered row;
      for (auto e : kSplitters)
        row[std::string(to_string(e))] =
            p.frame_times[static_cast<std::size_t>(f)][static_cast<std::size_t>(e)];
      frames[std::string(to_string(f))] = row;
    }
    jp["frames"] = frames;
    j["paths"].push_back(jp);
  }
  return j.dump(2) + "\n";
}

std::string classification_csv(const TimingReport& r) {
  std::string out = "path,frame,t_BS11_s,t_BS21_s,t_BS22_s,timing\n";
  for (const auto& p : r.paths) {
    const auto row = [&](std::string_view frame, const auto& times) {
      out += p.path.code();
      out += ',';
      out += frame;
      for (double t : times) {
        out += ',';
        append_number(out, t);
      }
      out += ",\"" + p.timing.to_string() + "\"\n";
    };
    row("lab", std::array<double, 3>{p.events[0].time, p.events[1].time,
                                     p.events[2].time});
    for (auto f : kSplitters)
      row(to_string(f), p.frame_times[static_cast<std::size_t>(f)]);
  }
  return out;
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "delay_s,count\n";
  for (const auto& [bin, n] : s.histogram) {
    append_number(out, s.bin_center(bin));
    out += ',';
    append_int(out, n);
    out += '\n';
  }
  return out;
}

std::string spectrum_json(const Spectrum& s, const OutputMeta& meta) {
  ordered j;
  j["meta"] = meta_json(meta);
  j["bin_width_s"] = s.bin_width;
  j["total"] = s.total;
  j["peaks_s"] = s.peaks;
  j["bins"] = ordered::array();
  for (const auto& [bin, n] : s.histogram)
    j["bins"].push_back({{"delay_s", s.bin_center(bin)}, {"count", n}});
  return j.dump(2) + "\n";
}

std::string estimate_json(const EstimateReport& r, const OutputMeta& meta) {
  ordered j;
  j["meta"] = meta_json(meta);
  ordered counts;
  for (int s : kSigns)
    for (int w : kSigns) counts[pair_key(s, w)] = r.count(s, w);
  j["counts"] = counts;
  j["selected"] = r.selected;
  j["estimate"] = correlators_json(r.estimate);
  j["standard_error"] = correlators_json(r.standard_error);
  return j.dump(2) + "\n";
}

EstimateReport parse_estimate_json(std::string_view text) {
  const auto j = parse_json(text);
  try {
    EstimateReport r;
    for (int s : kSigns)
      for (int w : kSigns)
        r.counts[sign_index(s)][sign_index(w)] =
            j.at("counts").at(pair_key(s, w)).get<std::uint64_t>();
    r.selected = j.at("selected").get<std::uint64_t>();
    r.estimate = parse_correlators(j.at("estimate"));
    r.standard_error = parse_correlators(j.at("standard_error"));
    return r;
  } catch (const ordered::exception& e) {
    throw ConfigError(std::string("estimate JSON: ") + e.what());
  }
}

std::string estimate_csv(const EstimateReport& r) {
  std::string out =
      "r_pp,r_pm,r_mp,r_mm,selected,e_sigma_omega,se_sigma_omega,e_sigma,"
      "se_sigma,e_omega,se_omega\n";
  for (int s : kSigns)
    for (int w : kSigns) {
      append_int(out, r.count(s, w));
      out += ',';
    }
  append_int(out, r.selected);
  for (double v : {r.estimate.e_sigma_omega, r.standard_error.e_sigma_omega,
                   r.estimate.e_sigma, r.standard_error.e_sigma,
                   r.estimate.e_omega, r.standard_error.e_omega}) {
    out += ',';
    append_number(out, v);
  }
  out += '\n';
  return out;
}

std::string audit_json(const AuditReport& r, const OutputMeta& meta) {
  ordered j;
  j["meta"] = meta_json(meta);
  j["theory"] = std::string(to_string(r.theory));
  j["timing"] = r.timing ? ordered(std::string(to_string(*r.timing))) : ordered();
  j["grid_steps"] = r.grid_steps;
  j["max_nonselective_deviation"] = r.max_nonselective_deviation;
  j["max_channel_sum_deviation"] = r.max_channel_sum_deviation;
  j["selective_min"] = r.selective_min;
  j["selective_max"] = r.selective_max;
  j["selective_phase_dependent"] = r.selective_phase_dependent;
  j["ok"] = r.ok;
  return j.dump(2) + "\n";
}

std::string audit_csv(const AuditReport& r) {
  std::string out =
      "theory,timing,grid_steps,max_nonselective_deviation,"
      "max_channel_sum_deviation,selective_min,selective_max,"
      "selective_phase_dependent,ok\n";
  out += std::string(to_string(r.theory)) + "," + timing_text(r.timing) + ",";
  append_int(out, r.grid_steps);
  for (double v : {r.max_nonselective_deviation, r.max_channel_sum_deviation,
                   r.selective_min, r.selective_max}) {
    out += ',';
    append_number(out, v);
  }
  out += r.selective_phase_dependent ? ",true" : ",false";
  out += r.ok ? ",true\n" : ",false\n";
  return out;
}

std::string scan_csv(const std::vector<ScanRow>& rows, PhaseParameter parameter,
                     Quantity quantity, Timing timing) {
  const std::string q(to_string(quantity));
  std::string out = std::string(to_string(parameter)) + ",qm_" + q + ",ms_" +
                    std::string(to_string(timing)) + "_" + q + ",ms_valid\n";
  for (const auto& r : rows) {
    append_number(out, r.value);
    out += ',';
    append_number(out, r.qm);
    out += ',';
    append_number(out, r.ms);
    out += r.ms_valid ? ",true\n" : ",false\n";
  }
  return out;
}

std::string scan_json(const std::vector<ScanRow>& rows, PhaseParameter parameter,
                      Quantity quantity, Timing timing, const OutputMeta& meta) {
  ordered j;
  j["meta"] = meta_json(meta);
  j["parameter"] = std::string(to_string(parameter));
  j["quantity"] = std::string(to_string(quantity));
  j["timing"] = std::string(to_string(timing));
  j["rows"] = ordered::array();
  for (const auto& r : rows)
    j["rows"].push_back(
        {{"value", r.value}, {"qm", r.qm}, {"ms", r.ms}, {"ms_valid", r.ms_valid}});
  return j.dump(2) + "\n";
}

void write_events(std::ostream& out, std::span<const EventRecord> events) {
  out << "trial,path,subensemble,sigma,omega,t1_s,t2_s\n";
  std::string line;
  for (const auto& e : events) {
    line.clear();
    append_int(line, e.trial);
    line += ',';
    line += e.path ? e.path->code() : std::string("*");
    line += ',';
    line += to_string(e.subensemble);
    line += ',';
    append_int(line, e.sigma);
    line += ',';
    if (e.coincident()) append_int(line, e.omega);
    line += ',';
    append_number(line, e.t1);
    line += ',';
    if (e.coincident()) append_number(line, e.t2);
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

std::vector<EventRecord> read_events(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "trial,path,subensemble,sigma,omega,t1_s,t2_s")
    throw ConfigError("events: missing or unexpected header");
  std::vector<EventRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find(',');
      f.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (f.size() != 7) throw ConfigError("events: expected 7 fields: " + line);
    EventRecord e;
    e.trial = parse_int<std::uint64_t>(f[0]);
    if (f[1] != "*") e.path = PathPair::parse(f[1]);
    e.subensemble = parse_subensemble(f[2]);
    e.sigma = parse_int<int>(f[3]);
    e.omega = f[4].empty() ? 0 : parse_int<int>(f[4]);
    e.t1 = parse_double(f[5]);
    e.t2 = f[6].empty() ? std::numeric_limits<double>::quiet_NaN()
                        : parse_double(f[6]);
    out.push_back(e);
  }
  return out;
}

}  // namespace msim

namespace msim {

namespace {

std::string fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.*f", precision, v);
  return buf;
}

}  // namespace

std::string prediction_text(const PredictionTable& t) {
  std::ostringstream os;
  os << "theory " << to_string(t.theory);
  if (t.timing)
    os << "  timing " << to_string(*t.timing) << ' '
       << timing_class(*t.timing).to_string();
  os << "\nphases alpha " << format_number(t.phases.alpha()) << "  beta "
     << format_number(t.phases.beta()) << "  gamma "
     << format_number(t.phases.gamma()) << "\n\n";
  os << "subpopulation L joint P(sigma, omega)\n";
  os << "           omega=+     omega=-     P(sigma)\n";
  for (int s : kSigns)
    os << "sigma=" << sign_text(s) << "  " << fixed(t.at(s, +1)) << "   "
       << fixed(t.at(s, -1)) << "   " << fixed(t.marginal(s)) << '\n';
  const auto c = correlators(t);
  os << "\nE(sigma,omega) " << fixed(c.e_sigma_omega) << "\nE(sigma)       "
     << fixed(c.e_sigma) << "\nE(omega)       " << fixed(c.e_omega) << '\n';
  if (!t.valid) {
    os << "\nINVALID: negative entries";
    for (const auto& n : t.negative)
      os << " (" << sign_text(n.sigma) << ',' << sign_text(n.omega)
         << ") = " << format_number(n.value);
    os << '\n';
  }
  return os.str();
}

std::string classification_text(const TimingReport& r) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& p : r.paths) {
    os << "path " << p.path.code() << "  " << p.timing.to_string() << '\n';
    os << "  lab    ";
    for (const auto& ev : p.events) os << ' ' << to_string(ev.splitter) << ' ' << ev.time;
    os << '\n';
    for (auto f : kSplitters) {
      os << "  " << to_string(f) << "  ";
      for (auto e : kSplitters)
        os << ' ' << to_string(e) << ' '
           << p.frame_times[static_cast<std::size_t>(f)][static_cast<std::size_t>(e)];
      os << '\n';
    }
  }
  if (r.mixed()) {
    os << "timing: Mixed (no prediction rule)\n";
  } else {
    const auto rule = supported_timing(*r.timing);
    os << "timing: " << r.timing->to_string() << "  rule: "
       << (rule ? std::string(to_string(*rule)) : std::string("none")) << '\n';
  }
  return os.str();
}

std::string estimate_text(const EstimateReport& r) {
  std::ostringstream os;
  os << "coincidences in window: " << r.selected << '\n';
  for (int s : kSigns)
    for (int w : kSigns)
      os << "R(" << sign_text(s) << ',' << sign_text(w) << ") = " << r.count(s, w)
         << '\n';
  os << "E(sigma,omega) " << fixed(r.estimate.e_sigma_omega) << " +- "
     << fixed(r.standard_error.e_sigma_omega).substr(1) << '\n'
     << "E(sigma)       " << fixed(r.estimate.e_sigma) << " +- "
     << fixed(r.standard_error.e_sigma).substr(1) << '\n'
     << "E(omega)       " << fixed(r.estimate.e_omega) << " +- "
     << fixed(r.standard_error.e_omega).substr(1) << '\n';
  return os.str();
}

std::string audit_text(const AuditReport& r) {
  std::ostringstream os;
  os << "theory " << to_string(r.theory);
  if (r.timing) os << "  timing " << to_string(*r.timing);
  os << "  grid " << r.grid_steps << "^3\n"
     << "max |P(sigma) - 1/2| over all channels: "
     << format_number(r.max_nonselective_deviation) << '\n'
     << "max |sum of channels - 1|:              "
     << format_number(r.max_channel_sum_deviation) << '\n'
     << "windowed P(sigma=+) range:              [" << format_number(r.selective_min)
     << ", " << format_number(r.selective_max) << "]"
     << (r.selective_phase_dependent ? " (phase dependent)" : "") << '\n'
     << "no-signaling: " << (r.ok ? "OK" : "VIOLATED") << '\n';
  return os.str();
}

}  // namespace msim
