#include "msim/relativity.hpp"

#include <cmath>
#include <utility>

#include "msim/error.hpp"

namespace msim {

namespace {

constexpr std::array<SplitterId, 3> kSplitters = {
    SplitterId::BS11, SplitterId::BS21, SplitterId::BS22};

std::size_t index(SplitterId id) { return static_cast<std::size_t>(id); }

bool same_photon(SplitterId a, SplitterId b) {
  return (a == SplitterId::BS11) == (b == SplitterId::BS11);
}

// Photon leaves (t0, x0) after a lumped optical delay `extra` (meters) and
// flies straight to the splitter. Returns the lab impact time.
double arrival_time(double t0, double x0, double extra,
                    const BeamSplitterSpec& bs, double emission, int expected_dir) {
  const double c = kSpeedOfLight;
  const double depart = t0 + extra / c;
  const double target = bs.position + bs.velocity * c * (depart - emission);
  const double gap = target - x0;
  if (gap * expected_dir < 0.0)
    throw ConfigError("geometry: " + std::string(to_string(bs.id)) +
                      " lies behind the photon heading for it");
  return depart + std::abs(gap) / (c * (1.0 - expected_dir * bs.velocity));
}

ImpactEvent make_event(SplitterId id, double t, const SetupGeometry& g,
                       const PathPair& path) {
  const auto& bs = g.splitter(id);
  const double x =
      bs.position + bs.velocity * kSpeedOfLight * (t - g.source_emission_time);
  return ImpactEvent{id, t, x, path};
}

std::string label_text(SplitterId id, const ImpactLabel& label, bool with_ref) {
  std::string name(to_string(id));
  std::string out = (label.kind == ImpactKind::Before ? "b" : "a") +
                    name.substr(2);
  if (with_ref && label.reference)
    out += "[" + std::string(to_string(*label.reference)).substr(2) + "]";
  return out;
}

}  // namespace

std::string_view to_string(SplitterId id) {
  switch (id) {
    case SplitterId::BS11: return "BS11";
    case SplitterId::BS21: return "BS21";
    case SplitterId::BS22: return "BS22";
  }
  return "?";
}

SplitterId parse_splitter_id(std::string_view text) {
  for (auto id : kSplitters)
    if (to_string(id) == text) return id;
  throw ConfigError("unknown beam-splitter id '" + std::string(text) + "'");
}

std::vector<std::string> SetupGeometry::validate() const {
  auto warnings = arms.validate();
  for (std::size_t i = 0; i < beam_splitters.size(); ++i) {
    const auto& bs = beam_splitters[i];
    if (index(bs.id) != i)
      throw ConfigError("geometry: beam-splitter ids must be BS11, BS21, BS22");
    if (!std::isfinite(bs.position) || !(std::abs(bs.velocity) < 1.0))
      throw ConfigError("geometry: " + std::string(to_string(bs.id)) +
                        " needs a finite position and |velocity| < 1");
  }
  const double x11 = splitter(SplitterId::BS11).position;
  const double x21 = splitter(SplitterId::BS21).position;
  const double x22 = splitter(SplitterId::BS22).position;
  if (!(x11 < 0.0))
    throw ConfigError("geometry: BS11 must sit at negative x (photon 1 side)");
  if (!(0.0 < x21 && x21 < x22))
    throw ConfigError("geometry: photon 2 splitters need 0 < x(BS21) < x(BS22)");
  if (!(delays.photon1 >= 0.0) || !(delays.photon2 >= 0.0))
    throw ConfigError("geometry: delay lines must be >= 0");
  if (!std::isfinite(source_emission_time))
    throw ConfigError("geometry: emission time must be finite");
  for (const auto& p : enumerate_detectable_paths()) {
    const auto ev = impact_schedule(*this, p);
    if (!(ev[1].time < ev[2].time))
      throw ConfigError("geometry: photon 2 must reach BS21 before BS22");
  }
  return warnings;
}

double lorentz_time(double time, double position, double velocity) {
  if (!(std::abs(velocity) < 1.0))
    throw ConfigError("lorentz_time: |v| must be < 1 (fraction of c)");
  const double gamma = 1.0 / std::sqrt(1.0 - velocity * velocity);
  return gamma * (time - velocity * position / kSpeedOfLight);
}

double lorentz_time(const ImpactEvent& event, double velocity) {
  return lorentz_time(event.time, event.position, velocity);
}

std::array<ImpactEvent, 3> impact_schedule(const SetupGeometry& g,
                                           const PathPair& path) {
  if (!path.is_detectable())
    throw ConfigError("impact_schedule: path " + path.code() +
                      " never reaches BS22");
  const double c = kSpeedOfLight;
  const double te = g.source_emission_time;
  const auto& arms = g.arms;

  const double t11 =
      arrival_time(te, 0.0, arms.length(path.photon1) + c * g.delays.photon1,
                   g.splitter(SplitterId::BS11), te, -1);
  const double t21 = arrival_time(
      te, 0.0, arms.length(path.photon2_first) + c * g.delays.photon2,
      g.splitter(SplitterId::BS21), te, +1);
  const auto e21 = make_event(SplitterId::BS21, t21, g, path);
  const double t22 =
      arrival_time(t21, e21.position,
                   arms.link_segment + arms.length(path.photon2_second),
                   g.splitter(SplitterId::BS22), te, +1);
  return {make_event(SplitterId::BS11, t11, g, path), e21,
          make_event(SplitterId::BS22, t22, g, path)};
}

const ImpactLabel& TimingClass::label(SplitterId id) const {
  switch (id) {
    case SplitterId::BS11: return bs11;
    case SplitterId::BS21: return bs21;
    default: return bs22;
  }
}

ImpactLabel& TimingClass::label(SplitterId id) {
  return const_cast<ImpactLabel&>(std::as_const(*this).label(id));
}

std::string TimingClass::to_string() const {
  return "(" + label_text(SplitterId::BS11, bs11, true) + ", " +
         label_text(SplitterId::BS21, bs21, true) + " " +
         label_text(SplitterId::BS22, bs22, true) + ")";
}

std::string_view to_string(Timing t) {
  switch (t) {
    case Timing::T1: return "t1";
    case Timing::T2: return "t2";
    case Timing::T3: return "t3";
  }
  return "?";
}

Timing parse_timing(std::string_view text) {
  for (auto t : {Timing::T1, Timing::T2, Timing::T3})
    if (to_string(t) == text) return t;
  throw UnsupportedTimingError("unsupported timing '" + std::string(text) +
                               "' (expected t1, t2 or t3)");
}

TimingClass timing_class(Timing t) {
  const ImpactLabel b{};
  const auto a = [](SplitterId ref) {
    return ImpactLabel{ImpactKind::NonBefore, ref};
  };
  switch (t) {
    case Timing::T1: return {b, a(SplitterId::BS11), a(SplitterId::BS11)};
    case Timing::T2: return {b, b, a(SplitterId::BS11)};
    case Timing::T3: return {a(SplitterId::BS21), b, a(SplitterId::BS11)};
  }
  return {};
}

std::optional<Timing> supported_timing(const TimingClass& cls) {
  for (auto t : {Timing::T1, Timing::T2, Timing::T3})
    if (timing_class(t) == cls) return t;
  return std::nullopt;
}

TimingClass classify_impacts(const SetupGeometry& geometry,
                             const PathPair& path, Subensemble subensemble) {
  const bool interfering =
      subensemble == Subensemble::Long || subensemble == Subensemble::Short;
  TimingClass out;
  if (!interfering) return out;
  const auto events = impact_schedule(geometry, path);
  for (auto own : kSplitters) {
    const double v = geometry.splitter(own).velocity;
    const double t_own = lorentz_time(events[index(own)], v);
    std::optional<SplitterId> latest;
    double latest_time = 0.0;
    for (auto other : kSplitters) {
      if (same_photon(own, other)) continue;
      const double t = lorentz_time(events[index(other)], v);
      if (t <= t_own && (!latest || t > latest_time)) {
        latest = other;
        latest_time = t;
      }
    }
    if (latest) out.label(own) = ImpactLabel{ImpactKind::NonBefore, latest};
  }
  return out;
}

TimingReport canonical_timing(const SetupGeometry& geometry) {
  TimingReport report;
  bool unanimous = true;
  for (const auto& path : subensemble_paths(Subensemble::Long)) {
    PathTiming pt;
    pt.path = path;
    pt.events = impact_schedule(geometry, path);
    for (auto frame : kSplitters) {
      const double v = geometry.splitter(frame).velocity;
      for (auto ev : kSplitters)
        pt.frame_times[index(frame)][index(ev)] =
            lorentz_time(pt.events[index(ev)], v);
    }
    pt.timing = classify_impacts(geometry, path, Subensemble::Long);
    if (!report.paths.empty() && !(report.paths.front().timing == pt.timing))
      unanimous = false;
    report.paths.push_back(pt);
  }
  if (unanimous) report.timing = report.paths.front().timing;
  return report;
}

}  // namespace msim
