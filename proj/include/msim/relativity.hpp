#pragma once

// Lab-frame impact schedule of the photons on the three recombining
// beam-splitters, Lorentz transformation into each splitter's rest frame,
// and before / non-before classification of every impact.
//
// Kinematics are one-dimensional: the source sits at x = 0 and emits at
// `source_emission_time`; photon 1 flies toward negative x, photon 2 toward
// positive x. Splitter positions are lab coordinates at the emission time,
// velocities are constant fractions of c. Interferometer arms, the link
// segment and delay lines are lumped optical delays spent at the departure
// point of each leg, after which the photon flies in a straight line to the
// (possibly moving) splitter. Detectors sit directly behind BS11 and BS22.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msim/pathspace.hpp"

namespace msim {

enum class SplitterId : std::uint8_t { BS11, BS21, BS22 };

std::string_view to_string(SplitterId id);
SplitterId parse_splitter_id(std::string_view text);

struct BeamSplitterSpec {
  SplitterId id = SplitterId::BS11;
  double position = 0.0;  // meters
  double velocity = 0.0;  // fraction of c, |v| < 1

  friend bool operator==(const BeamSplitterSpec&,
                         const BeamSplitterSpec&) = default;
};

struct DelayLines {
  double photon1 = 0.0;  // seconds, before BS11
  double photon2 = 0.0;  // seconds, before BS21

  friend bool operator==(const DelayLines&, const DelayLines&) = default;
};

struct SetupGeometry {
  std::array<BeamSplitterSpec, 3> beam_splitters{};  // indexed by SplitterId
  ArmLengths arms;
  DelayLines delays;
  double source_emission_time = 0.0;  // seconds

  const BeamSplitterSpec& splitter(SplitterId id) const {
    return beam_splitters[static_cast<std::size_t>(id)];
  }

  /// Throws ConfigError on violated invariants; returns warnings.
  std::vector<std::string> validate() const;

  friend bool operator==(const SetupGeometry&, const SetupGeometry&) = default;
};

struct ImpactEvent {
  SplitterId splitter = SplitterId::BS11;
  double time = 0.0;      // lab seconds
  double position = 0.0;  // lab meters
  PathPair path;
};

/// gamma * (t - v x / c) for an observer moving at `velocity` (fraction of
/// c). Throws ConfigError if |velocity| >= 1.
double lorentz_time(double time, double position, double velocity);
double lorentz_time(const ImpactEvent& event, double velocity);

/// Impacts on BS11, BS21 and BS22 (in that order) for a detectable path.
/// Throws ConfigError when the geometry cannot deliver photon 2 to BS21
/// and then BS22.
std::array<ImpactEvent, 3> impact_schedule(const SetupGeometry& geometry,
                                           const PathPair& path);

enum class ImpactKind : std::uint8_t { Before, NonBefore };

struct ImpactLabel {
  ImpactKind kind = ImpactKind::Before;
  std::optional<SplitterId> reference;  // set for NonBefore only

  friend bool operator==(const ImpactLabel&, const ImpactLabel&) = default;
};

struct TimingClass {
  ImpactLabel bs11;
  ImpactLabel bs21;
  ImpactLabel bs22;

  const ImpactLabel& label(SplitterId id) const;
  ImpactLabel& label(SplitterId id);

  /// e.g. "(a11[21], b21 a22[11])".
  std::string to_string() const;

  friend bool operator==(const TimingClass&, const TimingClass&) = default;
};

/// The three timings with prediction rules:
///   T1 = (b11, a21 a22), T2 = (b11, b21 a22), T3 = (a11[21], b21 a22).
enum class Timing : std::uint8_t { T1, T2, T3 };

std::string_view to_string(Timing t);
Timing parse_timing(std::string_view text);  // "t1" / "t2" / "t3"
TimingClass timing_class(Timing t);
std::optional<Timing> supported_timing(const TimingClass& cls);

/// Before / non-before labels of the three impacts of one path. Paths of
/// the non-interfering subensembles always get before labels.
TimingClass classify_impacts(const SetupGeometry& geometry,
                             const PathPair& path, Subensemble subensemble);

struct PathTiming {
  PathPair path;
  std::array<ImpactEvent, 3> events{};
  /// frame_times[i][j]: time of impact j in the rest frame of splitter i.
  std::array<std::array<double, 3>, 3> frame_times{};
  TimingClass timing;
};

struct TimingReport {
  std::vector<PathTiming> paths;  // subensemble-L paths
  std::optional<TimingClass> timing;  // empty when the paths disagree

  bool mixed() const { return !timing.has_value(); }
};

/// Classifies every subensemble-L path; unanimous result or Mixed.
TimingReport canonical_timing(const SetupGeometry& geometry);

}  // namespace msim
