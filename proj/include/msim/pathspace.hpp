#pragma once

// Joint photon paths through the three-interferometer setup, their
// time-delay subensembles and probability amplitudes.
//
// Photon 1 crosses one interferometer (arm l or L) and is detected behind
// BS11. Photon 2 crosses a first interferometer (arm l or L), leaves BS21
// by port s (into the second interferometer) or r (lost), then crosses the
// second interferometer (arm l or L) and is detected behind BS22.

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace msim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

enum class Arm : std::uint8_t { Short, Long };
enum class ExitPort : std::uint8_t { S, R };

/// Time-delay class of a path pair. `Lost` collects photon-2 exits through
/// port r of BS21.
enum class Subensemble : std::uint8_t {
  TwoLongMinusShort,  // "2L-l"
  Long,               // "L"
  Short,              // "l"
  TwoShortMinusLong,  // "2l-L"
  Lost,
};

std::string_view to_string(Subensemble s);
Subensemble parse_subensemble(std::string_view text);

struct ArmLengths {
  double long_arm = 0.0;          // L, meters
  double short_arm = 0.0;         // l, meters
  double link_segment = 0.0;      // s, meters
  double coherence_length = 0.0;  // meters

  /// Throws ConfigError unless L > l > 0 and s >= 0. Returns warnings
  /// (path difference not exceeding the coherence length).
  std::vector<std::string> validate() const;

  double length(Arm a) const { return a == Arm::Long ? long_arm : short_arm; }

  friend bool operator==(const ArmLengths&, const ArmLengths&) = default;
};

/// Phases alpha, beta, gamma in radians, stored reduced to [0, 2pi).
class PhaseSettings {
 public:
  PhaseSettings() = default;
  PhaseSettings(double alpha, double beta, double gamma);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  friend bool operator==(const PhaseSettings&, const PhaseSettings&) = default;

 private:
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double gamma_ = 0.0;
};

double reduce_phase(double radians);

struct OutcomePorts {
  int sigma = +1;  // photon-1 detector D1(sigma)
  int omega = +1;  // photon-2 detector D2(omega)
};

struct PathPair {
  Arm photon1 = Arm::Short;
  Arm photon2_first = Arm::Short;
  ExitPort exit = ExitPort::S;
  Arm photon2_second = Arm::Short;  // Short by convention when exit == R

  static constexpr PathPair detected(Arm p1, Arm p2a, Arm p2b) {
    return PathPair{p1, p2a, ExitPort::S, p2b};
  }
  static constexpr PathPair lost(Arm p1, Arm p2a) {
    return PathPair{p1, p2a, ExitPort::R, Arm::Short};
  }

  bool is_detectable() const { return exit == ExitPort::S; }

  /// "L/LsL", "l/Lsl", ... for detected pairs; "l/Lr" for lost ones.
  std::string code() const;
  static PathPair parse(std::string_view code);

  friend bool operator==(const PathPair&, const PathPair&) = default;
};

using JointAmplitude = std::complex<double>;

/// The 8 detectable path pairs, ordered with photon 1's arm slowest and
/// photon 2's second arm fastest (l before L): (l,lsl), (l,lsL), (l,Lsl),
/// (l,LsL), (L,lsl), (L,lsL), (L,Lsl), (L,LsL).
std::array<PathPair, 8> enumerate_detectable_paths();

Subensemble classify_subensemble(const PathPair& path);

/// Detectable paths belonging to `s`, in enumeration order. Empty for Lost.
std::vector<PathPair> subensemble_paths(Subensemble s);

/// Coincidence time difference of a detectable path relative to the
/// subensemble-L peak, in seconds. Throws ConfigError for lost paths.
double time_signature(const PathPair& path, const ArmLengths& arms);

/// Amplitude of a detectable path with outcomes (sigma, omega). Magnitude
/// 1/8 (six 50-50 passages). Phase convention: alpha, beta, gamma on the
/// long arm of the respective interferometer, plus pi on the "-" port of
/// BS11 / BS22 when the arm recombined there is the long one.
JointAmplitude joint_amplitude(const PathPair& path, OutcomePorts ports,
                               const PhaseSettings& phases);

/// Amplitude of a path prefix ending at an output port of BS21, with
/// photon 1 leaving BS11 by `sigma`. Magnitude 1/4. Port r carries an
/// extra pi when photon 2's first arm is long.
JointAmplitude truncated_amplitude(Arm photon1, Arm photon2_first,
                                   ExitPort port, int sigma,
                                   const PhaseSettings& phases);

}  // namespace msim
