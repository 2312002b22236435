#include "msim/pathspace.hpp"

#include <cmath>

#include "msim/error.hpp"

namespace msim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

char arm_char(Arm a) { return a == Arm::Long ? 'L' : 'l'; }

Arm parse_arm(char c, std::string_view code) {
  if (c == 'L') return Arm::Long;
  if (c == 'l') return Arm::Short;
  throw ConfigError("invalid path code '" + std::string(code) + "'");
}

void check_sign(int v, const char* name) {
  if (v != 1 && v != -1)
    throw ConfigError(std::string(name) + " must be +1 or -1");
}

JointAmplitude unimodular(double phase) { return std::polar(1.0, phase); }

}  // namespace

std::string_view to_string(Subensemble s) {
  switch (s) {
    case Subensemble::TwoLongMinusShort: return "2L-l";
    case Subensemble::Long: return "L";
    case Subensemble::Short: return "l";
    case Subensemble::TwoShortMinusLong: return "2l-L";
    case Subensemble::Lost: return "lost";
  }
  return "?";
}

Subensemble parse_subensemble(std::string_view text) {
  for (auto s : {Subensemble::TwoLongMinusShort, Subensemble::Long,
                 Subensemble::Short, Subensemble::TwoShortMinusLong,
                 Subensemble::Lost}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown subensemble '" + std::string(text) + "'");
}

std::vector<std::string> ArmLengths::validate() const {
  if (!(short_arm > 0.0))
    throw ConfigError("arms: short arm l must be > 0");
  if (!(long_arm > short_arm))
    throw ConfigError("arms: long arm L must exceed short arm l");
  if (!(link_segment >= 0.0))
    throw ConfigError("arms: link segment s must be >= 0");
  if (!(coherence_length >= 0.0))
    throw ConfigError("arms: coherence_length must be >= 0");
  std::vector<std::string> warnings;
  if (long_arm - short_arm <= coherence_length)
    warnings.emplace_back(
        "arms: path difference L - l does not exceed the coherence length");
  return warnings;
}

double reduce_phase(double radians) {
  if (!std::isfinite(radians)) throw ConfigError("phase must be finite");
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

PhaseSettings::PhaseSettings(double alpha, double beta, double gamma)
    : alpha_(reduce_phase(alpha)),
      beta_(reduce_phase(beta)),
      gamma_(reduce_phase(gamma)) {}

std::string PathPair::code() const {
  std::string out;
  out += arm_char(photon1);
  out += '/';
  out += arm_char(photon2_first);
  if (exit == ExitPort::R) {
    out += 'r';
  } else {
    out += 's';
    out += arm_char(photon2_second);
  }
  return out;
}

PathPair PathPair::parse(std::string_view code) {
  if (code.size() == 4 && code[1] == '/' && code[3] == 'r')
    return lost(parse_arm(code[0], code), parse_arm(code[2], code));
  if (code.size() == 5 && code[1] == '/' && code[3] == 's')
    return detected(parse_arm(code[0], code), parse_arm(code[2], code),
                    parse_arm(code[4], code));
  throw ConfigError("invalid path code '" + std::string(code) + "'");
}

std::array<PathPair, 8> enumerate_detectable_paths() {
  std::array<PathPair, 8> out{};
  std::size_t i = 0;
  for (Arm p1 : {Arm::Short, Arm::Long})
    for (Arm p2a : {Arm::Short, Arm::Long})
      for (Arm p2b : {Arm::Short, Arm::Long})
        out[i++] = PathPair::detected(p1, p2a, p2b);
  return out;
}

Subensemble classify_subensemble(const PathPair& path) {
  if (!path.is_detectable()) return Subensemble::Lost;
  // Long passages of photon 2 minus those of photon 1 fix the coincidence
  // delay: 2 -> 2L-l, 1 -> L, 0 -> l, -1 -> 2l-L.
  const int n2 = (path.photon2_first == Arm::Long) +
                 (path.photon2_second == Arm::Long);
  const int n1 = (path.photon1 == Arm::Long);
  switch (n2 - n1) {
    case 2: return Subensemble::TwoLongMinusShort;
    case 1: return Subensemble::Long;
    case 0: return Subensemble::Short;
    default: return Subensemble::TwoShortMinusLong;
  }
}

std::vector<PathPair> subensemble_paths(Subensemble s) {
  std::vector<PathPair> out;
  for (const auto& p : enumerate_detectable_paths())
    if (classify_subensemble(p) == s) out.push_back(p);
  return out;
}

double time_signature(const PathPair& path, const ArmLengths& arms) {
  if (!path.is_detectable())
    throw ConfigError("time_signature: lost path has no coincidence");
  const double len1 = arms.length(path.photon1);
  const double len2 = arms.length(path.photon2_first) + arms.link_segment +
                      arms.length(path.photon2_second);
  return (len2 - len1 - (arms.long_arm + arms.link_segment)) / kSpeedOfLight;
}

JointAmplitude joint_amplitude(const PathPair& path, OutcomePorts ports,
                               const PhaseSettings& phases) {
  if (!path.is_detectable())
    throw ConfigError("joint_amplitude: path " + path.code() +
                      " is not detectable");
  check_sign(ports.sigma, "sigma");
  check_sign(ports.omega, "omega");
  double phase = 0.0;
  if (path.photon1 == Arm::Long) {
    phase += phases.alpha();
    if (ports.sigma < 0) phase += kPi;
  }
  if (path.photon2_first == Arm::Long) phase += phases.beta();
  if (path.photon2_second == Arm::Long) {
    phase += phases.gamma();
    if (ports.omega < 0) phase += kPi;
  }
  return unimodular(phase) / 8.0;
}

JointAmplitude truncated_amplitude(Arm photon1, Arm photon2_first,
                                   ExitPort port, int sigma,
                                   const PhaseSettings& phases) {
  check_sign(sigma, "sigma");
  double phase = 0.0;
  if (photon1 == Arm::Long) {
    phase += phases.alpha();
    if (sigma < 0) phase += kPi;
  }
  if (photon2_first == Arm::Long) {
    phase += phases.beta();
    if (port == ExitPort::R) phase += kPi;
  }
  return unimodular(phase) / 4.0;
}

}  // namespace msim
