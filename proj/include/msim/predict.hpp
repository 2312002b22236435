#pragma once

// Closed-form predictions of standard quantum mechanics and of the
// timing-dependent Multisimultaneity rules for the three-interferometer
// experiment. Tables refer to subpopulation L (coincidence window on the
// central peak) unless stated otherwise.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "msim/pathspace.hpp"
#include "msim/relativity.hpp"

namespace msim {

enum class Theory : std::uint8_t { QM, MS };

std::string_view to_string(Theory t);
Theory parse_theory(std::string_view text);  // "qm" / "ms"

/// Index of a detector sign in 2-element tables: +1 -> 0, -1 -> 1.
constexpr std::size_t sign_index(int sign) { return sign > 0 ? 0 : 1; }
inline constexpr std::array<int, 2> kSigns = {+1, -1};

struct NegativeEntry {
  int sigma = 0;
  int omega = 0;
  double value = 0.0;

  friend bool operator==(const NegativeEntry&, const NegativeEntry&) = default;
};

struct PredictionTable {
  Theory theory = Theory::QM;
  std::optional<Timing> timing;  // MS only
  PhaseSettings phases;
  std::array<std::array<double, 2>, 2> joint{};  // [sigma][omega]
  std::array<double, 2> marginal_sigma{};        // sum over omega
  bool valid = true;
  std::vector<NegativeEntry> negative;

  double at(int sigma, int omega) const {
    return joint[sign_index(sigma)][sign_index(omega)];
  }
  double marginal(int sigma) const { return marginal_sigma[sign_index(sigma)]; }
  double total() const;

  friend bool operator==(const PredictionTable&,
                         const PredictionTable&) = default;
};

struct Correlators {
  double e_sigma_omega = 0.0;
  double e_sigma = 0.0;
  double e_omega = 0.0;

  friend bool operator==(const Correlators&, const Correlators&) = default;
};

/// Ratio-form correlators sum(s*w*P)/sum(P) etc. of a table.
Correlators correlators(const PredictionTable& table);

PredictionTable qm_joint(const PhaseSettings& phases);
Correlators qm_correlators(const PhaseSettings& phases);

/// Multisimultaneity joint table for one of the supported timings:
///   T1 by the causal chain of path-pair priors, 50/50 before-impacts and
///      amplitude-ratio conditionals (reproduces QM),
///   T2 by the combination rule for (b11, b21 a22),
///   T3 by the counterfactual sum for (a11[21], b21 a22).
/// Negative entries are kept and flagged via `valid` / `negative`.
PredictionTable ms_joint(Timing timing, const PhaseSettings& phases);
PredictionTable ms_joint(const TimingClass& timing,
                         const PhaseSettings& phases);
Correlators ms_correlators(Timing timing, const PhaseSettings& phases);

/// QM ignores `timing`; MS requires it (UnsupportedTimingError otherwise).
PredictionTable predict(Theory theory, std::optional<Timing> timing,
                        const PhaseSettings& phases);

// Conditional probabilities of the Multisimultaneity rules.

/// P(a21 s | b11 sigma): photon 2 leaves BS21 by s given photon 1's
/// before-impact value, for pairs with equal first arms.
double ms_prob_a21_s(int sigma, const PhaseSettings& phases);
/// P(a11[21] sigma | b21 port): photon 1's value given photon 2's BS21 port,
/// for pairs with equal first arms.
double ms_prob_a11(int sigma, ExitPort port, const PhaseSettings& phases);
/// P(b21 a22 omega | b11 sigma) of the T2 rule; may leave [0, 1].
double ms_t2_conditional(int omega, int sigma, const PhaseSettings& phases);

/// Stage probabilities of a Multisimultaneity trial: first-arm prior 1/4,
/// then photon 1's port and photon 2's BS21 port (order depends on the
/// timing), second arm 1/2, then photon 2's BS22 port. Subpopulations
/// without a stated rule get 50/50 ports.
class MsKernel {
 public:
  MsKernel(Timing timing, const PhaseSettings& phases);

  Timing timing() const { return timing_; }
  /// T3 draws photon 2's BS21 port before photon 1's value.
  bool port_first() const { return timing_ == Timing::T3; }

  double p_sigma_plus(Arm photon1, Arm photon2_first, ExitPort port) const;
  double p_exit_s(Arm photon1, Arm photon2_first, int sigma) const;
  double p_omega_plus(const PathPair& path, int sigma) const;

  /// Probability of the complete outcome (path, sigma, omega); omega is
  /// ignored for lost paths.
  double probability(const PathPair& path, int sigma, int omega) const;

  /// Subpopulation-L table the kernel reproduces.
  const PredictionTable& table() const { return table_; }

 private:
  Timing timing_;
  PhaseSettings phases_;
  PredictionTable table_;
  std::array<double, 2> p_exit_equal_{};   // T1: P(a21 s | sigma)
  std::array<double, 2> p_a11_s_{};        // T3: P(sigma=+ | port s / r)
  std::array<std::array<double, 2>, 2> p_omega_interfering_{};  // T1 [L/l][sigma]
  std::array<double, 2> p_omega_l_{};      // L subpopulation, per sigma
};

/// One outcome channel of the full (non-windowed) experiment.
struct Channel {
  Subensemble subensemble = Subensemble::Long;
  int sigma = +1;
  int omega = +1;  // 0 for lost channels
  double probability = 0.0;
};

/// Exact channel distribution of QM by amplitude enumeration: interfering
/// subensembles combine amplitudes, the lost branch combines the pairs
/// with equal first arms. Sums to 1.
std::vector<Channel> qm_channels(const PhaseSettings& phases);

/// Exact channel distribution generated by `MsKernel`, aggregated per
/// subensemble.
std::vector<Channel> ms_channels(Timing timing, const PhaseSettings& phases);

enum class Scenario : std::uint8_t { MotionExperiment, RestExperiment };

struct ScenarioRow {
  double beta = 0.0;
  double qm = 0.0;
  double ms = 0.0;
};

struct ScenarioReport {
  Scenario scenario = Scenario::MotionExperiment;
  Timing timing = Timing::T2;
  std::string quantity;  // "e_sigma" or "e_sigma_omega"
  std::vector<ScenarioRow> rows;
  double ms_min = 0.0;
  double ms_max = 0.0;
};

/// Motion experiment: alpha = beta = gamma = 0, timing T2, E_sigma.
/// Rest experiment: alpha = gamma = 0, timing T3, E_sigma_omega over
/// `beta_steps` values of beta spanning [0, pi].
ScenarioReport scenario_report(Scenario scenario, int beta_steps = 25);

struct LinkRates {
  double both_fire = 0.0;
  double neither_fires = 0.0;
  double exactly_one = 0.0;
};

/// Firing rates of D2(+) and D2(-) when each fires independently with
/// probability 1/2 (detectors in relative motion, each before the other in
/// its own frame).
LinkRates detector_link_rates();

enum class PhaseParameter : std::uint8_t { Alpha, Beta, Gamma };
enum class Quantity : std::uint8_t { ESigmaOmega, ESigma, EOmega, MarginalPlus };

std::string_view to_string(PhaseParameter p);
PhaseParameter parse_phase_parameter(std::string_view text);
std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view text);

double quantity_value(const PredictionTable& table, Quantity q);

struct ScanRow {
  double value = 0.0;  // scanned phase, radians (as requested, unreduced)
  double qm = 0.0;
  double ms = 0.0;
  bool ms_valid = true;
};

/// `steps` evenly spaced values of one phase over [from, to], the other
/// phases taken from `base`. Throws ConfigError if steps < 2.
std::vector<ScanRow> phase_scan(const PhaseSettings& base,
                                PhaseParameter parameter, double from,
                                double to, int steps, Quantity quantity,
                                Timing timing);

struct AuditReport {
  Theory theory = Theory::QM;
  std::optional<Timing> timing;
  int grid_steps = 0;
  double max_nonselective_deviation = 0.0;  // max |P(sigma) - 1/2|
  double max_channel_sum_deviation = 0.0;   // max |sum of channels - 1|
  double selective_min = 0.0;  // windowed P(sigma = +) over the grid
  double selective_max = 0.0;
  bool selective_phase_dependent = false;
  bool ok = false;
};

/// Non-selective photon-1 marginal over every channel (all subensembles
/// and the lost branch) on a grid_steps^3 phase grid.
AuditReport no_signaling_audit(Theory theory, std::optional<Timing> timing,
                               int grid_steps, double tolerance = 1e-12);

}  // namespace msim
