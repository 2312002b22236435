#include "msim/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msim/error.hpp"

namespace msim {

namespace {

constexpr double kPairPrior = 0.25;  // each (photon-1 arm, photon-2 first arm)
constexpr double kHalf = 0.5;        // before-impacts and second-arm choice

double norm2(JointAmplitude a) { return std::norm(a); }

// Sum of full amplitudes over the detectable paths of a subensemble.
JointAmplitude subensemble_amplitude(Subensemble s, int sigma, int omega,
                                     const PhaseSettings& phases) {
  JointAmplitude sum{};
  for (const auto& p : subensemble_paths(s))
    sum += joint_amplitude(p, {sigma, omega}, phases);
  return sum;
}

// Pairs with equal first arms, (L,L) + (l,l), combined at a BS21 port.
JointAmplitude equal_arm_amplitude(ExitPort port, int sigma,
                                   const PhaseSettings& phases) {
  return truncated_amplitude(Arm::Long, Arm::Long, port, sigma, phases) +
         truncated_amplitude(Arm::Short, Arm::Short, port, sigma, phases);
}

// P(omega = +1 | sigma) from combined amplitudes of an interfering
// subensemble.
double interfering_omega_plus(Subensemble s, int sigma,
                              const PhaseSettings& phases) {
  const double plus = norm2(subensemble_amplitude(s, sigma, +1, phases));
  const double minus = norm2(subensemble_amplitude(s, sigma, -1, phases));
  return plus / (plus + minus);
}

void finalize(PredictionTable& t) {
  t.negative.clear();
  for (int s : kSigns) {
    double m = 0.0;
    for (int w : kSigns) {
      const double p = t.at(s, w);
      m += p;
      if (p < 0.0) t.negative.push_back({s, w, p});
    }
    t.marginal_sigma[sign_index(s)] = m;
  }
  t.valid = t.negative.empty();
}

PredictionTable ms_t1(const PhaseSettings& ph) {
  PredictionTable t;
  t.theory = Theory::MS;
  t.timing = Timing::T1;
  t.phases = ph;
  for (int s : kSigns) {
    // (L,L) and (l,l): photon 2 non-before at BS21.
    const double p_b11_a21s =
        (kPairPrior * kHalf + kPairPrior * kHalf) * ms_prob_a21_s(s, ph);
    // (l,L): before-impacts on both sides.
    const double p_b11_b21s = kPairPrior * kHalf * kHalf;
    // Subpopulation L needs second arm L after (L,L)/(l,l), l after (l,L).
    const double reach_bs22 = kHalf * p_b11_a21s + kHalf * p_b11_b21s;
    const double p_plus = interfering_omega_plus(Subensemble::Long, s, ph);
    t.joint[sign_index(s)][0] = p_plus * reach_bs22;
    t.joint[sign_index(s)][1] = (1.0 - p_plus) * reach_bs22;
  }
  finalize(t);
  return t;
}

// Probability that photon 1 yields sigma (before-impact) and photon 2 reaches
// BS22 through a subpopulation-L path, all impacts up to BS21 being before.
double t2_reach_bs22() {
  // (L,L) and (l,l) need s then L; (l,L) needs s then l.
  return 3.0 * kPairPrior * kHalf * (kHalf * kHalf);
}

double t2_rule(int sigma, int omega, const PhaseSettings& ph) {
  const auto a_long = joint_amplitude(
      PathPair::detected(Arm::Long, Arm::Long, Arm::Long), {sigma, omega}, ph);
  const auto a_first_long = joint_amplitude(
      PathPair::detected(Arm::Short, Arm::Long, Arm::Short), {sigma, omega},
      ph);
  const auto a_second_long = joint_amplitude(
      PathPair::detected(Arm::Short, Arm::Short, Arm::Long), {sigma, omega},
      ph);
  return norm2(a_long) + norm2(a_first_long + a_second_long) +
         2.0 * (a_long * std::conj(a_first_long)).real();
}

PredictionTable ms_t2(const PhaseSettings& ph) {
  PredictionTable t;
  t.theory = Theory::MS;
  t.timing = Timing::T2;
  t.phases = ph;
  for (int s : kSigns)
    for (int w : kSigns) t.joint[sign_index(s)][sign_index(w)] = t2_rule(s, w, ph);
  finalize(t);
  return t;
}

PredictionTable ms_t3(const PhaseSettings& ph) {
  PredictionTable t;
  t.theory = Theory::MS;
  t.timing = Timing::T3;
  t.phases = ph;
  // b21 port s then second arm L (equal first arms) or l ((l,L)).
  const double pair_weight = kPairPrior * kHalf * (kHalf * kHalf);
  for (int s : kSigns) {
    for (int w : kSigns) {
      double p = 0.0;
      // (L,L), (l,l): photon 1 follows BS21's port; photon 2 at BS22 follows
      // the value sigma' photon 1 would have produced in a before-impact.
      for (int equal_pair = 0; equal_pair < 2; ++equal_pair)
        for (int s_cf : kSigns)
          p += pair_weight * ms_prob_a11(s, ExitPort::S, ph) *
               ms_t2_conditional(w, s_cf, ph);
      // (l,L): photon 1's impact is before; photon 2 follows it.
      p += pair_weight * ms_t2_conditional(w, s, ph);
      t.joint[sign_index(s)][sign_index(w)] = p;
    }
  }
  finalize(t);
  return t;
}

}  // namespace

std::string_view to_string(Theory t) { return t == Theory::QM ? "qm" : "ms"; }

Theory parse_theory(std::string_view text) {
  if (text == "qm") return Theory::QM;
  if (text == "ms") return Theory::MS;
  throw ConfigError("unknown theory '" + std::string(text) +
                    "' (expected qm or ms)");
}

double PredictionTable::total() const {
  return marginal_sigma[0] + marginal_sigma[1];
}

Correlators correlators(const PredictionTable& t) {
  double sum = 0.0, so = 0.0, s1 = 0.0, s2 = 0.0;
  for (int s : kSigns)
    for (int w : kSigns) {
      const double p = t.at(s, w);
      sum += p;
      so += s * w * p;
      s1 += s * p;
      s2 += w * p;
    }
  return {so / sum, s1 / sum, s2 / sum};
}

PredictionTable qm_joint(const PhaseSettings& ph) {
  PredictionTable t;
  t.theory = Theory::QM;
  t.timing = std::nullopt;
  t.phases = ph;
  const double c_ab = std::cos(ph.alpha() + ph.beta());
  const double c_ag = std::cos(ph.alpha() + ph.gamma());
  const double c_gb = std::cos(ph.gamma() - ph.beta());
  for (int s : kSigns)
    for (int w : kSigns)
      t.joint[sign_index(s)][sign_index(w)] =
          (3.0 + 2.0 * s * c_ab + 2.0 * s * w * c_ag + 2.0 * w * c_gb) / 64.0;
  finalize(t);
  return t;
}

Correlators qm_correlators(const PhaseSettings& ph) {
  return correlators(qm_joint(ph));
}

double ms_prob_a21_s(int sigma, const PhaseSettings& ph) {
  const double s = norm2(equal_arm_amplitude(ExitPort::S, sigma, ph));
  const double r = norm2(equal_arm_amplitude(ExitPort::R, sigma, ph));
  return s / (s + r);
}

double ms_prob_a11(int sigma, ExitPort port, const PhaseSettings& ph) {
  const double num = norm2(equal_arm_amplitude(port, sigma, ph));
  const double den = norm2(equal_arm_amplitude(port, +1, ph)) +
                     norm2(equal_arm_amplitude(port, -1, ph));
  return num / den;
}

double ms_t2_conditional(int omega, int sigma, const PhaseSettings& ph) {
  return t2_rule(sigma, omega, ph) / t2_reach_bs22();
}

PredictionTable ms_joint(Timing timing, const PhaseSettings& ph) {
  switch (timing) {
    case Timing::T1: return ms_t1(ph);
    case Timing::T2: return ms_t2(ph);
    case Timing::T3: return ms_t3(ph);
  }
  throw UnsupportedTimingError("unsupported timing");
}

PredictionTable ms_joint(const TimingClass& timing, const PhaseSettings& ph) {
  const auto t = supported_timing(timing);
  if (!t)
    throw UnsupportedTimingError("no Multisimultaneity rule for timing " +
                                 timing.to_string());
  return ms_joint(*t, ph);
}

Correlators ms_correlators(Timing timing, const PhaseSettings& ph) {
  return correlators(ms_joint(timing, ph));
}

PredictionTable predict(Theory theory, std::optional<Timing> timing,
                        const PhaseSettings& ph) {
  if (theory == Theory::QM) return qm_joint(ph);
  if (!timing)
    throw UnsupportedTimingError("Multisimultaneity needs a timing class");
  return ms_joint(*timing, ph);
}

MsKernel::MsKernel(Timing timing, const PhaseSettings& phases)
    : timing_(timing), phases_(phases), table_(ms_joint(timing, phases)) {
  for (int s : kSigns) {
    const auto i = sign_index(s);
    p_exit_equal_[i] = ms_prob_a21_s(s, phases);
    p_omega_interfering_[0][i] =
        interfering_omega_plus(Subensemble::Long, s, phases);
    p_omega_interfering_[1][i] =
        interfering_omega_plus(Subensemble::Short, s, phases);
    switch (timing) {
      case Timing::T1: p_omega_l_[i] = p_omega_interfering_[0][i]; break;
      case Timing::T2: p_omega_l_[i] = ms_t2_conditional(+1, s, phases); break;
      case Timing::T3: p_omega_l_[i] = table_.at(s, +1) / table_.marginal(s); break;
    }
  }
  p_a11_s_[0] = ms_prob_a11(+1, ExitPort::S, phases);
  p_a11_s_[1] = ms_prob_a11(+1, ExitPort::R, phases);
}

double MsKernel::p_sigma_plus(Arm photon1, Arm photon2_first,
                              ExitPort port) const {
  if (timing_ == Timing::T3 && photon1 == photon2_first)
    return p_a11_s_[port == ExitPort::S ? 0 : 1];
  return kHalf;
}

double MsKernel::p_exit_s(Arm photon1, Arm photon2_first, int sigma) const {
  if (timing_ == Timing::T1 && photon1 == photon2_first)
    return p_exit_equal_[sign_index(sigma)];
  return kHalf;
}

double MsKernel::p_omega_plus(const PathPair& path, int sigma) const {
  const auto sub = classify_subensemble(path);
  if (sub == Subensemble::Long) return p_omega_l_[sign_index(sigma)];
  if (timing_ == Timing::T1 && sub == Subensemble::Short)
    return p_omega_interfering_[1][sign_index(sigma)];
  return kHalf;
}

double MsKernel::probability(const PathPair& path, int sigma, int omega) const {
  const auto pick = [](double p_plus, bool plus) {
    return plus ? p_plus : 1.0 - p_plus;
  };
  double p = kPairPrior;
  if (port_first()) {
    p *= kHalf;
    p *= pick(p_sigma_plus(path.photon1, path.photon2_first, path.exit),
              sigma > 0);
  } else {
    p *= kHalf;
    p *= pick(p_exit_s(path.photon1, path.photon2_first, sigma),
              path.exit == ExitPort::S);
  }
  if (!path.is_detectable()) return p;
  p *= kHalf;
  return p * pick(p_omega_plus(path, sigma), omega > 0);
}

std::vector<Channel> qm_channels(const PhaseSettings& ph) {
  std::vector<Channel> out;
  for (auto sub : {Subensemble::TwoLongMinusShort, Subensemble::Long,
                   Subensemble::Short, Subensemble::TwoShortMinusLong})
    for (int s : kSigns)
      for (int w : kSigns)
        out.push_back({sub, s, w, norm2(subensemble_amplitude(sub, s, w, ph))});
  for (int s : kSigns) {
    const double p =
        norm2(equal_arm_amplitude(ExitPort::R, s, ph)) +
        norm2(truncated_amplitude(Arm::Short, Arm::Long, ExitPort::R, s, ph)) +
        norm2(truncated_amplitude(Arm::Long, Arm::Short, ExitPort::R, s, ph));
    out.push_back({Subensemble::Lost, s, 0, p});
  }
  return out;
}

std::vector<Channel> ms_channels(Timing timing, const PhaseSettings& ph) {
  const MsKernel kernel(timing, ph);
  std::vector<Channel> out;
  const auto add = [&out](Subensemble sub, int s, int w, double p) {
    for (auto& c : out)
      if (c.subensemble == sub && c.sigma == s && c.omega == w) {
        c.probability += p;
        return;
      }
    out.push_back({sub, s, w, p});
  };
  for (const auto& path : enumerate_detectable_paths())
    for (int s : kSigns)
      for (int w : kSigns)
        add(classify_subensemble(path), s, w, kernel.probability(path, s, w));
  for (Arm a : {Arm::Short, Arm::Long})
    for (Arm b : {Arm::Short, Arm::Long})
      for (int s : kSigns)
        add(Subensemble::Lost, s, 0, kernel.probability(PathPair::lost(a, b), s, 0));
  return out;
}

ScenarioReport scenario_report(Scenario scenario, int beta_steps) {
  ScenarioReport r;
  r.scenario = scenario;
  if (scenario == Scenario::MotionExperiment) {
    const PhaseSettings ph(0.0, 0.0, 0.0);
    r.timing = Timing::T2;
    r.quantity = "e_sigma";
    r.rows.push_back({0.0, qm_correlators(ph).e_sigma,
                      ms_correlators(Timing::T2, ph).e_sigma});
  } else {
    if (beta_steps < 2) throw ConfigError("scenario: beta_steps must be >= 2");
    r.timing = Timing::T3;
    r.quantity = "e_sigma_omega";
    for (int i = 0; i < beta_steps; ++i) {
      const double beta = kPi * i / (beta_steps - 1);
      const PhaseSettings ph(0.0, beta, 0.0);
      r.rows.push_back({beta, qm_correlators(ph).e_sigma_omega,
                        ms_correlators(Timing::T3, ph).e_sigma_omega});
    }
  }
  const auto [lo, hi] = std::minmax_element(
      r.rows.begin(), r.rows.end(),
      [](const ScenarioRow& a, const ScenarioRow& b) { return a.ms < b.ms; });
  r.ms_min = lo->ms;
  r.ms_max = hi->ms;
  return r;
}

LinkRates detector_link_rates() {
  // Each detector decides in its own frame before the other can influence
  // it, so the two firings are independent with probability 1/2 each.
  const double fire = 0.5;
  return {fire * fire, (1.0 - fire) * (1.0 - fire), 2.0 * fire * (1.0 - fire)};
}

std::string_view to_string(PhaseParameter p) {
  switch (p) {
    case PhaseParameter::Alpha: return "alpha";
    case PhaseParameter::Beta: return "beta";
    case PhaseParameter::Gamma: return "gamma";
  }
  return "?";
}

PhaseParameter parse_phase_parameter(std::string_view text) {
  for (auto p : {PhaseParameter::Alpha, PhaseParameter::Beta,
                 PhaseParameter::Gamma})
    if (to_string(p) == text) return p;
  throw ConfigError("unknown phase parameter '" + std::string(text) +
                    "' (expected alpha, beta or gamma)");
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::ESigmaOmega: return "e_sigma_omega";
    case Quantity::ESigma: return "e_sigma";
    case Quantity::EOmega: return "e_omega";
    case Quantity::MarginalPlus: return "marginal_plus";
  }
  return "?";
}

Quantity parse_quantity(std::string_view text) {
  for (auto q : {Quantity::ESigmaOmega, Quantity::ESigma, Quantity::EOmega,
                 Quantity::MarginalPlus})
    if (to_string(q) == text) return q;
  throw ConfigError("unknown quantity '" + std::string(text) + "'");
}

double quantity_value(const PredictionTable& table, Quantity q) {
  const auto c = correlators(table);
  switch (q) {
    case Quantity::ESigmaOmega: return c.e_sigma_omega;
    case Quantity::ESigma: return c.e_sigma;
    case Quantity::EOmega: return c.e_omega;
    case Quantity::MarginalPlus: return table.marginal(+1);
  }
  return 0.0;
}

std::vector<ScanRow> phase_scan(const PhaseSettings& base,
                                PhaseParameter parameter, double from,
                                double to, int steps, Quantity quantity,
                                Timing timing) {
  if (steps < 2) throw ConfigError("scan: steps must be >= 2");
  if (!std::isfinite(from) || !std::isfinite(to))
    throw ConfigError("scan: range must be finite");
  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double v = i == steps - 1 ? to : from + (to - from) * i / (steps - 1);
    double a = base.alpha(), b = base.beta(), g = base.gamma();
    switch (parameter) {
      case PhaseParameter::Alpha: a = v; break;
      case PhaseParameter::Beta: b = v; break;
      case PhaseParameter::Gamma: g = v; break;
    }
    const PhaseSettings ph(a, b, g);
    const auto ms = ms_joint(timing, ph);
    rows.push_back({v, quantity_value(qm_joint(ph), quantity),
                    quantity_value(ms, quantity), ms.valid});
  }
  return rows;
}

AuditReport no_signaling_audit(Theory theory, std::optional<Timing> timing,
                               int grid_steps, double tolerance) {
  if (grid_steps < 1) throw ConfigError("audit: grid_steps must be >= 1");
  if (theory == Theory::MS && !timing)
    throw UnsupportedTimingError("audit: Multisimultaneity needs a timing");
  AuditReport r{theory, theory == Theory::MS ? timing : std::nullopt,
                grid_steps};
  r.selective_min = 1.0;
  r.selective_max = 0.0;
  const double step = 2.0 * kPi / grid_steps;
  for (int i = 0; i < grid_steps; ++i)
    for (int j = 0; j < grid_steps; ++j)
      for (int k = 0; k < grid_steps; ++k) {
        const PhaseSettings ph(i * step, j * step, k * step);
        const auto channels = theory == Theory::QM ? qm_channels(ph)
                                                   : ms_channels(*timing, ph);
        double total = 0.0, plus = 0.0;
        for (const auto& c : channels) {
          total += c.probability;
          if (c.sigma > 0) plus += c.probability;
        }
        r.max_channel_sum_deviation =
            std::max(r.max_channel_sum_deviation, std::abs(total - 1.0));
        r.max_nonselective_deviation =
            std::max(r.max_nonselective_deviation, std::abs(plus - 0.5));
        const auto table = predict(theory, timing, ph);
        const double sel = table.marginal(+1);
        r.selective_min = std::min(r.selective_min, sel);
        r.selective_max = std::max(r.selective_max, sel);
      }
  r.selective_phase_dependent = r.selective_max - r.selective_min > tolerance;
  r.ok = r.max_nonselective_deviation <= tolerance &&
         r.max_channel_sum_deviation <= tolerance;
  return r;
}

}  // namespace msim
