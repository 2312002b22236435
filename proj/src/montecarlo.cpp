#include "msim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "msim/error.hpp"

namespace msim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Runs fill(begin, end) over disjoint trial ranges.
template <class Fill>
void parallel_trials(std::uint64_t trials, unsigned threads, Fill fill) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t min_chunk = 1 << 14;
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, (trials + min_chunk - 1) / min_chunk));
  if (threads <= 1) {
    fill(std::uint64_t{0}, trials);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned k = 0; k < threads; ++k) {
    const std::uint64_t begin = k * chunk;
    const std::uint64_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([=] { fill(begin, end); });
  }
  for (auto& t : pool) t.join();
}

// Lab impact schedules of the 8 detectable paths, in enumeration order.
struct Schedules {
  std::array<std::array<ImpactEvent, 3>, 8> events;
  double offset = 0.0;

  explicit Schedules(const SetupGeometry& g) {
    const auto paths = enumerate_detectable_paths();
    for (std::size_t i = 0; i < paths.size(); ++i)
      events[i] = impact_schedule(g, paths[i]);
    offset = channel2_offset(g);
  }

  static std::size_t index(const PathPair& p) {
    return (p.photon1 == Arm::Long) * 4 + (p.photon2_first == Arm::Long) * 2 +
           (p.photon2_second == Arm::Long);
  }

  // Photon-1 detection time; lost paths share it with any detected path of
  // the same photon-1 arm.
  double t1(const PathPair& p) const {
    return events[(p.photon1 == Arm::Long) * 4][0].time;
  }
  double t2(const PathPair& p) const { return events[index(p)][2].time - offset; }
};

void apply_jitter(EventRecord& e, double jitter, CounterRng& rng) {
  if (jitter <= 0.0) return;
  e.t1 += jitter * rng.normal();
  if (e.coincident()) e.t2 += jitter * rng.normal();
}

std::string format_entry(const NegativeEntry& n) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << (n.sigma > 0 ? "+" : "-") << "," << (n.omega > 0 ? "+" : "-")
     << ") = " << n.value;
  return os.str();
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t k = seed;
  const std::uint64_t a = splitmix(k);
  std::uint64_t t = trial ^ a;
  state_ = splitmix(t);
}

std::uint64_t CounterRng::next() { return splitmix(state_); }

double CounterRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void RunConfig::validate() const {
  geometry.validate();
  if (trials < 1) throw ConfigError("run: trials must be >= 1");
  if (!(jitter_sigma >= 0.0)) throw ConfigError("run: jitter must be >= 0");
  if (!(window_width > 0.0)) throw ConfigError("run: window width must be > 0");
  if (!std::isfinite(window_center))
    throw ConfigError("run: window center must be finite");
  if (theory == Theory::MS && !timing)
    throw UnsupportedTimingError("run: Multisimultaneity needs a timing");
}

double channel2_offset(const SetupGeometry& geometry) {
  const auto ev = impact_schedule(
      geometry, PathPair::detected(Arm::Long, Arm::Long, Arm::Long));
  return ev[2].time - ev[0].time;
}

std::vector<EventRecord> sample_qm(const RunConfig& config, unsigned threads) {
  if (config.theory != Theory::QM)
    throw ConfigError("sample_qm: run theory is not qm");
  config.validate();
  const Schedules sched(config.geometry);
  const auto channels = qm_channels(config.phases);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : channels) cumulative.push_back(acc += c.probability);

  // Timestamps of an interfering subensemble come from its first path.
  std::array<PathPair, 4> representative{};
  for (auto sub : {Subensemble::TwoLongMinusShort, Subensemble::Long,
                   Subensemble::Short, Subensemble::TwoShortMinusLong})
    representative[static_cast<std::size_t>(sub)] = subensemble_paths(sub).front();

  std::vector<EventRecord> out(config.trials);
  parallel_trials(config.trials, threads, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      CounterRng rng(config.seed, i);
      const double u = rng.uniform() * acc;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const auto& ch = channels[std::min<std::size_t>(
          static_cast<std::size_t>(it - cumulative.begin()), channels.size() - 1)];
      EventRecord& ev = out[i];
      ev.trial = i;
      ev.subensemble = ch.subensemble;
      ev.sigma = ch.sigma;
      ev.omega = ch.omega;
      if (ch.subensemble == Subensemble::Lost) {
        ev.t1 = sched.t1(PathPair::lost(Arm::Short, Arm::Short));
        ev.t2 = kNaN;
      } else {
        const auto& p = representative[static_cast<std::size_t>(ch.subensemble)];
        ev.t1 = sched.t1(p);
        ev.t2 = sched.t2(p);
      }
      apply_jitter(ev, config.jitter_sigma, rng);
    }
  });
  return out;
}

std::vector<EventRecord> sample_ms(const RunConfig& config, unsigned threads) {
  if (config.theory != Theory::MS)
    throw ConfigError("sample_ms: run theory is not ms");
  config.validate();
  const MsKernel kernel(*config.timing, config.phases);
  if (!kernel.table().valid) {
    const auto& n = kernel.table().negative.front();
    throw ValidityError(
        n.sigma, n.omega, n.value,
        "phases outside the validity domain of timing " +
            std::string(to_string(*config.timing)) + ": joint " +
            format_entry(n));
  }
  const Schedules sched(config.geometry);

  std::vector<EventRecord> out(config.trials);
  parallel_trials(config.trials, threads, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      CounterRng rng(config.seed, i);
      const auto arm = [&rng] {
        return rng.uniform() < 0.5 ? Arm::Short : Arm::Long;
      };
      const auto sign = [&rng](double p_plus) {
        return rng.uniform() < p_plus ? +1 : -1;
      };
      PathPair path;
      path.photon1 = arm();
      path.photon2_first = arm();
      int sigma = +1;
      if (kernel.port_first()) {
        path.exit = rng.uniform() < 0.5 ? ExitPort::S : ExitPort::R;
        sigma = sign(kernel.p_sigma_plus(path.photon1, path.photon2_first,
                                         path.exit));
      } else {
        sigma = sign(0.5);
        path.exit =
            rng.uniform() < kernel.p_exit_s(path.photon1, path.photon2_first, sigma)
                ? ExitPort::S
                : ExitPort::R;
      }
      EventRecord& ev = out[i];
      ev.trial = i;
      ev.sigma = sigma;
      if (path.exit == ExitPort::R) {
        path = PathPair::lost(path.photon1, path.photon2_first);
        ev.subensemble = Subensemble::Lost;
        ev.omega = 0;
        ev.t1 = sched.t1(path);
        ev.t2 = kNaN;
      } else {
        path.photon2_second = arm();
        ev.subensemble = classify_subensemble(path);
        ev.omega = sign(kernel.p_omega_plus(path, sigma));
        ev.t1 = sched.t1(path);
        ev.t2 = sched.t2(path);
      }
      ev.path = path;
      apply_jitter(ev, config.jitter_sigma, rng);
    }
  });
  return out;
}

std::vector<EventRecord> simulate(const RunConfig& config, unsigned threads) {
  return config.theory == Theory::QM ? sample_qm(config, threads)
                                     : sample_ms(config, threads);
}

std::uint64_t Spectrum::counts_near(double delay, int radius) const {
  const auto centre = static_cast<std::int64_t>(std::llround(delay / bin_width));
  std::uint64_t sum = 0;
  for (auto it = histogram.lower_bound(centre - radius);
       it != histogram.end() && it->first <= centre + radius; ++it)
    sum += it->second;
  return sum;
}

Spectrum histogram_time_delays(std::span<const EventRecord> events,
                               double bin_width, const ArmLengths& arms) {
  const double separation = (arms.long_arm - arms.short_arm) / kSpeedOfLight;
  if (!(bin_width > 0.0)) throw ConfigError("spectrum: bin width must be > 0");
  if (!(bin_width < 0.5 * separation))
    throw ConfigError("spectrum: bin width too coarse, must be below half the "
                      "peak separation (L - l)/c");
  Spectrum s;
  s.bin_width = bin_width;
  for (const auto& e : events) {
    if (!e.coincident()) continue;
    ++s.histogram[std::llround(e.delay() / bin_width)];
    ++s.total;
  }
  std::uint64_t max_count = 0;
  for (const auto& [bin, n] : s.histogram) max_count = std::max(max_count, n);
  const auto count = [&s](std::int64_t bin) -> std::uint64_t {
    const auto it = s.histogram.find(bin);
    return it == s.histogram.end() ? 0 : it->second;
  };
  for (const auto& [bin, n] : s.histogram) {
    if (20 * n < max_count) continue;
    if (n > count(bin - 1) && n >= count(bin + 1)) s.peaks.push_back(s.bin_center(bin));
  }
  return s;
}

std::vector<EventRecord> select_window(std::span<const EventRecord> events,
                                       double center, double width) {
  if (!(width > 0.0)) throw ConfigError("window: width must be > 0");
  std::vector<EventRecord> out;
  for (const auto& e : events)
    if (e.coincident() && std::abs(e.delay() - center) <= 0.5 * width)
      out.push_back(e);
  return out;
}

EstimateReport estimate_correlators(std::span<const EventRecord> events) {
  EstimateReport r;
  for (const auto& e : events) {
    if (!e.coincident()) continue;
    ++r.counts[sign_index(e.sigma)][sign_index(e.omega)];
    ++r.selected;
  }
  if (r.selected == 0)
    throw EmptySelectionError("no coincident events selected");
  const double n = static_cast<double>(r.selected);
  double so = 0.0, s1 = 0.0, s2 = 0.0;
  for (int s : kSigns)
    for (int w : kSigns) {
      const double c = static_cast<double>(r.count(s, w));
      so += s * w * c;
      s1 += s * c;
      s2 += w * c;
    }
  r.estimate = {so / n, s1 / n, s2 / n};
  const auto se = [n](double e) { return std::sqrt(std::max(0.0, 1.0 - e * e) / n); };
  r.standard_error = {se(r.estimate.e_sigma_omega), se(r.estimate.e_sigma),
                      se(r.estimate.e_omega)};
  return r;
}

AgreementCheck check_agreement(const EstimateReport& report,
                               const PredictionTable& table, double n_sigma) {
  AgreementCheck out;
  const double n = static_cast<double>(report.selected);
  const double total = table.total();
  const auto test = [&](const std::string& name, double observed,
                        double expected, double se) {
    const double z = se > 0.0 ? std::abs(observed - expected) / se
                              : (observed == expected ? 0.0 : INFINITY);
    out.max_z = std::max(out.max_z, z);
    std::ostringstream os;
    os.precision(6);
    os << name << ": observed " << observed << " expected " << expected
       << " z " << z;
    out.details.push_back(os.str());
    if (z > n_sigma) out.passed = false;
  };
  for (int s : kSigns)
    for (int w : kSigns) {
      const double p = table.at(s, w) / total;
      const double f = static_cast<double>(report.count(s, w)) / n;
      test(std::string("P(") + (s > 0 ? "+" : "-") + "," + (w > 0 ? "+" : "-") + ")",
           f, p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n));
    }
  const auto expected = correlators(table);
  const auto se = [n](double e) { return std::sqrt(std::max(0.0, 1.0 - e * e) / n); };
  test("E_sigma_omega", report.estimate.e_sigma_omega, expected.e_sigma_omega,
       se(expected.e_sigma_omega));
  test("E_sigma", report.estimate.e_sigma, expected.e_sigma, se(expected.e_sigma));
  test("E_omega", report.estimate.e_omega, expected.e_omega, se(expected.e_omega));
  return out;
}

}  // namespace msim
