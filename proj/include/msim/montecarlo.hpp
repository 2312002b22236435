#pragma once

// Seeded event generation for both theories, time-delay spectra, window
// post-selection and correlator estimation from coincidence counts.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msim/pathspace.hpp"
#include "msim/predict.hpp"
#include "msim/relativity.hpp"

namespace msim {

/// Counter-based generator: the stream of trial `i` depends only on
/// (seed, i), so chunked parallel runs reproduce serial ones bit-exactly.
/// Keying and steps are SplitMix64; uniforms take the top 53 bits; normals
/// use Box-Muller.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial);

  std::uint64_t next();
  double uniform();  // [0, 1)
  double normal();   // standard normal

 private:
  std::uint64_t state_;
};

struct RunConfig {
  Theory theory = Theory::QM;
  std::optional<Timing> timing;  // MS only
  PhaseSettings phases;
  SetupGeometry geometry;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  double jitter_sigma = 0.0;    // seconds
  double window_center = 0.0;   // seconds
  double window_width = 1e-10;  // seconds

  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct EventRecord {
  std::uint64_t trial = 0;
  /// Realized path of the observable parts (MS). Empty for QM, which
  /// assigns no definite path inside an interfering subensemble.
  std::optional<PathPair> path;
  Subensemble subensemble = Subensemble::Long;
  int sigma = +1;
  int omega = 0;  // 0 when lost
  double t1 = 0.0;  // seconds
  double t2 = 0.0;  // seconds, NaN when lost

  bool coincident() const { return subensemble != Subensemble::Lost; }
  double delay() const { return t2 - t1; }
};

/// Constant subtracted from photon 2's detection time so that the
/// subensemble-L peak sits at zero delay: the lab difference between the
/// BS22 and BS11 impacts of path (L, LsL).
double channel2_offset(const SetupGeometry& geometry);

/// QM: each trial draws a channel from the exact distribution of
/// `qm_channels`. Timestamps use the first path of the drawn subensemble.
std::vector<EventRecord> sample_qm(const RunConfig& config,
                                   unsigned threads = 0);

/// MS: trajectory-level draws from `MsKernel`. Throws ValidityError when
/// the subpopulation-L table has a negative entry.
std::vector<EventRecord> sample_ms(const RunConfig& config,
                                   unsigned threads = 0);

/// Dispatches on `config.theory`.
std::vector<EventRecord> simulate(const RunConfig& config,
                                  unsigned threads = 0);

struct Spectrum {
  double bin_width = 0.0;
  std::map<std::int64_t, std::uint64_t> histogram;  // bin -> count
  std::vector<double> peaks;                         // bin centers, seconds
  std::uint64_t total = 0;

  double bin_center(std::int64_t bin) const { return bin * bin_width; }
  /// Sum of counts in bins within +-radius of the bin holding `delay`.
  std::uint64_t counts_near(double delay, int radius = 1) const;
};

/// Histogram of t2 - t1 over coincident events; bins are centered on
/// multiples of `bin_width`. Throws ConfigError unless
/// 0 < bin_width < (L - l) / (2c).
Spectrum histogram_time_delays(std::span<const EventRecord> events,
                               double bin_width, const ArmLengths& arms);

/// Coincident events with |t2 - t1 - center| <= width / 2.
std::vector<EventRecord> select_window(std::span<const EventRecord> events,
                                       double center, double width);

struct EstimateReport {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};  // R[sigma][omega]
  std::uint64_t selected = 0;
  Correlators estimate;
  Correlators standard_error;

  std::uint64_t count(int sigma, int omega) const {
    return counts[sign_index(sigma)][sign_index(omega)];
  }
};

/// Correlators from the four coincidence counts, with binomial standard
/// errors sqrt((1 - E^2) / N). Throws EmptySelectionError on no events.
EstimateReport estimate_correlators(std::span<const EventRecord> events);

struct AgreementCheck {
  bool passed = true;
  double max_z = 0.0;  // largest |deviation| / standard error
  std::vector<std::string> details;
};

/// Compares windowed frequencies and correlators with a prediction table
/// (normalized to its subpopulation weight) at `n_sigma` standard errors.
AgreementCheck check_agreement(const EstimateReport& report,
                               const PredictionTable& table,
                               double n_sigma = 4.0);

}  // namespace msim
