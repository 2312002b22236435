#pragma once

// Machine-readable outputs (CSV / JSON) and the event file format.
//
// Event files are comma-separated with one header line
//   trial,path,subensemble,sigma,omega,t1_s,t2_s
// followed by one row per trial. `path` is a PathPair code ("L/LsL",
// "l/Lr") or "*" when the theory assigns no definite path; `omega` and
// `t2_s` are empty for lost photons. Numbers use the shortest decimal form
// that parses back to the same double.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msim/montecarlo.hpp"
#include "msim/predict.hpp"
#include "msim/relativity.hpp"

namespace msim {

std::string_view version();

struct OutputMeta {
  std::uint64_t config_hash = 0;
};

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string prediction_json(const PredictionTable& table,
                            const OutputMeta& meta = {});
PredictionTable parse_prediction_json(std::string_view text);
std::string prediction_csv(const PredictionTable& table);
std::string prediction_text(const PredictionTable& table);

std::string classification_json(const TimingReport& report,
                                const OutputMeta& meta = {});
std::string classification_csv(const TimingReport& report);
std::string classification_text(const TimingReport& report);

std::string spectrum_csv(const Spectrum& spectrum);
std::string spectrum_json(const Spectrum& spectrum, const OutputMeta& meta = {});

std::string estimate_json(const EstimateReport& report,
                          const OutputMeta& meta = {});
EstimateReport parse_estimate_json(std::string_view text);
std::string estimate_csv(const EstimateReport& report);
std::string estimate_text(const EstimateReport& report);

std::string audit_json(const AuditReport& report, const OutputMeta& meta = {});
std::string audit_csv(const AuditReport& report);
std::string audit_text(const AuditReport& report);

std::string scan_csv(const std::vector<ScanRow>& rows, PhaseParameter parameter,
                     Quantity quantity, Timing timing);
std::string scan_json(const std::vector<ScanRow>& rows, PhaseParameter parameter,
                      Quantity quantity, Timing timing,
                      const OutputMeta& meta = {});

void write_events(std::ostream& out, std::span<const EventRecord> events);
std::vector<EventRecord> read_events(std::istream& in);

}  // namespace msim
