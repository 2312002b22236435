#pragma once

// Experiment configuration files: one JSON document with the sections
// "arms", "phases", "splitters", "delays" and "run". Parsing is strict:
// unknown keys, missing keys and wrong types are fatal. Units are meters,
// seconds and radians; velocities are fractions of c.
//
//   {
//     "arms":   {"L": 1.3, "l": 1.0, "s": 0.5, "coherence_length": 1e-4},
//     "phases": {"alpha": 0.0, "beta": 0.0, "gamma": 0.0},
//     "splitters": [{"id": "BS11", "position": -1.0, "velocity": 0.0},
//                   {"id": "BS21", "position": 3.0, "velocity": 0.0},
//                   {"id": "BS22", "position": 4.0, "velocity": 0.0}],
//     "delays": {"photon1": 0.0, "photon2": 0.0},
//     "run": {"theory": "qm", "timing": "t3", "trials": 1000000,
//             "seed": 1, "jitter": 0.0,
//             "window": {"center": 0.0, "width": 5e-10}}
//   }
//
// "run.timing" and "arms.coherence_length" are optional.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "msim/montecarlo.hpp"

namespace msim {

using ExperimentConfig = RunConfig;

/// Parses and validates; physical warnings are appended to `warnings`.
ExperimentConfig parse_config(std::string_view text,
                              std::vector<std::string>* warnings = nullptr);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::vector<std::string>* warnings = nullptr);

/// Canonical form: fixed key order, phases reduced, shortest round-trip
/// numbers. parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// FNV-1a of the canonical form.
std::uint64_t config_hash(const ExperimentConfig& config);

/// All splitters at rest with T11 < T21 < T22 for every path: (b11, a21 a22).
ExperimentConfig default_config();

/// Timing used for MS predictions: `requested` if given, else the run's
/// timing, else the unanimous class of the geometry. Throws
/// UnsupportedTimingError for Mixed or rule-less classes.
Timing resolve_timing(const ExperimentConfig& config,
                      std::optional<Timing> requested = std::nullopt);

}  // namespace msim
