#pragma once

// Independent closed forms used as test oracles. Nothing here calls into
// the library's prediction code.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kC = 299792458.0;

// Subpopulation-L joint probability of standard quantum mechanics.
inline double qm_joint(int s, int w, double a, double b, double g) {
  return (3.0 + 2.0 * s * std::cos(a + b) + 2.0 * s * w * std::cos(a + g) +
          2.0 * w * std::cos(g - b)) /
         64.0;
}

// Multisimultaneity with BS11 before and BS21 before, BS22 after.
inline double ms_t2_joint(int s, int w, double a, double b, double g) {
  return (3.0 + 2.0 * s * w * std::cos(a + g) + 2.0 * w * std::cos(g - b)) / 64.0;
}

// Multisimultaneity with BS11 after (referred to BS21).
inline double ms_t3_joint(int s, int w, double a, double b, double g) {
  const double c1 = std::cos(a + b);
  const double c2 = std::cos(a + g);
  const double c3 = std::cos(g - b);
  return (9.0 + 6.0 * s * c1 + 2.0 * s * w * c2 + 6.0 * w * c3 +
          4.0 * s * w * c1 * c3) /
         192.0;
}

inline double rest_experiment_ms(double beta) {
  const double c = std::cos(beta);
  return 2.0 / 9.0 * (1.0 + 2.0 * c * c);
}

// Calls f(alpha, beta, gamma) on an n^3 grid over [0, 2pi).
inline void for_grid(int n, const std::function<void(double, double, double)>& f) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        f(2.0 * kPi * i / n, 2.0 * kPi * j / n, 2.0 * kPi * k / n);
}

}  // namespace oracle
