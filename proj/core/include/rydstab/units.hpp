#pragma once

#include <cmath>
#include <numbers>

// Unit conventions used throughout rydstab:
//   * user-facing frequencies (Rabi frequency, detuning, interaction) are
//     ordinary frequencies in MHz;
//   * times are in microseconds;
//   * Hamiltonian matrices carry angular frequency in rad/us.
// The factor 2*pi is applied exactly once, by angular() at Hamiltonian assembly.

namespace rydstab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double angular(double frequency_mhz) noexcept { return kTwoPi * frequency_mhz; }

// Wraps an angle into (-pi, pi].
inline double wrap_phase(double angle) noexcept {
  double wrapped = std::remainder(angle, kTwoPi);
  if (wrapped <= -kPi) wrapped += kTwoPi;
  return wrapped;
}

}  // namespace rydstab
