#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace besovop {

/// Seeded generator whose streams are identical on every platform:
/// mt19937_64 is fully specified, and the real-valued draws below avoid the
/// implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable per-task seed: master seed mixed with a hash of the task name, so
/// new tasks never perturb the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view task) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace besovop
