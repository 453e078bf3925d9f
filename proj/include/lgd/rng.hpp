#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lgd {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every output
// is a pure function of (key, counter), which lets Langevin noise be indexed by
// (seed, step, coordinate) instead of by draw order.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finalizer applied to base + golden-ratio * (index + 1).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Standard normal draw xi_(step)[coord] for the given seed.
double langevin_noise(std::uint64_t seed, std::uint64_t step, std::uint64_t coord);

/// Fills `out` with xi_(step)[0..out.size()). Same values as langevin_noise.
void fill_langevin_noise(std::uint64_t seed, std::uint64_t step, std::span<double> out);

/// Sequential stream over a Philox key. Not thread-safe; one per caller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<double, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lgd
