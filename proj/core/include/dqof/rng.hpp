#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dqof {

/// One step of the SplitMix64 finalizer. Used as the mixing function of the
/// counter-based seed derivation below.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a master seed and a key path,
/// e.g. derive_seed(master, {instance, iteration, sub}). The result depends
/// only on the inputs, never on call order or thread scheduling.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept;

/// Random source with platform-stable distributions. The std:: distribution
/// objects are implementation-defined, so generated instances and sampled
/// results would differ between standard libraries; these do not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via the Marsaglia polar method.
  double normal();
  bool bit() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dqof
