#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>

namespace myula {

/// Counter-based 64-bit generator. Output k of stream (seed, stream) is a
/// keyed hash of k, so streams for different chains are independent and a
/// chain's draws do not depend on what other chains do.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by the ziggurat method.
  double normal();
  void fill_normal(Eigen::VectorXd& out);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_lo_;
  std::uint64_t key_hi_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace myula
