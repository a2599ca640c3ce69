#include "myula/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <cmath>

namespace myula {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_lo_(mix64(seed + kGolden)), key_hi_(mix64(mix64(stream * kGolden + 0x632be59bd9b4e019ULL) ^ key_lo_)) {}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t c = counter_++;
  return mix64(mix64(c ^ key_lo_) + key_hi_);
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  // Ziggurat; the distribution object carries no state between calls.
  return boost::random::normal_distribution<double>()(*this);
}

void CounterRng::fill_normal(Eigen::VectorXd& out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal();
}

}  // namespace myula
