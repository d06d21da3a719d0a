#pragma once

#include <cmath>
#include <cstdint>

namespace bihari {

namespace detail {

// splitmix64 finalizer (Steele/Lea/Flood). Full 64-bit avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based stream keyed by (base_seed, trial_index, purpose_tag).
/// Each output is a pure function of the key and an incrementing counter,
/// so trials are independent of worker count and scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t trial_index = 0,
            std::uint64_t purpose_tag = 0)
      : key_(detail::mix64(detail::mix64(base_seed) ^
                           detail::mix64(0x51ed270b8d27b2a1ULL + trial_index)) ^
             detail::mix64(0xd6e8feb86659fd93ULL + purpose_tag)),
        counter_(0) {}

  RngStream split(std::uint64_t purpose_tag) const {
    RngStream s = *this;
    s.key_ = detail::mix64(key_ ^ detail::mix64(0xa0761d6478bd642fULL + purpose_tag));
    s.counter_ = 0;
    return s;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ ^ detail::mix64(counter_++)); }

  /// Uniform on (0,1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs buffered.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Poisson count by Knuth's product method (intended for small means).
  unsigned poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    double prod = 1.0;
    unsigned k = 0;
    for (;;) {
      prod *= uniform();
      if (prod <= limit) return k;
      ++k;
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bihari
