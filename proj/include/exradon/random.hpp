#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace exradon {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair fully
/// determines the output sequence, so independent chains get independent
/// streams without sharing state.
class Philox {
 public:
  static constexpr std::string_view id = "philox4x32-10";

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Index i with probability probs[i]; probs need not be normalized.
  template <class Range>
  std::size_t categorical(const Range& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform() * total;
    std::size_t i = 0;
    for (double p : probs) {
      if (u < p) return i;
      u -= p;
      ++i;
    }
    return i - 1;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace exradon
