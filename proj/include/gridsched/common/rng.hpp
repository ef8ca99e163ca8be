#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace gridsched {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable seed derivation so that independent streams (training episodes,
// evaluation episodes, action sampling, ...) never overlap.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = master ^ 0x6a09e667f3bcc908ULL;
  for (char c : stream) {
    s ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    splitmix64(s);
  }
  s ^= index * 0x9e3779b97f4a7c15ULL;
  splitmix64(s);
  return splitmix64(s);
}

// Seeded generator wrapper. All sampling goes through explicit inverse-CDF
// walks in fixed index order, so sequences are reproducible for a given seed
// independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  int next_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::next_int: n must be positive");
    return static_cast<int>(next_double() * n);
  }

  // Inverse-CDF sample over probabilities, scanned in index order.
  int sample_index(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("Rng::sample_index: empty distribution");
    const double u = next_double();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    // Round-off can leave cum fractionally below 1; fall back to the last
    // index with positive mass.
    for (std::size_t i = probs.size(); i-- > 0;) {
      if (probs[i] > 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gridsched
