#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace claimforge::testing {

// Seeded generator for property tests. Every case derives from one seed so
// failures can be replayed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double real(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return real() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  // Lowercase ascii word of 2..len letters.
  std::string word(int max_len = 6) {
    std::string s(static_cast<std::size_t>(integer(2, max_len)), 'a');
    for (auto& c : s) c = static_cast<char>('a' + integer(0, 25));
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace claimforge::testing
