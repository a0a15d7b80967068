#pragma once

#include <cstdint>
#include <vector>

namespace predimlab {

// splitmix64: tiny, fast, and identical on every platform.  The standard
// <random> distributions are not pinned across implementations, and corpus
// generation must be byte-reproducible from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), n > 0.  Rejection-free modulo is fine here: n is tiny
  // relative to 2^64 so the bias is far below anything a test could observe,
  // and determinism is what matters.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  bool coin(std::uint64_t num = 1, std::uint64_t den = 2) {
    return below(den) < num;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace predimlab
