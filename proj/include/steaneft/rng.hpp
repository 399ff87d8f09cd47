#pragma once

#include <cstdint>

namespace steaneft {

inline constexpr uint64_t golden_gamma = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer; the workhorse behind all randomness here.
inline constexpr uint64_t mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives a child key, used to split independent streams by purpose id.
inline constexpr uint64_t derive_key(uint64_t parent, uint64_t id) {
  return mix64((parent + golden_gamma) ^ mix64(id * golden_gamma + 0x6a09e667f3bcc909ull));
}

// Counter-based random stream: the i-th output is a pure function of
// (key, i). Trials own disjoint keys, so results are bit-identical
// regardless of thread count or execution order.
class RandomStream {
public:
  RandomStream() = default;
  explicit RandomStream(uint64_t key) : key_(key) {}

  uint64_t next_u64() { return mix64(key_ + (++counter_) * golden_gamma); }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n > 0. Lemire multiply-shift; the modulo
  // bias of ~n/2^64 is irrelevant at the n used here.
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

// Inverse-CDF binomial sampler; q0 must equal (1-p)^n. Expected cost is
// O(1 + n*p), which is tiny in the regimes simulated here.
inline int sample_binomial(RandomStream& rng, int n, double p, double q0) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  double u = rng.next_unit();
  double pmf = q0;
  double cum = pmf;
  double odds = p / (1.0 - p);
  int k = 0;
  while (u >= cum && k < n) {
    pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
    ++k;
    cum += pmf;
  }
  return k;
}

// Binomial conditioned on at least one success: walks the same CDF but
// maps the uniform into the tail mass above (1-p)^n.
inline int sample_binomial_at_least_one(RandomStream& rng, int n, double p, double q0) {
  if (n <= 0) return 0;
  if (p >= 1.0) return n;
  double u = q0 + rng.next_unit() * (1.0 - q0);
  double pmf = q0;
  double cum = pmf;
  double odds = p / (1.0 - p);
  int k = 0;
  while (u >= cum && k < n) {
    pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
    ++k;
    cum += pmf;
  }
  return k < 1 ? 1 : k;
}

}  // namespace steaneft
