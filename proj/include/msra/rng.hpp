#pragma once
// Deterministic random number generation for the simulator.
//
// Layout:
//   * mix64 / seed_combine / derive_seed — the documented 64-bit seed-mixing
//     chain used to derive per-pool and per-trial seeds from a master seed.
//     Alternate-language ports that implement the same mixer can reproduce the
//     seed streams; bit-identity of the Gaussian draws themselves is NOT
//     promised across languages (acceptance of statistical quantities is
//     statistical).
//   * Xoshiro256pp — the core engine (xoshiro256++), seeded via splitmix64.
//   * Rng — a convenience wrapper with the sampling primitives the simulator
//     needs: uniform doubles, bounded integers, Gaussian pairs (Box-Muller),
//     complex normals, Poisson counts, and sampling without replacement.
//
// Everything here is a pure function of the seed path; no global state.

#include <cstdint>
#include <cmath>
#include <complex>
#include <numeric>
#include <string_view>
#include <vector>

namespace msra {

// ---------------------------------------------------------------------------
// seed derivation
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Stafford variant 13 core, as in the reference
// splitmix64 implementation).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One splitmix64 step: advances the state and returns the mixed output.
inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += kGolden64;
  return mix64(state);
}

// Order-sensitive combine: fold one component into a running seed hash.
inline constexpr std::uint64_t seed_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h + kGolden64 + v);
}

// derive_seed(master, a, b, ...) — the documented derivation path for all
// stream seeds (e.g. derive_seed(master_seed, point_index, trial_index)).
template <class... Ts>
inline constexpr std::uint64_t derive_seed(std::uint64_t h, Ts... parts) {
  ((h = seed_combine(h, static_cast<std::uint64_t>(parts))), ...);
  return h;
}

// FNV-1a hash for string tags so seed paths can include readable labels.
inline constexpr std::uint64_t hash_tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// xoshiro256++ engine
// ---------------------------------------------------------------------------

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    // Expand the 64-bit seed into the 256-bit state with splitmix64, per the
    // generator author's recommendation.
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4]{};
};

// ---------------------------------------------------------------------------
// sampling wrapper
// ---------------------------------------------------------------------------

class Rng {
 public:
  using cxd = std::complex<double>;

  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection; unbiased for all bounds.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = eng_();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform integer in [lo, hi) — half-open, matching the draw conventions
  // used throughout the simulator.
  long integers(long lo, long hi) {
    return lo + static_cast<long>(bounded(static_cast<std::uint64_t>(hi - lo)));
  }

  // Standard normal via Box-Muller, one cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform_pos();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * M_PI * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Complex normal CN(0, var): real and imaginary parts N(0, var/2).
  cxd cnormal(double var = 1.0) {
    const double s = std::sqrt(var / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  // Poisson(lambda) count via Knuth's product method, chunked so the running
  // product never underflows (keeps validity for any practical lambda).
  long poisson(double lambda) {
    long k = 0;
    while (lambda > 0) {
      const double chunk = std::min(lambda, 500.0);
      const double limit = std::exp(-chunk);
      double p = 1.0;
      long kc = -1;
      do {
        ++kc;
        p *= uniform_pos();
      } while (p > limit);
      k += kc;
      lambda -= chunk;
    }
    return k;
  }

  // k distinct values from {0, ..., n-1} via partial Fisher-Yates; the order
  // of the returned values is the draw order (not sorted).
  std::vector<int> choice_without_replacement(int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const long j = integers(i, n);
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      out[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
    }
    return out;
  }

 private:
  Xoshiro256pp eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace msra
