#pragma once

// Deterministic test-matrix generators. Random entries are a pure function of
// (seed, kind, i, j), so a family generated on nested windows agrees on the
// overlap and the same seed always reproduces the same matrix.

#include "wiener/lattice.hpp"

#include <numbers>
#include <string>
#include <string_view>

namespace wiener {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

/// Uniform double in [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Small seeded stream used by samplers (triples, probes, Monte Carlo draws).
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t tag = 0) : state_(mix(seed, tag)) {}
  std::uint64_t next() { return splitmix64(state_ += 0x9e3779b97f4a7c15ULL); }
  double uniform() { return to_unit(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(next() % span);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rng

enum class GenKind { identity, shift, banded_random, polynomial_decay_random, toeplitz_from_coeffs };

inline GenKind parse_gen_kind(std::string_view s) {
  if (s == "identity") return GenKind::identity;
  if (s == "shift") return GenKind::shift;
  if (s == "banded_random") return GenKind::banded_random;
  if (s == "polynomial_decay_random") return GenKind::polynomial_decay_random;
  if (s == "toeplitz_from_coeffs" || s == "toeplitz") return GenKind::toeplitz_from_coeffs;
  throw ValidationError("unknown generator kind: " + std::string(s));
}

inline std::string to_string(GenKind k) {
  switch (k) {
    case GenKind::identity: return "identity";
    case GenKind::shift: return "shift";
    case GenKind::banded_random: return "banded_random";
    case GenKind::polynomial_decay_random: return "polynomial_decay_random";
    case GenKind::toeplitz_from_coeffs: return "toeplitz_from_coeffs";
  }
  return "?";
}

struct GenParams {
  int bandwidth = 1;      // banded_random
  double amplitude = 1.0; // banded_random, polynomial_decay_random
  double alpha = 2.0;     // polynomial_decay_random
  int shift_axis = 0;     // shift: a(i,j) = 1 iff i - j = e_axis
  SymbolCoeffs coeffs;    // toeplitz_from_coeffs
};

namespace detail {

/// Complex number of modulus < 1 determined by (seed, tag, i, j).
inline cplx hashed_unit_disk(std::uint64_t seed, std::uint64_t tag, const int* i, const int* j, int d) {
  std::uint64_t h = rng::mix(seed, tag);
  for (int a = 0; a < d; ++a) h = rng::mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(i[a])));
  for (int a = 0; a < d; ++a) h = rng::mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(j[a])) ^ 0x5555ULL);
  const double radius = rng::to_unit(rng::splitmix64(h));
  const double angle = 2.0 * std::numbers::pi * rng::to_unit(rng::splitmix64(h ^ 0xabcdefULL));
  return std::polar(radius, angle);
}

}  // namespace detail

inline LocalizedMatrix generate(GenKind kind, const Window& w, std::uint64_t seed, const GenParams& params = {}) {
  const std::size_t n = w.size();
  const int d = w.dim();
  const auto coords = w.coordinates();
  LocalizedMatrix A(w);
  auto dist = [&](std::size_t p, std::size_t q) {
    int m = 0;
    for (int a = 0; a < d; ++a) m = std::max(m, std::abs(coords[p * d + a] - coords[q * d + a]));
    return m;
  };

  switch (kind) {
    case GenKind::identity:
      return LocalizedMatrix::identity(w);

    case GenKind::shift: {
      if (params.shift_axis < 0 || params.shift_axis >= d) throw ValidationError("shift axis out of range");
      for (std::size_t q = 0; q < n; ++q) {
        Index i = w.index(q);
        i[params.shift_axis] += 1;
        if (w.contains(i)) A.set(w.position(i), q, 1.0);
      }
      return A;
    }

    case GenKind::banded_random: {
      if (params.bandwidth < 0) throw ValidationError("bandwidth must be >= 0");
      if (!(params.amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          if (dist(p, q) <= params.bandwidth)
            A.set(p, q, params.amplitude * detail::hashed_unit_disk(seed, 1, &coords[p * d], &coords[q * d], d));
      return A;
    }

    case GenKind::polynomial_decay_random: {
      if (!(params.alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
      if (!(params.amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          const double env = params.amplitude * std::pow(1.0 + dist(p, q), -params.alpha);
          A.set(p, q, env * detail::hashed_unit_disk(seed, 2, &coords[p * d], &coords[q * d], d));
        }
      return A;
    }

    case GenKind::toeplitz_from_coeffs: {
      if (params.coeffs.d != d) throw ValidationError("toeplitz coefficients have wrong dimension");
      for (const auto& [k, v] : params.coeffs.coeffs)
        if (static_cast<int>(k.size()) != d) throw ValidationError("toeplitz coefficient index has wrong length");
      Index diff(d);
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          for (int a = 0; a < d; ++a) diff[a] = coords[p * d + a] - coords[q * d + a];
          const cplx v = params.coeffs(diff);
          if (v != cplx(0.0, 0.0)) A.set(p, q, v);
        }
      return A;
    }
  }
  throw ValidationError("unknown generator kind");
}

/// Toeplitz matrix (a(i - j)) restricted to the window.
inline LocalizedMatrix toeplitz_matrix(const SymbolCoeffs& a, const Window& w) {
  GenParams gp;
  gp.coeffs = a;
  return generate(GenKind::toeplitz_from_coeffs, w, 0, gp);
}

}  // namespace wiener
