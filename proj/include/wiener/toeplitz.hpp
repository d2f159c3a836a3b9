#pragma once

// Toeplitz matrices and their symbols: the A*(T) norm, grid-certified minimum
// modulus, reciprocal coefficients and the symbol stability criterion.

#include "wiener/stability.hpp"

#include <unsupported/Eigen/FFT>

namespace wiener {

/// sum_{k >= 0} sup_{|n| >= k} |a(n)| for d = 1; for d > 1 the Beurling norm
/// of the Toeplitz matrix on a window covering the support.
inline double astar_norm(const SymbolCoeffs& a) {
  if (a.d < 1) throw ValidationError("symbol dimension must be >= 1");
  if (a.d > 1) {
    const Window w(a.d, std::max(a.support_radius(), 0));
    return beurling_norm(toeplitz_matrix(a, w), 1.0);
  }
  const int R = a.support_radius();
  std::vector<double> tail(static_cast<std::size_t>(R) + 2, 0.0);
  for (const auto& [n, v] : a.coeffs) {
    const auto m = static_cast<std::size_t>(std::abs(n[0]));
    tail[m] = std::max(tail[m], std::abs(v));
  }
  double run = 0.0, s = 0.0;
  for (std::size_t k = tail.size(); k-- > 0;) {
    run = std::max(run, tail[k]);
    tail[k] = run;
  }
  for (double t : tail) s += t;
  return s;
}

namespace detail {

/// In-place d-dimensional DFT on a G^d array in lexicographic order.
inline void fft_nd(std::vector<cplx>& data, int d, int G, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<cplx> line(static_cast<std::size_t>(G)), out;
  std::size_t stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    const std::size_t block = stride * static_cast<std::size_t>(G);
    for (std::size_t base = 0; base < data.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (int k = 0; k < G; ++k) line[k] = data[base + off + k * stride];
        if (inverse) fft.inv(out, line);
        else fft.fwd(out, line);
        for (int k = 0; k < G; ++k) data[base + off + k * stride] = out[k];
      }
    stride = block;
  }
}

inline std::size_t grid_key(const Index& n, int G) {
  std::size_t key = 0;
  for (int v : n) key = key * G + static_cast<std::size_t>(((v % G) + G) % G);
  return key;
}

inline std::size_t grid_points(int d, int G) {
  std::size_t total = 1;
  for (int t = 0; t < d; ++t) total *= static_cast<std::size_t>(G);
  return total;
}

/// Symbol values a^(2 pi k / G) on the grid, lexicographic in k.
inline std::vector<cplx> symbol_grid(const SymbolCoeffs& a, int G) {
  std::vector<cplx> data(grid_points(a.d, G), cplx(0.0));
  for (const auto& [n, v] : a.coeffs) data[grid_key(n, G)] += v;
  fft_nd(data, a.d, G, false);
  return data;
}

inline int support_diameter(const SymbolCoeffs& a) {
  if (a.coeffs.empty()) return 0;
  int diam = 0;
  for (int t = 0; t < a.d; ++t) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& [n, v] : a.coeffs) {
      lo = std::min(lo, n[t]);
      hi = std::max(hi, n[t]);
    }
    diam = std::max(diam, hi - lo);
  }
  return diam;
}

inline int next_pow2(int x) {
  int g = 1;
  while (g < x) g *= 2;
  return g;
}

}  // namespace detail

struct MinModulus {
  double min = 0.0;
  std::vector<double> argmin;  // xi in [0, 2 pi)^d
  double max = 0.0;
  double slack = 0.0;          // Lipschitz bound on off-grid variation
  bool certified = false;      // min - slack > 0
  bool vanishing = false;      // grid minimum is zero up to roundoff
  int G = 0;
};

inline MinModulus symbol_min_modulus(const SymbolCoeffs& a, int G) {
  const int diam = detail::support_diameter(a);
  if (G < 1 || G < 4 * diam) throw ValidationError("grid size must be >= 4 * support diameter");
  const auto vals = detail::symbol_grid(a, G);
  MinModulus r;
  r.G = G;
  r.min = kInf;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const double m = std::abs(vals[k]);
    if (m < r.min) {
      r.min = m;
      arg = k;
    }
    r.max = std::max(r.max, m);
  }
  r.argmin.assign(a.d, 0.0);
  for (int t = a.d - 1; t >= 0; --t) {
    r.argmin[t] = 2.0 * std::numbers::pi * double(arg % G) / G;
    arg /= G;
  }
  double moment = 0.0, l1 = 0.0;
  for (const auto& [n, v] : a.coeffs) {
    double n1 = 0.0;
    for (int x : n) n1 += std::abs(x);
    moment += n1 * std::abs(v);
    l1 += std::abs(v);
  }
  r.slack = moment * 2.0 * std::numbers::pi / G;
  // roundoff of the transform is O(eps * l1 * log G)
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(l1, 1e-300) * std::log2(2.0 * G);
  r.vanishing = r.min <= noise;
  if (r.vanishing) r.min = std::max(r.min, 0.0);
  r.certified = !r.vanishing && r.min - r.slack > 0.0;
  return r;
}

/// Default grid: power of two >= max(64, 4 * support diameter).
inline int default_grid(const SymbolCoeffs& a) {
  return detail::next_pow2(std::max(64, 4 * detail::support_diameter(a)));
}

/// Refines the grid until positivity is certified or the symbol is seen to vanish.
inline MinModulus certify_min_modulus(const SymbolCoeffs& a, std::size_t max_points = std::size_t(1) << 22) {
  int G = default_grid(a);
  auto r = symbol_min_modulus(a, G);
  while (!r.certified && !r.vanishing && detail::grid_points(a.d, 2 * G) <= max_points) {
    G *= 2;
    r = symbol_min_modulus(a, G);
  }
  return r;
}

struct ReciprocalReport {
  int G = 0;
  double outer_mass = 0.0;   // l1 mass of the outer quarter at the final grid
  double astar = 0.0;
  double convolution_residual = 0.0;
  MinModulus modulus;
};

inline SymbolCoeffs convolve(const SymbolCoeffs& a, const SymbolCoeffs& b) {
  if (a.d != b.d) throw ValidationError("symbol dimension mismatch");
  SymbolCoeffs c;
  c.d = a.d;
  Index n(a.d);
  for (const auto& [i, x] : a.coeffs)
    for (const auto& [j, y] : b.coeffs) {
      for (int t = 0; t < a.d; ++t) n[t] = i[t] + j[t];
      c.coeffs[n] += x * y;
    }
  return c;
}

/// l1 mass of a * b - delta_0.
inline double convolution_residual_l1(const SymbolCoeffs& a, const SymbolCoeffs& b) {
  auto c = convolve(a, b);
  c.coeffs[Index(a.d, 0)] -= 1.0;
  double s = 0.0;
  for (const auto& [n, v] : c.coeffs) s += std::abs(v);
  return s;
}

/// Fourier coefficients of 1/a^ by grid doubling until the outer quarter of
/// the coefficient box carries l1 mass <= tol.
inline SymbolCoeffs reciprocal_coeffs(const SymbolCoeffs& a, double tol, ReciprocalReport* report = nullptr,
                                      std::size_t max_points = std::size_t(1) << 22) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be > 0");
  const auto mm = certify_min_modulus(a, max_points);
  if (mm.vanishing) throw NumericalError("symbol vanishes; no reciprocal in the Beurling algebra");
  if (!mm.certified) throw NumericalError("could not certify that the symbol is bounded away from zero");

  const int d = a.d;
  int G = std::max(default_grid(a), 64);
  std::vector<cplx> data;
  double outer = kInf;
  while (true) {
    data = detail::symbol_grid(a, G);
    for (auto& v : data) v = 1.0 / v;
    detail::fft_nd(data, d, G, true);
    outer = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      std::size_t rest = k;
      int m = 0;
      for (int t = 0; t < d; ++t) {
        int c = static_cast<int>(rest % G);
        rest /= G;
        if (c >= G / 2) c -= G;
        m = std::max(m, std::abs(c));
      }
      if (m >= G / 4) outer += std::abs(data[k]);
    }
    if (outer <= tol) break;
    if (detail::grid_points(d, 2 * G) > max_points)
      throw NumericalError("reciprocal coefficients did not settle before the grid limit");
    G *= 2;
  }

  SymbolCoeffs b;
  b.d = d;
  double bmax = 0.0;
  for (const auto& v : data) bmax = std::max(bmax, std::abs(v));
  const double floor = 1e-3 * tol * bmax;  // roundoff from the transforms
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (std::abs(data[k]) <= floor) continue;
    Index n(d);
    std::size_t rest = k;
    for (int t = d - 1; t >= 0; --t) {
      int c = static_cast<int>(rest % G);
      rest /= G;
      n[t] = c >= G / 2 ? c - G : c;
    }
    // snap components that are pure roundoff
    cplx v = data[k];
    if (std::abs(v.imag()) <= floor) v.imag(0.0);
    if (std::abs(v.real()) <= floor) v.real(0.0);
    b.coeffs[n] = v;
  }
  if (report) {
    report->G = G;
    report->outer_mass = outer;
    report->astar = astar_norm(b);
    report->convolution_residual = convolution_residual_l1(a, b);
    report->modulus = mm;
  }
  return b;
}

struct ToeplitzCriterion {
  MinModulus modulus;
  Verdict verdict = Verdict::inconclusive;
  std::vector<StabilityReport> brackets;  // empirical corroboration per radius
};

/// Stable iff the symbol is certified nonvanishing; brackets over the radii are attached.
inline ToeplitzCriterion toeplitz_stability_criterion(const SymbolCoeffs& a, double q, const WeightSequence& w,
                                                      const std::vector<int>& radii, const BracketOptions& opt = {}) {
  ToeplitzCriterion tc;
  tc.modulus = certify_min_modulus(a);
  tc.verdict = tc.modulus.certified ? Verdict::stable
               : tc.modulus.vanishing ? Verdict::degrading
                                      : Verdict::inconclusive;
  for (int R : radii) {
    const Window win(a.d, R);
    tc.brackets.push_back(stability_bracket(toeplitz_matrix(a, win), q, w.on(win), opt));
  }
  return tc;
}

/// Parses "2@0,1@1" (d = 1) or "1.5+0.5i@-1" style coefficient lists.
inline SymbolCoeffs parse_coeff_list(const std::string& text) {
  SymbolCoeffs a;
  a.d = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const auto at = item.find('@');
    if (at == std::string::npos) throw ValidationError("coefficient '" + item + "' must look like value@index");
    std::string val = item.substr(0, at);
    const std::string idx = item.substr(at + 1);
    cplx v;
    try {
      if (!val.empty() && val.back() == 'i') {
        val.pop_back();
        std::size_t split = val.find_last_of("+-");
        if (split == 0 || split == std::string::npos) v = cplx(0.0, val.empty() ? 1.0 : std::stod(val));
        else v = cplx(std::stod(val.substr(0, split)), std::stod(val.substr(split)));
      } else {
        v = std::stod(val);
      }
      a.coeffs[Index{std::stoi(idx)}] += v;
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse coefficient '" + item + "'");
    }
    pos = comma + 1;
  }
  return a;
}

}  // namespace wiener
