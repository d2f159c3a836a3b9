#pragma once

// Beurling / Sjostrand / Schur / Jaffard norms, the product inequalities with
// explicit constants, and spectral-radius experiments.

#include "wiener/weights.hpp"

#include <Eigen/SVD>
#include <map>

namespace wiener {

inline void check_p(double p) {
  if (!(p >= 1.0)) throw ValidationError("exponent p must lie in [1, inf]");
}

/// ||A||_{B_{p,u}} = (H(0)^p + sum_{m>=1} ring(m,d) H(m)^p)^{1/p}; H(0) for p = inf.
inline double beurling_norm(const LocalizedMatrix& A, double p, const WeightMatrix& u = {}) {
  check_p(p);
  const auto prof = decay_profile(A, u);
  return ring_lp_norm(prof, p);
}

inline double sjostrand_norm(const LocalizedMatrix& A, double p, const WeightMatrix& u = {}) {
  check_p(p);
  const Window& w = A.window();
  const int d = w.dim();
  const int side = 2 * w.diameter() + 1;
  const auto ev = u.on(w);
  const auto coords = w.coordinates();
  const auto& a = A.dense();
  // diagonal k = i - j in [-2R, 2R]^d, flattened lexicographically
  std::size_t ndiag = 1;
  for (int t = 0; t < d; ++t) ndiag *= static_cast<std::size_t>(side);
  std::vector<double> sup(ndiag, 0.0);
  const std::size_t n = w.size();
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t pp = 0; pp < n; ++pp) {
      const double v = std::abs(a(pp, q));
      if (v == 0.0) continue;
      std::size_t key = 0;
      int m = 0;
      for (int t = 0; t < d; ++t) {
        const int diff = coords[pp * d + t] - coords[q * d + t];
        m = std::max(m, std::abs(diff));
        key = key * side + static_cast<std::size_t>(diff + w.diameter());
      }
      sup[key] = std::max(sup[key], v * ev(pp, q, m));
    }
  const double top = *std::max_element(sup.begin(), sup.end());
  if (std::isinf(p) || top == 0.0) return top;
  double s = 0.0;
  for (double x : sup)
    if (x != 0.0) s += std::pow(x / top, p);
  return top * std::pow(s, 1.0 / p);
}

inline double schur_norm(const LocalizedMatrix& A, double p, const WeightMatrix& u = {}) {
  check_p(p);
  const Window& w = A.window();
  const auto dist = distance_table(w);
  const auto ev = u.on(w);
  const auto& a = A.dense();
  const std::size_t n = w.size();
  Eigen::MatrixXd b(n, n);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t pp = 0; pp < n; ++pp) b(pp, q) = std::abs(a(pp, q)) * ev(pp, q, dist[pp * n + q]);
  if (n == 0) return 0.0;
  const double top = b.maxCoeff();
  if (std::isinf(p) || top == 0.0) return top;
  const Eigen::MatrixXd bp = (b / top).array().pow(p).matrix();
  const double rows = bp.rowwise().sum().maxCoeff();
  const double cols = bp.colwise().sum().maxCoeff();
  return top * std::pow(std::max(rows, cols), 1.0 / p);
}

/// sup |a(i,j)| u(i,j): the common p = inf value of all three families.
inline double jaffard_value(const LocalizedMatrix& A, const WeightMatrix& u = {}) {
  return decay_profile(A, u)[0];
}

struct NormReport {
  double beurling = 0.0;
  double sjostrand = 0.0;
  double schur = 0.0;
  double jaffard = 0.0;
  double p = 1.0;
  std::string weight_id;
};

inline NormReport norm_report(const LocalizedMatrix& A, double p, const WeightMatrix& u = {}) {
  return {beurling_norm(A, p, u), sjostrand_norm(A, p, u), schur_norm(A, p, u), jaffard_value(A, u), p, u.id()};
}

// --- product inequalities --------------------------------------------------

/// 2^{e + 2/p} 5^{(d-1)/p}
inline double product_constant(double p, int d, double extra_power_of_two = 0.0) {
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  return std::pow(2.0, extra_power_of_two + 2.0 * ip) * std::pow(5.0, (d - 1) * ip);
}

struct ProductCheck {
  double lhs = 0.0;       // ||AB||_{p,u}
  double rhs_mixed = 0.0; // mixed-norm bound
  double rhs_cp = 0.0;    // C_p(v,u)-based bound
  double Cp = 0.0;
  double margin_mixed = 0.0;
  double margin_cp = 0.0;
};

inline ProductCheck product_inequality_check(const LocalizedMatrix& A, const LocalizedMatrix& B, double p,
                                             const WeightMatrix& u, const WeightMatrix& v,
                                             std::optional<double> Cp = std::nullopt) {
  require_same_window(A.window(), B.window(), "product_inequality_check");
  const int d = A.window().dim();
  ProductCheck r;
  r.lhs = beurling_norm(multiply(A, B), p, u);
  const double Ap = beurling_norm(A, p, u), Bp = beurling_norm(B, p, u);
  const double A1 = beurling_norm(A, 1.0, v), B1 = beurling_norm(B, 1.0, v);
  r.rhs_mixed = product_constant(p, d) * (Ap * B1 + A1 * Bp);
  r.Cp = Cp ? *Cp : cp_value(v, u, p, A.window());
  r.rhs_cp = product_constant(p, d, 1.0) * r.Cp * Ap * Bp;
  r.margin_mixed = r.rhs_mixed - r.lhs;
  r.margin_cp = r.rhs_cp - r.lhs;
  return r;
}

struct DilationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

/// sum_k sup_{|i-j| >= |k|/N} |a|  vs  N (2N+1)^{d-1} sum_k sup_{|i-j| >= |k|} |a|.
inline DilationCheck dilation_fact_check(const LocalizedMatrix& A, int N) {
  if (N < 1) throw ValidationError("dilation factor N must be >= 1");
  const auto prof = decay_profile(A);
  const int d = A.window().dim();
  DilationCheck r;
  const long mmax = static_cast<long>(prof.size()) * N;
  for (long m = 0; m <= mmax; ++m) {
    const double h = prof[static_cast<std::size_t>((m + N - 1) / N)];
    if (h == 0.0) continue;
    r.lhs += ring_size(m, d) * h;
  }
  r.rhs = N * std::pow(2.0 * N + 1.0, d - 1) * ring_power_sum(prof, 1.0);
  r.margin = r.rhs - r.lhs;
  return r;
}

// --- spectral helpers ------------------------------------------------------

struct PowerResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  std::string method;
};

namespace detail {

inline DenseVector start_vector(std::size_t n, std::uint64_t tag) {
  rng::Stream s(0x9a11, tag);
  DenseVector x(n);
  for (std::size_t k = 0; k < n; ++k) x(k) = cplx(1.0 + 0.5 * s.uniform(), 0.25 * s.uniform());
  return x / x.norm();
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator given by `op`.
template <class Op>
PowerResult hermitian_power(Op&& op, std::size_t n, double tol, int cap, std::uint64_t tag) {
  PowerResult r;
  r.method = "power";
  if (n == 0) {
    r.converged = true;
    return r;
  }
  DenseVector x = start_vector(n, tag);
  double lambda = 0.0;
  for (int it = 1; it <= cap; ++it) {
    DenseVector y = op(x);
    const double next = std::real(x.dot(y));
    const double ny = y.norm();
    r.iterations = it;
    if (ny == 0.0) {
      lambda = 0.0;
      r.converged = true;
      break;
    }
    r.residual = (y - next * x).norm() / std::max(ny, 1e-300);
    const bool small_change = std::abs(next - lambda) <= tol * std::abs(next);
    lambda = next;
    x = y / ny;
    // relative change alone stalls on clustered spectra; also ask for a small residual
    if (small_change && r.residual <= std::sqrt(tol) && it > 2) {
      r.converged = true;
      break;
    }
  }
  r.value = lambda;
  return r;
}

}  // namespace detail

inline constexpr std::size_t kDenseFallbackLimit = 4096;

/// ||A||_{l2}: power iteration on A*A, dense SVD when it does not settle.
inline PowerResult operator_norm_l2(const LocalizedMatrix& A, double tol = 1e-10, int cap = 10000) {
  const auto& a = A.dense();
  auto r = detail::hermitian_power([&](const DenseVector& x) { DenseVector y = a.adjoint() * (a * x); return y; },
                                   A.size(), tol, cap, 1);
  if (r.converged) {
    r.value = std::sqrt(std::max(r.value, 0.0));
    return r;
  }
  if (A.size() <= kDenseFallbackLimit) {
    Eigen::BDCSVD<DenseMatrix> svd(a);
    r.value = A.size() ? svd.singularValues()(0) : 0.0;
    r.method = "svd";
    r.converged = true;
    return r;
  }
  r.value = std::sqrt(std::max(r.value, 0.0));
  return r;
}

inline Eigen::VectorXd singular_values(const DenseMatrix& a) {
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues();
}

struct BrandenburgReport {
  std::vector<double> roots;    // ||A^n||_{B_{p,u}}^{1/n}, n = 1..n_max
  std::vector<double> l2_roots; // ||A^n||_{l2}^{1/n}
  double rho_estimate = 0.0;    // modulus-tracking power iteration
  double gap = 0.0;             // roots[n_max-1] - rho_estimate
  int start_radius = 0;         // support radius of the start vector
};

/// Root sequence of the Beurling norm of powers against an l2 spectral-radius
/// estimate. The start vector lives on |i| <= R - n_max so that powers of
/// short-range operators are not clipped by the window edge.
inline BrandenburgReport brandenburg_radii(const LocalizedMatrix& A, double p, const WeightMatrix& u, int n_max) {
  if (n_max < 2) throw ValidationError("n_max must be >= 2");
  BrandenburgReport r;
  const Window& w = A.window();
  LocalizedMatrix P = A;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) P = multiply(P, A);
    r.roots.push_back(std::pow(beurling_norm(P, p, u), 1.0 / n));
    r.l2_roots.push_back(std::pow(operator_norm_l2(P).value, 1.0 / n));
  }
  r.start_radius = std::max(0, w.radius() - n_max);
  DenseVector x = DenseVector::Zero(w.size());
  rng::Stream s(0xb2a, 0);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w.norm_inf(k) <= r.start_radius) x(k) = cplx(0.5 + s.uniform(), 0.0);
  x /= x.norm();
  // deflation-free modulus tracking: accumulate log ||A x_k|| with renormalisation
  double log_growth = 0.0;
  bool zero = false;
  for (int k = 0; k < n_max; ++k) {
    DenseVector y = A.dense() * x;
    const double ny = y.norm();
    if (ny == 0.0) {
      zero = true;
      break;
    }
    log_growth += std::log(ny);
    x = y / ny;
  }
  r.rho_estimate = zero ? 0.0 : std::exp(log_growth / n_max);
  r.gap = r.roots.back() - r.rho_estimate;
  return r;
}

}  // namespace wiener
