#pragma once

// Constructive inversion: spectral bracket of A*A, the scalar-preconditioned
// Neumann series, left inverses, and window-growth experiments on inverse norms.

#include "wiener/norms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace wiener {

struct SpectralBracket {
  double C1 = 0.0;
  double C2 = 0.0;
  bool singular = false;
  std::string method;  // "power" or "dense"
  double residual = 0.0;
  int iterations = 0;

  double r0() const { return (C2 - C1) / (C2 + C1); }
};

inline constexpr double kSingularRatio = 1e-13;

/// C1 I <= A*A <= C2 I on the window.
inline SpectralBracket spectral_bracket(const LocalizedMatrix& A, double tol = 1e-10, int cap = 10000) {
  if (A.max_abs() == 0.0) throw ValidationError("spectral_bracket needs a nonzero matrix");
  const DenseMatrix G = A.dense().adjoint() * A.dense();
  const auto n = A.size();
  SpectralBracket sb;
  auto top = detail::hermitian_power([&](const DenseVector& x) { DenseVector y = G * x; return y; }, n, tol, cap, 2);
  const double c2 = top.value;
  auto shifted =
      detail::hermitian_power([&](const DenseVector& x) { DenseVector y = c2 * x - G * x; return y; }, n, tol, cap, 3);
  sb.iterations = top.iterations + shifted.iterations;
  sb.residual = std::max(top.residual, shifted.residual);
  if (top.converged && shifted.converged) {
    sb.C2 = c2;
    sb.C1 = c2 - shifted.value;
    sb.method = "power";
  } else if (n <= kDenseFallbackLimit) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(G, Eigen::EigenvaluesOnly);
    sb.C1 = es.eigenvalues()(0);
    sb.C2 = es.eigenvalues()(static_cast<Eigen::Index>(n) - 1);
    sb.method = "dense";
    sb.residual = 0.0;
  } else {
    throw NumericalError("spectral bracket did not converge (residual " + std::to_string(sb.residual) + ")");
  }
  if (sb.C1 <= kSingularRatio * sb.C2) {
    sb.C1 = 0.0;
    sb.singular = true;
  }
  return sb;
}

struct InversionReport {
  double C1 = 0.0;
  double C2 = 0.0;
  double r0 = 0.0;
  int terms_used = 0;                   // K: the series sum_{n < K} B^n
  double residual = 0.0;                // max-entry of A A_inv - I
  double left_residual = 0.0;           // max-entry of A_inv A - I
  double series_residual = 0.0;         // max-entry of B^K
  std::vector<double> residual_history; // series residual after each term
  double contraction = 0.0;             // geometric mean of observed per-term ratios
  DecayProfile inverse_profile;
  double inverse_beurling_norm = 0.0;
  bool partial = false;
  std::string bracket_method;
};

inline constexpr double kFlushThreshold = 1e-300;

namespace detail {

inline void flush_tiny(DenseMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) < kFlushThreshold) m(i, j) = 0.0;
}

}  // namespace detail

struct InvertOptions {
  double tol = 1e-12;
  int K_max = 100000;
  double p = 1.0;           // norm reported for the inverse
  WeightMatrix u = {};
};

/// A^{-1} = kappa (sum_n B^n) A*, B = I - kappa A*A, kappa = 2/(C1+C2).
inline std::pair<LocalizedMatrix, InversionReport> wiener_invert(const LocalizedMatrix& A, const InvertOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw ValidationError("tolerance must be > 0");
  if (opt.K_max < 1) throw ValidationError("K_max must be >= 1");
  const auto sb = spectral_bracket(A);
  if (sb.singular) throw NumericalError("matrix is singular on the window: C1 ~ 0 (C2 = " + std::to_string(sb.C2) + ")");

  InversionReport rep;
  rep.C1 = sb.C1;
  rep.C2 = sb.C2;
  rep.r0 = sb.r0();
  rep.bracket_method = sb.method;

  const auto n = static_cast<Eigen::Index>(A.size());
  const double kappa = 2.0 / (sb.C1 + sb.C2);
  const DenseMatrix I = DenseMatrix::Identity(n, n);
  const DenseMatrix Astar = A.dense().adjoint();
  const DenseMatrix B = I - kappa * (Astar * A.dense());
  DenseMatrix S = I;  // sum_{k < K} B^k
  DenseMatrix P = B;  // B^K
  int K = 1;
  double res = P.size() ? P.cwiseAbs().maxCoeff() : 0.0;
  rep.residual_history.push_back(res);
  while (res > opt.tol && K < opt.K_max) {
    S = I + B * S;
    P = B * P;
    detail::flush_tiny(S);
    detail::flush_tiny(P);
    ++K;
    res = P.cwiseAbs().maxCoeff();
    rep.residual_history.push_back(res);
  }
  rep.terms_used = K;
  rep.series_residual = res;
  rep.partial = res > opt.tol;
  const auto& h = rep.residual_history;
  if (h.size() >= 2 && h.front() > 0.0 && h.back() > 0.0)
    rep.contraction = std::pow(h.back() / h.front(), 1.0 / double(h.size() - 1));

  LocalizedMatrix Ainv(A.window(), kappa * S * Astar);
  rep.residual = (A.dense() * Ainv.dense() - I).cwiseAbs().maxCoeff();
  rep.left_residual = (Ainv.dense() * A.dense() - I).cwiseAbs().maxCoeff();
  rep.inverse_profile = decay_profile(Ainv, opt.u);
  rep.inverse_beurling_norm = beurling_norm(Ainv, opt.p, opt.u);
  return {std::move(Ainv), std::move(rep)};
}

/// B = (A*A)^{-1} A*, with the Gram inverse from the Neumann engine.
inline LocalizedMatrix left_inverse(const LocalizedMatrix& A, double tol = 1e-10, InversionReport* report = nullptr) {
  const auto G = multiply(adjoint(A), A);
  InvertOptions opt;
  opt.tol = tol * 1e-2;
  auto [Ginv, rep] = wiener_invert(G, opt);
  LocalizedMatrix B = multiply(Ginv, adjoint(A));
  const double res = max_entry_diff(multiply(B, A), LocalizedMatrix::identity(A.window()));
  if (report) *report = rep;
  if (rep.partial || res > tol)
    throw NumericalError("left inverse residual " + std::to_string(res) + " exceeds tolerance");
  return B;
}

/// Dense LU inverse; the oracle the series result is compared against.
inline LocalizedMatrix dense_inverse(const LocalizedMatrix& A) {
  Eigen::PartialPivLU<DenseMatrix> lu(A.dense());
  return LocalizedMatrix(A.window(), lu.inverse());
}

// --- window-growth experiments ---------------------------------------------

/// log of the Neumann-term envelope C^{log2 n} (C r0^{-1} ||B||)^{n^{log2(1+theta)}} r0^n.
inline double neumann_log_envelope(double C, double r0, double normB, double theta, double n) {
  return std::log2(n) * std::log(C) + std::pow(n, std::log2(1.0 + theta)) * std::log(C * normB / r0) +
         n * std::log(r0);
}

/// C = max(2^{2+2/p} 5^{(d-1)/p} D, 2^{1+2/p} 5^{(d-1)/p} M)
inline double neumann_envelope_constant(double p, int d, double D, double M) {
  return std::max(product_constant(p, d, 2.0) * D, product_constant(p, d, 1.0) * M);
}

struct EnvelopeParams {
  double D = 0.0;
  double theta = 0.0;
  double M = 1.0;  // upper bound for M_p(u)
};

struct ClosednessRow {
  int radius = 0;
  double inverse_beurling_norm = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double r0 = 0.0;
  int terms_used = 0;
  double residual = 0.0;
  double dense_diff = -1.0;  // max-entry vs LU; -1 when skipped
  std::vector<std::pair<int, double>> log_envelope;  // (n, log bound) at n = 1, 2, 4, ...
};

inline std::vector<ClosednessRow> inverse_closedness_experiment(const std::function<LocalizedMatrix(const Window&)>& family,
                                                                int d, const std::vector<int>& radii, double p,
                                                                const WeightMatrix& u, double tol = 1e-12,
                                                                std::optional<EnvelopeParams> env = std::nullopt) {
  std::vector<ClosednessRow> rows;
  for (int R : radii) {
    const Window win(d, R);
    const auto A = family(win);
    InvertOptions opt;
    opt.tol = tol;
    opt.p = p;
    opt.u = u;
    auto [Ainv, rep] = wiener_invert(A, opt);
    ClosednessRow row;
    row.radius = R;
    row.inverse_beurling_norm = rep.inverse_beurling_norm;
    row.C1 = rep.C1;
    row.C2 = rep.C2;
    row.r0 = rep.r0;
    row.terms_used = rep.terms_used;
    row.residual = rep.residual;
    if (A.size() <= kDenseFallbackLimit) row.dense_diff = max_entry_diff(Ainv, dense_inverse(A));
    if (env && rep.r0 > 0.0) {
      const double kappa = 2.0 / (rep.C1 + rep.C2);
      const auto B = subtract(LocalizedMatrix::identity(win), scale(kappa, multiply(adjoint(A), A)));
      const double normB = beurling_norm(B, p, u);
      const double C = neumann_envelope_constant(p, d, env->D, env->M);
      for (int k = 1; k <= std::max(1, rep.terms_used); k *= 2)
        row.log_envelope.emplace_back(k, neumann_log_envelope(C, rep.r0, normB, env->theta, k));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wiener
