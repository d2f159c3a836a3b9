#include "wiener/wiener_lab.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace wiener;

namespace {

// Straight-from-the-definition evaluations used as oracles below.

int sup_dist(const Index& a, const Index& b) {
  int m = 0;
  for (std::size_t t = 0; t < a.size(); ++t) m = std::max(m, std::abs(a[t] - b[t]));
  return m;
}

std::vector<Index> all_points(const Window& w) {
  std::vector<Index> pts;
  for (std::size_t k = 0; k < w.size(); ++k) pts.push_back(w.index(k));
  return pts;
}

/// (sum over every k in [-2R, 2R]^d of H(|k|)^p)^{1/p}, H(m) = max_{|i-j| >= m} |a| u.
double naive_beurling(const LocalizedMatrix& A, double p, const WeightMatrix& u) {
  const Window& w = A.window();
  const auto pts = all_points(w);
  const int D = w.diameter();
  std::vector<double> H(D + 1, 0.0);
  for (int m = 0; m <= D; ++m)
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (sup_dist(pts[i], pts[j]) >= m) H[m] = std::max(H[m], std::abs(A(i, j)) * u.eval(w, i, j));
  const Window lattice(w.dim(), D);
  double s = 0.0;
  for (std::size_t k = 0; k < lattice.size(); ++k) s += std::pow(H[lattice.norm_inf(k)], p);
  return std::pow(s, 1.0 / p);
}

double naive_sjostrand(const LocalizedMatrix& A, double p, const WeightMatrix& u) {
  const Window& w = A.window();
  const auto pts = all_points(w);
  std::map<Index, double> diag;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      Index k(w.dim());
      for (int t = 0; t < w.dim(); ++t) k[t] = pts[i][t] - pts[j][t];
      diag[k] = std::max(diag[k], std::abs(A(i, j)) * u.eval(w, i, j));
    }
  double s = 0.0;
  for (const auto& [k, v] : diag) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

double naive_schur(const LocalizedMatrix& A, double p, const WeightMatrix& u) {
  const Window& w = A.window();
  double best = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      row += std::pow(std::abs(A(i, j)) * u.eval(w, i, j), p);
      col += std::pow(std::abs(A(j, i)) * u.eval(w, j, i), p);
    }
    best = std::max({best, row, col});
  }
  return std::pow(best, 1.0 / p);
}

LocalizedMatrix random_matrix(int d, int R, std::uint64_t seed) {
  GenParams gp;
  gp.alpha = 1.5;
  gp.bandwidth = 2;
  return generate(seed % 2 ? GenKind::polynomial_decay_random : GenKind::banded_random, Window(d, R), seed, gp);
}

const std::vector<WeightMatrix>& weights() {
  static const std::vector<WeightMatrix> ws = {WeightMatrix::trivial(), WeightMatrix::polynomial(2.0),
                                               WeightMatrix::subexponential(0.5, 0.5), WeightMatrix::constant(4.0)};
  return ws;
}

}  // namespace

TEST(Window, PositionAndIndexAreInverse) {
  for (int d : {1, 2, 3}) {
    const Window w(d, 2);
    EXPECT_EQ(w.size(), static_cast<std::size_t>(std::pow(5, d)));
    for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(w.position(w.index(k)), k);
    EXPECT_EQ(w.norm_inf(w.origin()), 0);
  }
  EXPECT_THROW(Window(0, 1), ValidationError);
  EXPECT_THROW(Window(1, -1), ValidationError);
  EXPECT_THROW(Window(1, 2).position(Index{3}), ValidationError);
}

TEST(Window, RingSizeCountsLatticeShells) {
  for (int d : {1, 2, 3}) {
    const Window big(d, 6);
    std::vector<int> count(7, 0);
    for (std::size_t k = 0; k < big.size(); ++k) ++count[big.norm_inf(k)];
    for (int m = 0; m <= 6; ++m) EXPECT_EQ(ring_size(m, d), count[m]) << "d=" << d << " m=" << m;
  }
}

TEST(Generate, IdentityAndShift) {
  const Window w(2, 3);
  const auto I = generate(GenKind::identity, w, 0);
  EXPECT_TRUE(I.dense().isApprox(DenseMatrix::Identity(w.size(), w.size())));
  GenParams gp;
  gp.shift_axis = 1;
  const auto S = generate(GenKind::shift, w, 0, gp);
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q) {
      auto i = w.index(p), j = w.index(q);
      const bool hit = i[0] == j[0] && i[1] == j[1] + 1;
      EXPECT_EQ(S(p, q), cplx(hit ? 1.0 : 0.0));
    }
  gp.shift_axis = 2;
  EXPECT_THROW(generate(GenKind::shift, w, 0, gp), ValidationError);
}

TEST(Generate, RandomKindsAreSeededAndShaped) {
  const Window w(1, 10);
  GenParams gp;
  gp.bandwidth = 2;
  gp.amplitude = 0.5;
  const auto A = generate(GenKind::banded_random, w, 7, gp);
  const auto B = generate(GenKind::banded_random, w, 7, gp);
  const auto C = generate(GenKind::banded_random, w, 8, gp);
  EXPECT_EQ(max_entry_diff(A, B), 0.0);
  EXPECT_GT(max_entry_diff(A, C), 0.0);
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q) {
      if (w.distance(p, q) > 2) {
        EXPECT_EQ(A(p, q), cplx(0.0));
      }
      EXPECT_LT(std::abs(A(p, q)), 0.5);
    }
  EXPECT_EQ(effective_bandwidth(A), 2);

  gp.alpha = 3.0;
  gp.amplitude = 1.0;
  const auto P = generate(GenKind::polynomial_decay_random, w, 3, gp);
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q) EXPECT_LE(std::abs(P(p, q)), std::pow(1.0 + w.distance(p, q), -3.0));
  EXPECT_THROW(parse_gen_kind("nope"), ValidationError);
}

TEST(Generate, ToeplitzEntriesFollowCoefficients) {
  SymbolCoeffs a;
  a.d = 2;
  a.coeffs[{0, 0}] = 2.0;
  a.coeffs[{1, -1}] = cplx(0.0, 1.0);
  const Window w(2, 2);
  const auto T = toeplitz_matrix(a, w);
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q) {
      const auto i = w.index(p), j = w.index(q);
      EXPECT_EQ(T(p, q), a(Index{i[0] - j[0], i[1] - j[1]}));
    }
}

TEST(Algebra, MatchesDenseArithmetic) {
  const auto A = random_matrix(1, 5, 11), B = random_matrix(1, 5, 12);
  EXPECT_LT((multiply(A, B).dense() - A.dense() * B.dense()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((adjoint(A).dense() - A.dense().adjoint()).cwiseAbs().maxCoeff(), 0.0 + 1e-300);
  EXPECT_LT((add(A, B).dense() - (A.dense() + B.dense())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((power(A, 3).dense() - A.dense() * A.dense() * A.dense()).cwiseAbs().maxCoeff(), 1e-13);
  const Window big(1, 8);
  const auto E = embed(A, big);
  EXPECT_EQ(E.at(Index{5}, Index{-5}), A.at(Index{5}, Index{-5}));
  EXPECT_EQ(E.at(Index{6}, Index{0}), cplx(0.0));
  EXPECT_THROW(multiply(A, random_matrix(1, 4, 1)), ValidationError);
}

TEST(DecayProfile, IsTailSupremum) {
  const auto A = random_matrix(2, 3, 5);
  const auto prof = decay_profile(A);
  EXPECT_TRUE(prof.nonincreasing());
  const auto pts = all_points(A.window());
  for (std::size_t m = 0; m < prof.size(); ++m) {
    double h = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (sup_dist(pts[i], pts[j]) >= int(m)) h = std::max(h, std::abs(A(i, j)));
    EXPECT_EQ(prof[m], h);
  }
}

TEST(Norms, AgreeWithDefinitions) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int d = seed % 3 == 0 ? 2 : 1;
    const auto A = random_matrix(d, d == 1 ? 5 : 2, seed);
    for (const auto& u : weights())
      for (double p : {1.0, 2.0, 3.5}) {
        const double b = naive_beurling(A, p, u), s = naive_sjostrand(A, p, u), c = naive_schur(A, p, u);
        EXPECT_NEAR(beurling_norm(A, p, u), b, 1e-12 * b);
        EXPECT_NEAR(sjostrand_norm(A, p, u), s, 1e-12 * s);
        EXPECT_NEAR(schur_norm(A, p, u), c, 1e-12 * c);
      }
  }
}

TEST(Norms, IdentityIsDiagonalSupremum) {
  for (int d : {1, 2})
    for (const auto& u : weights())
      for (double p : {1.0, 2.0, 7.0, kInf}) {
        const auto I = LocalizedMatrix::identity(Window(d, 3));
        const double expect = u.diagonal_sup(I.window());
        EXPECT_EQ(beurling_norm(I, p, u), expect);
        EXPECT_EQ(sjostrand_norm(I, p, u), expect);
        EXPECT_EQ(schur_norm(I, p, u), expect);
      }
  EXPECT_EQ(beurling_norm(LocalizedMatrix::identity(Window(1, 2)), 1.0, WeightMatrix::constant(4.0)), 4.0);
}

TEST(Norms, OrderingAndAxioms) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto A = random_matrix(1, 6, seed), B = random_matrix(1, 6, seed + 100);
    for (const auto& u : weights())
      for (double p : {1.0, 2.0}) {
        const double b = beurling_norm(A, p, u), s = sjostrand_norm(A, p, u), c = schur_norm(A, p, u);
        EXPECT_LE(c, s * (1 + 1e-12));
        EXPECT_LE(s, b * (1 + 1e-12));
        EXPECT_LE(beurling_norm(add(A, B), p, u), (b + beurling_norm(B, p, u)) * (1 + 1e-12));
        EXPECT_NEAR(beurling_norm(scale(cplx(-2.5, 1.0), A), p, u), std::abs(cplx(-2.5, 1.0)) * b, 1e-12 * b);
        EXPECT_NEAR(beurling_norm(adjoint(A), p, u), b, 1e-12 * b);
        // solidness: entrywise domination
        LocalizedMatrix Ah(A.window(), A.dense().cwiseAbs().cast<cplx>() * 0.5);
        EXPECT_LE(beurling_norm(Ah, p, u), b);
      }
  }
  EXPECT_THROW(beurling_norm(LocalizedMatrix::identity(Window(1, 1)), 0.5), ValidationError);
}

TEST(Norms, ShiftPowersHaveClosedForm) {
  const auto S = generate(GenKind::shift, Window(1, 20), 0);
  auto P = S;
  for (int n = 1; n <= 8; ++n) {
    EXPECT_EQ(beurling_norm(P, 1.0), 2.0 * n + 1.0);
    EXPECT_EQ(sjostrand_norm(P, 1.0), 1.0);
    P = multiply(P, S);
  }
}

TEST(Norms, ProductInequalitiesHold) {
  const auto u = WeightMatrix::polynomial(2.0), v = WeightMatrix::constant(4.0);
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    const int d = seed % 2 ? 1 : 2;
    const auto A = random_matrix(d, d == 1 ? 8 : 3, seed), B = random_matrix(d, d == 1 ? 8 : 3, seed + 1);
    for (double p : {1.0, 2.0}) {
      const auto r = product_inequality_check(A, B, p, u, v);
      EXPECT_GE(r.margin_mixed, -1e-10 * r.rhs_mixed);
      EXPECT_GE(r.margin_cp, -1e-10 * r.rhs_cp);
    }
  }
  EXPECT_DOUBLE_EQ(product_constant(2.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(product_constant(1.0, 2), 20.0);
}

TEST(Norms, DilationOfShift) {
  // h = (1, 1, 0, ...): lhs sums ring(m) h(ceil(m/2)) = 1 + 2 + 2, rhs = 2 * 3.
  const auto S = generate(GenKind::shift, Window(1, 6), 0);
  const auto r = dilation_fact_check(S, 2);
  EXPECT_DOUBLE_EQ(r.lhs, 5.0);
  EXPECT_DOUBLE_EQ(r.rhs, 6.0);
  for (std::uint64_t seed = 1; seed < 6; ++seed)
    for (int N : {1, 2, 3, 5}) EXPECT_GE(dilation_fact_check(random_matrix(2, 3, seed), N).margin, -1e-12);
}

TEST(Spectral, OperatorNormMatchesSvd) {
  for (std::uint64_t seed = 1; seed < 5; ++seed) {
    const auto A = random_matrix(1, 12, seed);
    Eigen::JacobiSVD<DenseMatrix> svd(A.dense());
    const double s = svd.singularValues()(0);
    EXPECT_NEAR(operator_norm_l2(A).value, s, 1e-8 * s);
    const auto sv = singular_values(A.dense());
    EXPECT_NEAR(sv(sv.size() - 1), svd.singularValues()(sv.size() - 1), 1e-10);
  }
}

TEST(Spectral, BrandenburgRootsOfShift) {
  const auto S = generate(GenKind::shift, Window(1, 48), 0);
  const auto r = brandenburg_radii(S, 1.0, WeightMatrix::trivial(), 8);
  ASSERT_EQ(r.roots.size(), 8u);
  for (int n = 1; n <= 8; ++n) EXPECT_NEAR(r.roots[n - 1], std::pow(2.0 * n + 1.0, 1.0 / n), 1e-14);
  EXPECT_NEAR(r.rho_estimate, 1.0, 1e-12);
  EXPECT_GT(r.gap, 0.0);
}
