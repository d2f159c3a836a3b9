#include "wiener/wiener_lab.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace wiener;

namespace {

constexpr double kZeta3 = 1.2020569031595942854;
const double kZeta4 = std::pow(std::numbers::pi, 4) / 90.0;

/// Naive A_q over every cube a + [0, N-1]^d inside the window, N <= cap.
double naive_aq(const WeightSequence& w, double q, int cap) {
  const Window& win = w.window();
  const int d = win.dim();
  double best = 0.0;
  for (int N = 1; N <= std::min(cap, win.side()); ++N)
    for (std::size_t a = 0; a < win.size(); ++a) {
      const auto lo = win.index(a);
      bool fits = true;
      for (int t = 0; t < d; ++t) fits = fits && lo[t] + N - 1 <= win.radius();
      if (!fits) continue;
      double sw = 0.0, sd = 0.0, mn = kInf, vol = 0.0;
      for (std::size_t k = 0; k < win.size(); ++k) {
        const auto i = win.index(k);
        bool in = true;
        for (int t = 0; t < d; ++t) in = in && i[t] >= lo[t] && i[t] < lo[t] + N;
        if (!in) continue;
        vol += 1.0;
        sw += w(k);
        mn = std::min(mn, w(k));
        if (q > 1.0) sd += std::pow(w(k), -1.0 / (q - 1.0));
      }
      best = std::max(best, q > 1.0 ? (sw / vol) * std::pow(sd / vol, q - 1.0) : (sw / vol) / mn);
    }
  return best;
}

/// Zero-extended centred cube averages.
double naive_maximal(const LatticeSequence& c, std::size_t p) {
  const Window& w = c.window();
  double best = 0.0;
  for (int N = 0; N <= w.diameter(); ++N) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w.distance(p, k) <= N) s += std::abs(c(k));
    best = std::max(best, s / std::pow(2.0 * N + 1.0, w.dim()));
  }
  return best;
}

}  // namespace

TEST(WeightMatrix, ClosedFormValues) {
  const Window w(1, 5);
  const auto poly = WeightMatrix::polynomial(2.0);
  EXPECT_DOUBLE_EQ(poly.at(w, Index{3}, Index{0}), 16.0);
  EXPECT_DOUBLE_EQ(WeightMatrix::subexponential(0.5, 1.0).radial(4.0), std::exp(2.0));
  EXPECT_DOUBLE_EQ(WeightMatrix::constant(4.0).radial(9.0), 4.0);
  EXPECT_DOUBLE_EQ(WeightMatrix::trivial().radial(3.0), 1.0);
  EXPECT_THROW(WeightMatrix::subexponential(1.0), ValidationError);
  EXPECT_THROW(WeightMatrix::constant(0.5), ValidationError);
  EXPECT_THROW(WeightMatrix::polynomial(-1.0), ValidationError);
}

TEST(WeightMatrix, TableValidation) {
  const Window w(1, 1);
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(3, 3, 2.0);
  const auto u = WeightMatrix::table(w, v);
  EXPECT_EQ(u.eval(w, 0, 2), 2.0);
  EXPECT_THROW(u.eval(Window(1, 2), 0, 0), ValidationError);
  v(0, 1) = 3.0;
  EXPECT_THROW(WeightMatrix::table(w, v), ValidationError);
  v(0, 1) = 0.5;
  v(1, 0) = 0.5;
  EXPECT_THROW(WeightMatrix::table(w, v), ValidationError);
  EXPECT_THROW(default_companion(u, 2.0), ValidationError);
}

TEST(WeightMatrix, CompanionsAreSubmultiplicative) {
  const std::vector<WeightMatrix> us = {WeightMatrix::trivial(), WeightMatrix::polynomial(2.0),
                                        WeightMatrix::polynomial(0.5), WeightMatrix::subexponential(0.5, 1.0),
                                        WeightMatrix::subexponential(0.3, 0.7), WeightMatrix::constant(4.0)};
  for (int d : {1, 2})
    for (const auto& u : us) {
      const auto v = default_companion(u, 2.0);
      const auto rep = check_submultiplicative(u, v, 2.0, Window(d, d == 1 ? 6 : 2), 400000);
      EXPECT_TRUE(rep.exhaustive);
      EXPECT_TRUE(rep.holds) << u.id() << " with " << v.id() << " d=" << d << " margin " << rep.worst_margin;
    }
}

TEST(WeightMatrix, CpHasZetaClosedForm) {
  const auto u = WeightMatrix::polynomial(2.0), v = WeightMatrix::constant(4.0);
  // d = 1: 16 (1 + 2 sum_{n >= 2} n^{-4}); d = 2: 16 (1 + 8 sum_{n >= 2} (n - 1) n^{-4})
  EXPECT_NEAR(cp_value(v, u, 2.0, Window(1, 8)), 4.0 * std::sqrt(2.0 * kZeta4 - 1.0), 1e-9);
  EXPECT_NEAR(cp_value(v, u, 2.0, Window(2, 4)), 4.0 * std::sqrt(1.0 + 8.0 * (kZeta3 - kZeta4)), 1e-8);
  // p = 1: sup of v/u = 4
  EXPECT_NEAR(cp_value(v, u, 1.0, Window(1, 8)), 4.0, 1e-12);
  // trivial / trivial diverges for p > 1
  EXPECT_TRUE(std::isinf(cp_value(WeightMatrix::trivial(), WeightMatrix::trivial(), 2.0, Window(1, 4))));
  EXPECT_EQ(cp_value(WeightMatrix::trivial(), WeightMatrix::trivial(), 1.0, Window(1, 4)), 1.0);
}

TEST(ThetaFit, PolynomialWeightCertificate) {
  const auto u = WeightMatrix::polynomial(2.0), v = WeightMatrix::constant(4.0);
  const auto fit = theta_fit(u, v, 2.0, 1, 2000, log_grid(1.0, 1e6, 61));
  ASSERT_TRUE(fit.ok) << fit.reason;
  EXPECT_GE(fit.theta, 0.3);
  EXPECT_LE(fit.theta, 0.5);
  for (double m : fit.margins) EXPECT_GE(m, 0.0);
  // A_N is the ring sum of the running max of v: 4 (2N + 1)
  EXPECT_DOUBLE_EQ(fit.A_N_values[9], 4.0 * 21.0);
}

TEST(ThetaFit, TrivialWeightHasNoSublinearCertificate) {
  const auto fit = theta_fit(WeightMatrix::trivial(), WeightMatrix::trivial(), 2.0, 1, 100, log_grid(1.0, 100.0, 5));
  EXPECT_FALSE(fit.ok);
  EXPECT_THROW(theta_fit(WeightMatrix::trivial(), WeightMatrix::trivial(), 2.0, 1, 1, {1.0}), ValidationError);
}

TEST(Muckenhoupt, TrivialAndSpike) {
  for (int d : {1, 2})
    for (double q : {1.0, 1.5, 2.0, 4.0})
      EXPECT_EQ(aq_bound(WeightSequence::trivial(Window(d, 4)), q, 6).bound, 1.0);
  const Window w(1, 8);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(w.size());
  v(w.origin()) = 4.0;
  const auto r = aq_bound(WeightSequence(w, v), 2.0, 4);
  EXPECT_NEAR(r.bound, 1.5625, 1e-12);
  EXPECT_EQ(r.argmax_N, 2);
}

TEST(Muckenhoupt, ScanMatchesNaiveCubes) {
  for (int d : {1, 2})
    for (double q : {1.0, 2.0, 3.0}) {
      const Window win(d, d == 1 ? 7 : 3);
      for (const auto& w : {WeightSequence::power(win, 1.0), WeightSequence::power(win, 0.5)}) {
        const double scan = aq_bound(w, q, 5).bound, naive = naive_aq(w, q, 5);
        EXPECT_NEAR(scan, naive, 1e-12 * naive) << w.id() << " q=" << q << " d=" << d;
      }
    }
  EXPECT_THROW(aq_bound(WeightSequence::trivial(Window(1, 2)), 0.5, 2), ValidationError);
  EXPECT_THROW(WeightSequence(Window(1, 0), Eigen::VectorXd::Zero(1)), ValidationError);
}

TEST(Muckenhoupt, CharacterizationInequality) {
  const Window win(1, 10);
  for (const auto& w : {WeightSequence::trivial(win), WeightSequence::power(win, 0.5)})
    for (double q : {1.0, 2.0}) {
      const auto aq = aq_bound(w, q, default_aq_cap(win));
      const auto chk = aq_characterization_check(w, q, aq, 500, 9);
      EXPECT_GE(chk.worst_margin, -1e-12);
    }
}

TEST(Maximal, DeltaHasClosedForm) {
  for (int d : {1, 2}) {
    const Window w(d, 5);
    const auto M = maximal_values(LatticeSequence::delta(w, Index(d, 0)));
    for (std::size_t k = 0; k < w.size(); ++k)
      EXPECT_EQ(M(static_cast<Eigen::Index>(k)), std::pow(2.0 * w.norm_inf(k) + 1.0, -d));
  }
}

TEST(Maximal, MatchesNaiveAverages) {
  rng::Stream s(3);
  const Window w(2, 3);
  LatticeSequence c(w);
  for (std::size_t k = 0; k < w.size(); ++k) c.set(k, cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
  const auto M = maximal_values(c);
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(M(static_cast<Eigen::Index>(k)), naive_maximal(c, k), 1e-13);
}

TEST(Maximal, WeakTypeIsBoundedForAqWeights) {
  const Window win(1, 12);
  const auto w = WeightSequence::power(win, 0.5);
  const auto rep = maximal_weak_type_check(w, 2.0, 20, 5);
  EXPECT_GT(rep.weak_constant, 0.0);
  EXPECT_GE(rep.strong_ratio, 1.0);
  EXPECT_LT(rep.strong_ratio, 10.0);
}
