#include "wiener/wiener_lab.hpp"

#include <gtest/gtest.h>

using namespace wiener;

namespace {

SymbolCoeffs symbol(std::initializer_list<std::pair<int, double>> terms) {
  SymbolCoeffs a;
  a.d = 1;
  for (const auto& [n, v] : terms) a.coeffs[Index{n}] += v;
  return a;
}

const SymbolCoeffs kStable = symbol({{0, 2.0}, {1, 1.0}});
const SymbolCoeffs kDegrading = symbol({{0, 1.0}, {1, -1.0}});

}  // namespace

TEST(Boundedness, ConstantDominatesRandomProbes) {
  GenParams gp;
  gp.bandwidth = 2;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto A = generate(GenKind::banded_random, Window(1, 10), seed, gp);
    for (double q : {1.0, 2.0, 3.0})
      for (const auto& w : {WeightSequence::trivial(A.window()), WeightSequence::power(A.window(), 0.5)}) {
        const auto r = boundedness_check(A, q, w, 1.0, WeightMatrix::trivial(), WeightMatrix::trivial(), 16, seed);
        EXPECT_GE(r.worst_margin, -1e-10) << "q=" << q << " " << w.id();
        EXPECT_LE(r.worst_ratio, r.constant);
      }
  }
  // trivial data: 2^{2d} 3^{d/q} A_q^{1/q} M ||A||
  EXPECT_NEAR(boundedness_constant(1, 2.0, 1.0, 1.0, 3.0), 4.0 * std::sqrt(3.0) * 3.0, 1e-12);
}

TEST(StabilityBracket, Q2MatchesDenseSvdOnInterior) {
  const Window win(1, 24);
  const auto A = toeplitz_matrix(kStable, win);
  const auto w = WeightSequence::power(win, 1.0);
  BracketOptions opt;
  opt.band = 2;
  const auto r = stability_bracket(A, 2.0, w, opt);
  // oracle: explicit W^{1/2} A W^{-1/2} on columns with |j| <= R - 2
  std::vector<Eigen::Index> cols;
  for (std::size_t k = 0; k < win.size(); ++k)
    if (win.norm_inf(k) <= 22) cols.push_back(static_cast<Eigen::Index>(k));
  DenseMatrix M(win.size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t i = 0; i < win.size(); ++i)
      M(i, c) = A(i, cols[c]) * std::sqrt(w(i) / w(cols[c]));
  Eigen::JacobiSVD<DenseMatrix> svd(M);
  EXPECT_NEAR(r.lower, svd.singularValues()(svd.singularValues().size() - 1), 1e-10);
  EXPECT_NEAR(r.upper, svd.singularValues()(0), 1e-10);
  EXPECT_EQ(r.method, "svd");
  EXPECT_TRUE(r.lower_certified);
}

TEST(StabilityBracket, ToeplitzFamiliesScaleAsExpected) {
  auto sigma = [](const SymbolCoeffs& a, int R) {
    const Window w(1, R);
    return stability_bracket(toeplitz_matrix(a, w), 2.0, WeightSequence::trivial(w)).lower;
  };
  for (int R : {16, 32, 64}) EXPECT_GE(sigma(kStable, R), 0.9);
  EXPECT_LT(sigma(kDegrading, 64), sigma(kDegrading, 16) / 2.0);
}

TEST(StabilityBracket, SampledBracketIsConsistent) {
  const Window win(1, 20);
  const auto A = toeplitz_matrix(kStable, win);
  BracketOptions opt;
  opt.seed = 4;
  for (double q : {1.0, 3.0}) {
    const auto r = stability_bracket(A, q, WeightSequence::power(win, 0.5), opt);
    EXPECT_EQ(r.method, "sampled");
    EXPECT_FALSE(r.lower_certified);
    EXPECT_GT(r.lower, 0.0);
    EXPECT_LE(r.lower, r.upper);
  }
  EXPECT_THROW(stability_bracket(A, 0.5, WeightSequence::trivial(win)), ValidationError);
  opt.band = 20;
  EXPECT_THROW(stability_bracket(A, 2.0, WeightSequence::trivial(win), opt), ValidationError);
}

TEST(StabilityBracket, LeftInverseConfirmsSampledVerdict) {
  const Window win(1, 16);
  const auto A = toeplitz_matrix(kStable, win);
  const auto B = left_inverse(A, 1e-10);
  BracketOptions opt;
  opt.left_inverse = &B;
  EXPECT_EQ(stability_bracket(A, 3.0, WeightSequence::trivial(win), opt).verdict, Verdict::stable);
}

TEST(CrossVerdicts, AgreeAcrossWeightsAndExponents) {
  const std::vector<int> radii = {16, 32, 64};
  const Window w0(1, radii.front());
  const std::vector<StabilityPair> pairs = {{1.0, WeightSequence::trivial(w0)},
                                            {2.0, WeightSequence::trivial(w0)},
                                            {2.0, WeightSequence::power(w0, 1.0)},
                                            {4.0, WeightSequence::trivial(w0)}};
  BracketOptions opt;
  opt.seed = 42;
  for (const auto* a : {&kStable, &kDegrading}) {
    const auto rep =
        cross_stability_verdicts([&](const Window& w) { return toeplitz_matrix(*a, w); }, 1, radii, pairs, opt);
    EXPECT_TRUE(rep.consistent);
    const Verdict expect = a == &kStable ? Verdict::stable : Verdict::degrading;
    for (const auto& pv : rep.pairs) EXPECT_EQ(pv.verdict, expect) << pv.q << " " << pv.weight_id;
  }
}

TEST(ScalingExponent, PowerLaw) {
  std::vector<StabilityReport> rows(2);
  rows[0].radius = 10;
  rows[0].lower = 1.0;
  rows[1].radius = 40;
  rows[1].lower = 1.0 / 16.0;
  EXPECT_NEAR(scaling_exponent(rows), 2.0, 1e-12);
  rows[1].lower = 0.0;
  EXPECT_TRUE(std::isinf(scaling_exponent(rows)));
}

TEST(ToeplitzCriterion, SymbolDecidesVerdict) {
  const auto w = WeightSequence::trivial(Window(1, 8));
  EXPECT_EQ(toeplitz_stability_criterion(kStable, 2.0, w, {8, 16}).verdict, Verdict::stable);
  EXPECT_EQ(toeplitz_stability_criterion(kDegrading, 2.0, w, {8, 16}).verdict, Verdict::degrading);
}

TEST(Partition, TentMultiplier) {
  const Window win(1, 20);
  const PartitionOperator P(win, 4, Index{4});
  for (std::size_t k = 0; k < win.size(); ++k) {
    const double x = std::abs(win.coord(k, 0) - 4) / 4.0;
    EXPECT_DOUBLE_EQ(P.multiplier()(static_cast<Eigen::Index>(k)), std::min(std::max(2.0 - x, 0.0), 1.0));
  }
  // alpha_n counts |i - n| < 2N
  EXPECT_DOUBLE_EQ(P.alpha(Eigen::VectorXd::Ones(win.size())), 15.0);
  EXPECT_THROW(PartitionOperator(win, 4, Index{3}), ValidationError);
}

TEST(Commutator, NearAndFarBoundsHold) {
  const Window win(1, 64);
  GenParams gp;
  gp.alpha = 3.0;
  const auto w = WeightSequence::power(win, 0.5);
  const double aq = aq_bound(w, 2.0, default_aq_cap(win)).bound;
  rng::Stream s(5);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto A = generate(GenKind::polynomial_decay_random, win, seed, gp);
    DenseVector c(win.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = cplx(s.uniform(-1, 1), s.uniform(-1, 1));
    for (const auto& [n, n2] : std::vector<std::pair<int, int>>{{0, 8}, {0, 0}, {-16, 16}, {-40, 40}}) {
      const auto r = commutator_diagnostic(A, 8, Index{n}, Index{n2}, 2.0, w, c, aq);
      EXPECT_GE(r.margin, 0.0) << "n=" << n << " n'=" << n2;
    }
  }
}
