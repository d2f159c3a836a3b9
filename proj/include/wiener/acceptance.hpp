#pragma once

// The acceptance battery: fourteen pass/fail criteria shared by the `suite`
// command and the acceptance test binary. Tolerances are fixed here.

#include "wiener/io.hpp"
#include "wiener/toeplitz.hpp"
#include "wiener/wiener.hpp"

#include <array>
#include <functional>
#include <map>

namespace wiener::acceptance {

using io::json;

inline constexpr double kMarginTol = 1e-10;     // criteria 1, 4
inline constexpr double kRelSlack = 1e-12;      // criterion 2 comparisons
inline constexpr double kOracleTol = 1e-8;      // criterion 5
inline constexpr double kClosednessTol = 1e-3;  // criterion 6
inline constexpr double kAstarTol = 1e-10;      // criterion 7
inline constexpr double kConvTol = 1e-9;        // criterion 7
inline constexpr double kStableFloor = 0.9;     // criterion 8
inline constexpr double kSpikeTol = 1e-12;      // criterion 10
inline constexpr double kBrandenburgGap = 0.25; // criterion 12

struct Options {
  std::uint64_t seed = 42;
  bool quick = false;
};

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  json metrics = json::object();
};

inline json to_json(const Criterion& c) {
  return json{{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"metrics", c.metrics}};
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- shared random corpus ------------------------------------------------------

struct CorpusItem {
  LocalizedMatrix A, B;
  double p = 1.0;
  WeightMatrix u, v;
};

inline LocalizedMatrix random_matrix(const Window& w, rng::Stream& s, std::uint64_t seed) {
  GenParams gp;
  gp.amplitude = s.uniform(0.2, 2.0);
  if (s.uniform() < 0.5) {
    gp.alpha = s.uniform(1.0, 4.0);
    return generate(GenKind::polynomial_decay_random, w, seed, gp);
  }
  gp.bandwidth = static_cast<int>(s.integer(0, 3));
  return generate(GenKind::banded_random, w, seed, gp);
}

/// Pair t of the algebra corpus: d alternates 1, 2; (p, u) alternates between
/// (1, trivial) and (2, polynomial(2)) with its default companion.
inline CorpusItem corpus_item(int t, std::uint64_t seed) {
  rng::Stream s(seed, 1000 + static_cast<std::uint64_t>(t));
  const int d = 1 + t % 2;
  const int R = static_cast<int>(d == 1 ? s.integer(1, 12) : s.integer(1, 6));
  const Window w(d, R);
  CorpusItem it;
  it.A = random_matrix(w, s, rng::mix(seed, 2 * t));
  it.B = random_matrix(w, s, rng::mix(seed, 2 * t + 1));
  const bool weighted = (t / 2) % 2 == 1;
  it.p = weighted ? 2.0 : 1.0;
  it.u = weighted ? WeightMatrix::polynomial(2.0) : WeightMatrix::trivial();
  it.v = default_companion(it.u, it.p);
  return it;
}

inline int corpus_size(const Options& o) { return o.quick ? 40 : 200; }

// --- criteria ----------------------------------------------------------------------

inline Criterion c01_product_inequalities(const Options& o) {
  Criterion c{1, "algebra product inequalities", false, {}, {}};
  const int n = corpus_size(o);
  double worst_mixed = kInf, worst_cp = kInf;
  int violations = 0;
  std::map<std::pair<int, double>, double> cp_cache;
  for (int t = 0; t < n; ++t) {
    const auto it = corpus_item(t, o.seed);
    const auto key = std::make_pair(it.A.window().dim(), it.p);
    if (!cp_cache.count(key)) cp_cache[key] = cp_value(it.v, it.u, it.p, it.A.window());
    const auto r = product_inequality_check(it.A, it.B, it.p, it.u, it.v, cp_cache[key]);
    const double sm = r.margin_mixed / std::max(1.0, r.rhs_mixed);
    const double sc = r.margin_cp / std::max(1.0, r.rhs_cp);
    worst_mixed = std::min(worst_mixed, sm);
    worst_cp = std::min(worst_cp, sc);
    if (sm < -kMarginTol || sc < -kMarginTol) ++violations;
  }
  c.pass = violations == 0;
  c.metrics = {{"pairs", n}, {"worst_scaled_margin_mixed", worst_mixed}, {"worst_scaled_margin_cp", worst_cp},
               {"violations", violations}};
  c.detail = std::to_string(n) + " pairs, worst scaled margins " + num(worst_mixed) + " / " + num(worst_cp);
  return c;
}

inline Criterion c02_norm_axioms(const Options& o) {
  Criterion c{2, "norm ordering and axioms", false, {}, {}};
  const int n = corpus_size(o);
  int ordering = 0, triangle = 0, homogeneity = 0, adjoint_fail = 0, solid = 0;
  auto le = [](double a, double b) { return a <= b * (1.0 + kRelSlack) + 1e-300; };
  auto eq = [](double a, double b) { return std::abs(a - b) <= kRelSlack * std::max(std::abs(a), std::abs(b)); };
  for (int t = 0; t < n; ++t) {
    const auto it = corpus_item(t, o.seed);
    rng::Stream s(o.seed, 5000 + static_cast<std::uint64_t>(t));
    const auto nA = norm_report(it.A, it.p, it.u);
    if (!le(nA.schur, nA.sjostrand) || !le(nA.sjostrand, nA.beurling)) ++ordering;
    const auto nB = norm_report(it.B, it.p, it.u);
    const auto nS = norm_report(add(it.A, it.B), it.p, it.u);
    if (!le(nS.beurling, nA.beurling + nB.beurling) || !le(nS.sjostrand, nA.sjostrand + nB.sjostrand) ||
        !le(nS.schur, nA.schur + nB.schur))
      ++triangle;
    const cplx alpha = std::polar(s.uniform(0.1, 3.0), s.uniform(0.0, 6.28));
    const auto nH = norm_report(scale(alpha, it.A), it.p, it.u);
    const double m = std::abs(alpha);
    if (!eq(nH.beurling, m * nA.beurling) || !eq(nH.sjostrand, m * nA.sjostrand) || !eq(nH.schur, m * nA.schur))
      ++homogeneity;
    const auto nAd = norm_report(adjoint(it.A), it.p, it.u);
    if (!eq(nAd.beurling, nA.beurling) || !eq(nAd.sjostrand, nA.sjostrand) || !eq(nAd.schur, nA.schur))
      ++adjoint_fail;
    LocalizedMatrix D = it.A;
    for (std::size_t i = 0; i < D.size(); ++i)
      for (std::size_t j = 0; j < D.size(); ++j)
        D.set(i, j, std::abs(it.A(i, j)) * s.uniform() * std::polar(1.0, s.uniform(0.0, 6.28)));
    const auto nD = norm_report(D, it.p, it.u);
    if (!le(nD.beurling, nA.beurling) || !le(nD.sjostrand, nA.sjostrand) || !le(nD.schur, nA.schur)) ++solid;
  }
  const int total = ordering + triangle + homogeneity + adjoint_fail + solid;
  c.pass = total == 0;
  c.metrics = {{"matrices", n},          {"ordering_violations", ordering},  {"triangle_violations", triangle},
               {"homogeneity_violations", homogeneity}, {"adjoint_violations", adjoint_fail},
               {"solidness_violations", solid}};
  c.detail = std::to_string(n) + " items, " + std::to_string(total) + " violations";
  return c;
}

inline Criterion c03_identity_norm(const Options&) {
  Criterion c{3, "identity norm equals diagonal weight", false, {}, {}};
  const std::vector<WeightMatrix> weights{WeightMatrix::trivial(),          WeightMatrix::polynomial(0.5),
                                          WeightMatrix::polynomial(2.0),    WeightMatrix::subexponential(0.5, 1.0),
                                          WeightMatrix::subexponential(0.3, 0.5), WeightMatrix::constant(1.0),
                                          WeightMatrix::constant(2.5),      WeightMatrix::constant(4.0)};
  const std::vector<double> ps{1.0, 1.5, 2.0, 3.0, kInf};
  int checked = 0, mismatches = 0;
  for (int d : {1, 2})
    for (int R : {0, 3}) {
      const Window w(d, R);
      const auto I = LocalizedMatrix::identity(w);
      for (const auto& u : weights)
        for (double p : ps) {
          ++checked;
          if (beurling_norm(I, p, u) != u.diagonal_sup(w)) ++mismatches;
        }
    }
  c.pass = mismatches == 0;
  c.metrics = {{"cases", checked}, {"mismatches", mismatches}};
  c.detail = std::to_string(checked) + " cases, " + std::to_string(mismatches) + " mismatches";
  return c;
}

inline Criterion c04_boundedness(const Options& o) {
  Criterion c{4, "weighted boundedness constant", false, {}, {}};
  const int draws = o.quick ? 30 : 100;
  const std::vector<double> qs{1.0, 1.5, 2.0, 3.0};
  double worst = kInf, worst_rel = kInf;
  int violations = 0;
  for (int t = 0; t < draws; ++t) {
    rng::Stream s(o.seed, 7000 + static_cast<std::uint64_t>(t));
    const int d = 1 + static_cast<int>(s.integer(0, 1));
    const Window w(d, static_cast<int>(d == 1 ? s.integer(4, 24) : s.integer(2, 6)));
    const double q = qs[static_cast<std::size_t>(s.integer(0, 3))];
    WeightSequence ws = WeightSequence::trivial(w);
    if (s.uniform() < 0.6) {
      // power weights (1+|i|)^a are A_q for -d < a < d(q-1)
      const double hi = q == 1.0 ? 0.0 : 0.9 * d * (q - 1.0);
      ws = WeightSequence::power(w, s.uniform(-0.9 * d, hi));
    }
    const bool weighted = s.uniform() < 0.5;
    const double p = weighted ? 2.0 : 1.0;
    const auto u = weighted ? WeightMatrix::polynomial(2.0) : WeightMatrix::trivial();
    const auto A = random_matrix(w, s, rng::mix(o.seed, 7000 + t));
    const auto r = boundedness_check(A, q, ws, p, u, default_companion(u, p), 4, rng::mix(o.seed, t));
    const double scaled = r.worst_margin / std::max(1.0, r.constant);
    worst = std::min(worst, scaled);
    worst_rel = std::min(worst_rel, r.worst_relative_margin);
    if (scaled < -kMarginTol) ++violations;
  }
  c.pass = violations == 0;
  c.metrics = {{"draws", draws}, {"worst_scaled_margin", worst}, {"worst_relative_margin", worst_rel},
               {"violations", violations}};
  c.detail = std::to_string(draws) + " draws, worst scaled margin " + num(worst) + ", worst relative margin " +
             num(worst_rel);
  return c;
}

inline SymbolCoeffs two_plus_shift() {
  SymbolCoeffs a;
  a.d = 1;
  a.coeffs[{0}] = 2.0;
  a.coeffs[{1}] = 1.0;
  return a;
}

inline SymbolCoeffs one_minus_shift() {
  SymbolCoeffs a;
  a.d = 1;
  a.coeffs[{0}] = 1.0;
  a.coeffs[{1}] = -1.0;
  return a;
}

inline Criterion c05_inversion_oracle(const Options&) {
  Criterion c{5, "Neumann inverse against dense solve", false, {}, {}};
  const Window w(1, 64);
  const auto A = toeplitz_matrix(two_plus_shift(), w);
  InvertOptions opt;
  opt.tol = 1e-13;
  const auto [Ainv, rep] = wiener_invert(A, opt);
  const double dense = max_entry_diff(Ainv, dense_inverse(A));
  double closed = 0.0;
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q) {
      const int k = w.coord(p, 0) - w.coord(q, 0);
      const double exact = k >= 0 ? 0.5 * std::pow(-0.5, k) : 0.0;
      closed = std::max(closed, std::abs(Ainv(p, q) - exact));
    }
  double profile = 0.0;
  for (int n = 0; n <= 20; ++n) profile = std::max(profile, std::abs(rep.inverse_profile[n] - std::pow(2.0, -n - 1)));
  c.pass = !rep.partial && dense <= kOracleTol && closed <= kOracleTol && profile <= kOracleTol;
  c.metrics = {{"terms", rep.terms_used}, {"C1", rep.C1},         {"C2", rep.C2},
               {"r0", rep.r0},            {"dense_diff", dense},  {"closed_form_diff", closed},
               {"profile_diff", profile}, {"residual", rep.residual}};
  c.detail = "K=" + std::to_string(rep.terms_used) + ", dense diff " + num(dense) + ", closed-form diff " +
             num(closed) + ", profile diff " + num(profile);
  return c;
}

inline Criterion c06_inverse_closedness(const Options&) {
  Criterion c{6, "inverse norms bounded as the window grows", false, {}, {}};
  const std::vector<int> radii{16, 32, 64, 128};
  const auto a = two_plus_shift();
  const auto rows = inverse_closedness_experiment([&](const Window& w) { return toeplitz_matrix(a, w); }, 1, radii,
                                                  1.0, WeightMatrix::trivial(), 1e-13);
  json norms = json::array();
  for (const auto& r : rows) norms.push_back(r.inverse_beurling_norm);
  const double delta = std::abs(rows.back().inverse_beurling_norm - rows[rows.size() - 2].inverse_beurling_norm);
  c.pass = delta < kClosednessTol;
  c.metrics = {{"radii", radii}, {"inverse_norms", norms}, {"last_increment", delta}};
  c.detail = "norms " + num(rows.front().inverse_beurling_norm) + " .. " + num(rows.back().inverse_beurling_norm) +
             ", last increment " + num(delta);
  return c;
}

inline Criterion c07_reciprocal(const Options&) {
  Criterion c{7, "reciprocal symbol coefficients", false, {}, {}};
  const auto a = two_plus_shift();
  ReciprocalReport rep;
  const auto b = reciprocal_coeffs(a, 1e-12, &rep);
  c.pass = std::abs(rep.astar - 1.0) <= kAstarTol && rep.convolution_residual <= kConvTol;
  c.metrics = {{"grid", rep.G}, {"astar", rep.astar}, {"convolution_residual", rep.convolution_residual},
               {"coefficients", b.coeffs.size()}};
  c.detail = "A* norm " + num(rep.astar) + ", convolution residual " + num(rep.convolution_residual);
  return c;
}

inline double truncation_sigma_min(const SymbolCoeffs& a, int R) {
  const auto sv = singular_values(toeplitz_matrix(a, Window(1, R)).dense());
  return sv(sv.size() - 1);
}

inline Criterion c08_stability_scaling(const Options&) {
  Criterion c{8, "singular value scaling of truncations", false, {}, {}};
  const double bad32 = truncation_sigma_min(one_minus_shift(), 32);
  const double bad256 = truncation_sigma_min(one_minus_shift(), 256);
  double good_min = kInf;
  json good = json::array();
  for (int R : {8, 16, 32, 64, 128, 256}) {
    const double s = truncation_sigma_min(two_plus_shift(), R);
    good.push_back(s);
    good_min = std::min(good_min, s);
  }
  c.pass = bad256 < bad32 / 4.0 && good_min >= kStableFloor;
  c.metrics = {{"vanishing_sigma_min_R32", bad32}, {"vanishing_sigma_min_R256", bad256},
               {"nonvanishing_sigma_min", good}};
  c.detail = "1-e^{-ix}: " + num(bad32) + " -> " + num(bad256) + "; 2+e^{-ix}: min " + num(good_min);
  return c;
}

inline std::vector<StabilityPair> standard_pairs() {
  const Window w(1, 1);
  return {{1.0, WeightSequence::trivial(w)},
          {2.0, WeightSequence::trivial(w)},
          {2.0, WeightSequence::power(w, 1.0)},
          {4.0, WeightSequence::trivial(w)}};
}

inline Criterion c09_cross_consistency(const Options& o) {
  Criterion c{9, "verdict agreement across (q, w)", false, {}, {}};
  const std::vector<int> radii = o.quick ? std::vector<int>{16, 32, 64} : std::vector<int>{16, 32, 64, 128};
  BracketOptions bo;
  bo.seed = o.seed;
  auto run = [&](const SymbolCoeffs& a, Verdict expected, json& out) {
    const auto rep =
        cross_stability_verdicts([&](const Window& w) { return toeplitz_matrix(a, w); }, 1, radii, standard_pairs(), bo);
    bool ok = rep.consistent;
    out = json::array();
    for (const auto& pv : rep.pairs) {
      ok = ok && pv.verdict == expected;
      out.push_back({{"q", pv.q}, {"weight", pv.weight_id}, {"verdict", to_string(pv.verdict)},
                     {"decay_exponent", pv.decay_exponent}, {"lower_last", pv.brackets.back().lower}});
    }
    return ok;
  };
  json stable, degrading;
  const bool s_ok = run(two_plus_shift(), Verdict::stable, stable);
  const bool d_ok = run(one_minus_shift(), Verdict::degrading, degrading);
  c.pass = s_ok && d_ok;
  c.metrics = {{"radii", radii}, {"nonvanishing_symbol", stable}, {"vanishing_symbol", degrading}};
  c.detail = std::string("2+e^{-ix} ") + (s_ok ? "all stable" : "disagree") + ", 1-e^{-ix} " +
             (d_ok ? "all degrading" : "disagree");
  return c;
}

inline Criterion c10_muckenhoupt(const Options& o) {
  Criterion c{10, "A_q bounds, maximal function, cube inequality", false, {}, {}};
  bool trivial_ok = true;
  for (int d : {1, 2})
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      const Window w(d, d == 1 ? 10 : 4);
      if (aq_bound(WeightSequence::trivial(w), q, 8).bound != 1.0) trivial_ok = false;
    }
  const Window w1(1, 10);
  Eigen::VectorXd spike = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(w1.size()));
  spike(static_cast<Eigen::Index>(w1.origin())) = 4.0;
  const WeightSequence spike_w(w1, spike);
  const auto spike_rep = aq_bound(spike_w, 2.0, 4);
  const bool spike_ok = std::abs(spike_rep.bound - 1.5625) <= kSpikeTol;

  bool maximal_ok = true;
  for (int d : {1, 2}) {
    const Window w(d, d == 1 ? 12 : 5);
    const auto M = maximal_values(LatticeSequence::delta(w, Index(d, 0)));
    for (std::size_t p = 0; p < w.size(); ++p)
      if (M(static_cast<Eigen::Index>(p)) != 1.0 / std::pow(2.0 * w.norm_inf(p) + 1.0, d)) maximal_ok = false;
  }

  const int draws = o.quick ? 200 : 500;
  struct Case {
    WeightSequence w;
    double q;
  };
  const Window w2(1, 24), w3(2, 5);
  const std::vector<Case> cases{{spike_w, 2.0},
                                {WeightSequence::power(w2, 0.5), 2.0},
                                {WeightSequence::power(w2, 1.0), 3.0},
                                {WeightSequence::power(w2, -0.5), 1.0},
                                {WeightSequence::power(w3, 1.0), 2.0}};
  double worst = kInf;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& cs = cases[k];
    const auto aq = aq_bound(cs.w, cs.q, 8);
    const int n = draws / static_cast<int>(cases.size()) + (static_cast<int>(k) < draws % static_cast<int>(cases.size()));
    worst = std::min(worst, aq_characterization_check(cs.w, cs.q, aq, n, rng::mix(o.seed, k)).worst_margin);
  }
  const bool lemma_ok = worst >= 0.0;
  c.pass = trivial_ok && spike_ok && maximal_ok && lemma_ok;
  c.metrics = {{"trivial_bound_exact", trivial_ok}, {"spike_bound", spike_rep.bound},
               {"spike_argmax_N", spike_rep.argmax_N}, {"maximal_delta_exact", maximal_ok},
               {"cube_draws", draws}, {"cube_worst_margin", worst}};
  c.detail = "spike bound " + num(spike_rep.bound) + ", cube inequality worst margin " + num(worst);
  return c;
}

inline Criterion c11_theta_fit(const Options& o) {
  Criterion c{11, "theta fit and squared-norm estimate", false, {}, {}};
  const auto u = WeightMatrix::polynomial(2.0);
  const auto v = WeightMatrix::constant(4.0);
  const auto fit = theta_fit(u, v, 2.0, 1, 4096, log_grid(1.0, 1e6, 61));
  bool cert = fit.ok;
  for (double m : fit.margins) cert = cert && m >= 0.0;
  const bool theta_ok = fit.theta >= 0.3 && fit.theta <= 0.5;
  const int n = o.quick ? 20 : 50;
  double worst = kInf;
  if (fit.ok) {
    const double K = product_constant(2.0, 1, 2.0);
    for (int t = 0; t < n; ++t) {
      rng::Stream s(o.seed, 11000 + static_cast<std::uint64_t>(t));
      const Window w(1, static_cast<int>(s.integer(4, 16)));
      GenParams gp;
      gp.alpha = s.uniform(2.0, 4.0);
      gp.amplitude = s.uniform(0.2, 2.0);
      const auto A = generate(GenKind::polynomial_decay_random, w, rng::mix(o.seed, 11000 + t), gp);
      const double lhs = beurling_norm(multiply(A, A), 2.0, u);
      const double nb = beurling_norm(A, 2.0, u);
      const double n2 = singular_values(A.dense())(0);
      const double rhs = K * fit.D * std::pow(nb, 1.0 + fit.theta) * std::pow(n2, 1.0 - fit.theta);
      worst = std::min(worst, rhs - lhs);
    }
  }
  c.pass = cert && theta_ok && worst >= 0.0;
  c.metrics = {{"theta", fit.theta}, {"D", fit.D}, {"certificate", cert}, {"t_max", 1e6},
               {"matrices", n}, {"worst_margin", worst}};
  c.detail = "theta " + num(fit.theta) + ", D " + num(fit.D) + ", worst margin " + num(worst);
  return c;
}

inline Criterion c12_brandenburg(const Options&) {
  Criterion c{12, "Beurling root sequence of the shift", false, {}, {}};
  const Window w(1, 128);
  const auto S = generate(GenKind::shift, w, 0);
  const auto rep = brandenburg_radii(S, 1.0, WeightMatrix::trivial(), 16);
  int mismatches = 0;
  for (int n = 1; n <= 16; ++n)
    if (rep.roots[static_cast<std::size_t>(n - 1)] != std::pow(2.0 * n + 1.0, 1.0 / n)) ++mismatches;
  c.pass = mismatches == 0 && rep.gap < kBrandenburgGap;
  c.metrics = {{"root_16", rep.roots.back()}, {"rho_estimate", rep.rho_estimate}, {"gap", rep.gap},
               {"root_mismatches", mismatches}};
  c.detail = "root(16) " + num(rep.roots.back()) + ", rho " + num(rep.rho_estimate) + ", gap " + num(rep.gap);
  return c;
}

inline Criterion c13_commutator(const Options& o) {
  Criterion c{13, "partition commutator estimates", false, {}, {}};
  const Window w(1, 128);
  const int draws = o.quick ? 20 : 50;
  double worst = kInf;
  int near = 0, far = 0;
  std::map<std::pair<int, double>, double> aq_cache;
  for (int t = 0; t < draws; ++t) {
    rng::Stream s(o.seed, 13000 + static_cast<std::uint64_t>(t));
    GenParams gp;
    gp.alpha = 3.0;
    gp.amplitude = s.uniform(0.5, 2.0);
    const auto A = generate(GenKind::polynomial_decay_random, w, rng::mix(o.seed, 13000 + t), gp);
    const int N = s.uniform() < 0.5 ? 8 : 16;
    const int reach = (w.radius() - 2 * N) / N;
    const int n1 = N * static_cast<int>(s.integer(-reach, reach));
    int n2 = n1;
    if (s.uniform() < 0.5) n2 = N * static_cast<int>(s.integer(-reach, reach));
    const double q = std::array<double, 3>{1.0, 2.0, 3.0}[static_cast<std::size_t>(s.integer(0, 2))];
    const int wk = static_cast<int>(s.integer(0, 1));
    const auto ws = wk == 0 ? WeightSequence::trivial(w) : WeightSequence::power(w, 0.5);
    const auto key = std::make_pair(wk, q);
    if (!aq_cache.count(key)) aq_cache[key] = aq_bound(ws, q, default_aq_cap(w)).bound;
    DenseVector cvec(static_cast<Eigen::Index>(w.size()));
    for (Eigen::Index k = 0; k < cvec.size(); ++k) cvec(k) = cplx(s.uniform(-1, 1), s.uniform(-1, 1));
    const auto r = commutator_diagnostic(A, N, Index{n1}, Index{n2}, q, ws, cvec, aq_cache[key]);
    (r.near ? near : far) += 1;
    worst = std::min(worst, r.margin);
  }
  c.pass = worst >= 0.0;
  c.metrics = {{"draws", draws}, {"near_cases", near}, {"far_cases", far}, {"worst_margin", worst}};
  c.detail = std::to_string(near) + " near / " + std::to_string(far) + " far, worst margin " + num(worst);
  return c;
}

inline constexpr int kCriteria = 14;

inline Criterion run_one(int id, const Options& o);

/// Re-runs criteria 1..13 and compares the serialized results byte for byte.
inline Criterion c14_determinism(const Options& o, const json& first_pass) {
  Criterion c{14, "byte-identical reruns", false, {}, {}};
  json second = json::array();
  for (int id = 1; id < kCriteria; ++id) second.push_back(to_json(run_one(id, o)));
  c.pass = first_pass.dump() == second.dump();
  c.metrics = {{"compared_bytes", first_pass.dump().size()},
               {"digest", io::hex64(io::fnv1a(first_pass.dump()))}};
  c.detail = c.pass ? "second in-process run identical" : "second in-process run differs";
  return c;
}

inline Criterion run_one(int id, const Options& o) {
  switch (id) {
    case 1: return c01_product_inequalities(o);
    case 2: return c02_norm_axioms(o);
    case 3: return c03_identity_norm(o);
    case 4: return c04_boundedness(o);
    case 5: return c05_inversion_oracle(o);
    case 6: return c06_inverse_closedness(o);
    case 7: return c07_reciprocal(o);
    case 8: return c08_stability_scaling(o);
    case 9: return c09_cross_consistency(o);
    case 10: return c10_muckenhoupt(o);
    case 11: return c11_theta_fit(o);
    case 12: return c12_brandenburg(o);
    case 13: return c13_commutator(o);
  }
  throw ValidationError("criterion 14 needs the first-pass results; use run_all");
}

/// Runs every criterion; exceptions inside a criterion count as a failure.
inline std::vector<Criterion> run_all(const Options& o, const std::function<void(const Criterion&)>& on_each = {}) {
  std::vector<Criterion> out;
  json first = json::array();
  auto guarded = [&](int id, auto&& fn) {
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.id = id;
      c.name = "criterion " + std::to_string(id);
      c.pass = false;
      c.detail = std::string("error: ") + e.what();
    }
    if (on_each) on_each(c);
    out.push_back(c);
    return c;
  };
  for (int id = 1; id < kCriteria; ++id) first.push_back(to_json(guarded(id, [&] { return run_one(id, o); })));
  guarded(kCriteria, [&] { return c14_determinism(o, first); });
  return out;
}

inline std::string format_line(const Criterion& c) {
  char head[16];
  std::snprintf(head, sizeof head, "[%2d] ", c.id);
  return std::string(head) + (c.pass ? "PASS " : "FAIL ") + c.name + " -- " + c.detail;
}

}  // namespace wiener::acceptance
