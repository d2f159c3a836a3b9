#pragma once

// l^q_w boundedness and stability brackets, verdicts over growing windows,
// and the partition-of-unity commutator estimate.

#include "wiener/muckenhoupt.hpp"
#include "wiener/norms.hpp"

#include <functional>
#include <numbers>

namespace wiener {

enum class Verdict { stable, degrading, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::degrading: return "degrading";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// N_cap used when a stability computation needs a scanned A_q(w).
inline int default_aq_cap(const Window& w) { return std::min(w.side(), 32); }

/// 2^{2d} 3^{d/q} A_q(w)^{1/q} M ||A||_{B_{p,u}}
inline double boundedness_constant(int d, double q, double aq, double mpu, double beurling) {
  return std::pow(2.0, 2 * d) * std::pow(3.0, d / q) * std::pow(aq, 1.0 / q) * mpu * beurling;
}

struct BoundednessCheck {
  double constant = 0.0;     // rhs / ||c||
  double worst_margin = kInf;
  double worst_ratio = 0.0;  // max ||Ac|| / ||c||
  double worst_relative_margin = kInf;  // min (const ||c|| - ||Ac||) / (const ||c||), c != 0
  double aq = 1.0;
  double Cp = 1.0;
  int trials = 0;
};

/// ||Ac||_{q,w} <= const ||c||_{q,w} on random c; C_p(v,u) stands in for M_p(u).
inline BoundednessCheck boundedness_check(const LocalizedMatrix& A, double q, const WeightSequence& w, double p,
                                          const WeightMatrix& u, const WeightMatrix& v, int trials,
                                          std::uint64_t seed, std::optional<double> aq = std::nullopt) {
  require_same_window(A.window(), w.window(), "boundedness_check");
  const Window& win = A.window();
  BoundednessCheck rep;
  rep.trials = trials;
  rep.aq = aq ? *aq : aq_bound(w, q, default_aq_cap(win)).bound;
  rep.Cp = cp_value(v, u, p, win);
  rep.constant = boundedness_constant(win.dim(), q, rep.aq, rep.Cp, beurling_norm(A, p, u));
  rng::Stream s(seed, 0xb0);
  for (int t = 0; t < trials; ++t) {
    DenseVector c(win.size());
    const double density = s.uniform(0.1, 1.0);
    for (std::size_t k = 0; k < win.size(); ++k)
      c(k) = s.uniform() < density ? cplx(s.uniform(-1, 1), s.uniform(-1, 1)) : cplx(0.0);
    const double cn = weighted_norm(c, q, w.values());
    const double an = weighted_norm((A.dense() * c).eval(), q, w.values());
    rep.worst_margin = std::min(rep.worst_margin, rep.constant * cn - an);
    if (cn > 0.0) {
      rep.worst_ratio = std::max(rep.worst_ratio, an / cn);
      rep.worst_relative_margin = std::min(rep.worst_relative_margin, 1.0 - an / (rep.constant * cn));
    }
  }
  return rep;
}

struct StabilityReport {
  double q = 2.0;
  std::string weight_id;
  int radius = 0;
  double lower = 0.0;
  double upper = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string method;        // "svd" or "sampled"
  bool lower_certified = false;
  int probe_margin = 0;      // interior band width b
};

struct BracketOptions {
  std::optional<int> band;              // defaults to 2 * effective bandwidth
  int trials = 32;
  std::uint64_t seed = 0;
  double stable_floor = 1e-6;           // single-window: lower > floor * upper
  const LocalizedMatrix* left_inverse = nullptr;
  double left_inverse_tol = 1e-8;
};

namespace detail {

inline std::vector<std::size_t> interior_positions(const Window& w, int band) {
  std::vector<std::size_t> pos;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w.norm_inf(k) <= w.radius() - band) pos.push_back(k);
  return pos;
}

inline int resolve_band(const LocalizedMatrix& A, const BracketOptions& opt) {
  const int b = opt.band ? *opt.band : 2 * effective_bandwidth(A);
  if (b < 0) throw ValidationError("probe band must be >= 0");
  if (b >= A.window().radius() && !(b == 0 && A.window().radius() == 0))
    throw ValidationError("probe band leaves an empty interior");
  return b;
}

/// Weighted, column-restricted matrix W^{1/2} A W^{-1/2} |_{interior}.
inline DenseMatrix conjugated_interior(const LocalizedMatrix& A, const WeightSequence& w,
                                       const std::vector<std::size_t>& cols) {
  const auto n = static_cast<Eigen::Index>(A.size());
  DenseMatrix M(n, static_cast<Eigen::Index>(cols.size()));
  const Eigen::VectorXd sw = w.values().cwiseSqrt();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto j = static_cast<Eigen::Index>(cols[c]);
    M.col(static_cast<Eigen::Index>(c)) = A.dense().col(j).cwiseProduct(sw.cast<cplx>()) / sw(j);
  }
  return M;
}

inline bool left_inverse_confirms(const LocalizedMatrix& A, const BracketOptions& opt) {
  if (!opt.left_inverse) return false;
  const auto BA = multiply(*opt.left_inverse, A);
  return max_entry_diff(BA, LocalizedMatrix::identity(A.window())) <= opt.left_inverse_tol;
}

}  // namespace detail

/// Smallest right singular vector of the l^2_w problem, mapped back to c.
inline DenseVector q2_minimal_probe(const LocalizedMatrix& A, const WeightSequence& w, int band) {
  const auto cols = detail::interior_positions(A.window(), band);
  const DenseMatrix M = detail::conjugated_interior(A, w, cols);
  Eigen::BDCSVD<DenseMatrix> svd(M, Eigen::ComputeThinV);
  const DenseVector x = svd.matrixV().col(svd.matrixV().cols() - 1);
  DenseVector c = DenseVector::Zero(static_cast<Eigen::Index>(A.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    c(static_cast<Eigen::Index>(cols[k])) = x(static_cast<Eigen::Index>(k)) / std::sqrt(w(cols[k]));
  return c;
}

/// Structured probes: tents and cosine bumps at dyadic scales, plus random interior vectors.
inline std::vector<DenseVector> interior_probes(const Window& win, int band, int trials, std::uint64_t seed) {
  std::vector<DenseVector> probes;
  const int reach = win.radius() - band;
  const auto n = static_cast<Eigen::Index>(win.size());
  for (int L = std::max(reach, 0); L >= 1; L /= 2) {
    DenseVector tent = DenseVector::Zero(n), bump = DenseVector::Zero(n);
    for (std::size_t k = 0; k < win.size(); ++k) {
      const double r = double(win.norm_inf(k)) / (L + 1);
      if (r >= 1.0) continue;
      tent(static_cast<Eigen::Index>(k)) = 1.0 - r;
      bump(static_cast<Eigen::Index>(k)) = 0.5 * (1.0 + std::cos(std::numbers::pi * r));
    }
    probes.push_back(tent);
    probes.push_back(bump);
  }
  rng::Stream s(seed, 0x9b);
  const auto interior = detail::interior_positions(win, band);
  for (int t = 0; t < trials; ++t) {
    DenseVector c = DenseVector::Zero(n);
    for (std::size_t k : interior) c(static_cast<Eigen::Index>(k)) = cplx(s.uniform(-1, 1), s.uniform(-1, 1));
    probes.push_back(c);
  }
  return probes;
}

inline StabilityReport stability_bracket(const LocalizedMatrix& A, double q, const WeightSequence& w,
                                         const BracketOptions& opt = {}) {
  require_same_window(A.window(), w.window(), "stability_bracket");
  if (!(q >= 1.0) || std::isinf(q)) throw ValidationError("q must lie in [1, inf)");
  const Window& win = A.window();
  StabilityReport rep;
  rep.q = q;
  rep.weight_id = w.id();
  rep.radius = win.radius();
  const int b = detail::resolve_band(A, opt);
  rep.probe_margin = b;

  if (q == 2.0) {
    const auto cols = detail::interior_positions(win, b);
    const auto sv = singular_values(detail::conjugated_interior(A, w, cols));
    rep.lower = sv(sv.size() - 1);
    rep.upper = sv(0);
    rep.method = "svd";
    rep.lower_certified = true;
    const bool ok = rep.lower > opt.stable_floor * rep.upper || detail::left_inverse_confirms(A, opt);
    rep.verdict = ok ? Verdict::stable : Verdict::inconclusive;
    return rep;
  }

  auto probes = interior_probes(win, b, opt.trials, opt.seed);
  probes.push_back(q2_minimal_probe(A, w, b));
  rep.lower = kInf;
  for (const auto& c : probes) {
    const double cn = weighted_norm(c, q, w.values());
    if (cn == 0.0) continue;
    rep.lower = std::min(rep.lower, weighted_norm((A.dense() * c).eval(), q, w.values()) / cn);
  }
  const double aq = aq_bound(w, q, default_aq_cap(win)).bound;
  rep.upper = boundedness_constant(win.dim(), q, aq, 1.0, beurling_norm(A, 1.0));
  rep.method = "sampled";
  rep.lower_certified = false;
  rep.verdict = detail::left_inverse_confirms(A, opt) ? Verdict::stable : Verdict::inconclusive;
  return rep;
}

// --- verdicts over growing windows ----------------------------------------

using MatrixFamily = std::function<LocalizedMatrix(const Window&)>;

struct StabilityPair {
  double q;
  WeightSequence weight;  // prototype; re-windowed per radius
};

struct ScalingThresholds {
  double degrading_exponent = 0.5;  // lower ~ R^{-s}, s >= this
  double stable_exponent = 0.1;     // |s| <= this with lower > 0
};

struct PairVerdict {
  double q = 2.0;
  std::string weight_id;
  std::vector<StabilityReport> brackets;  // one per radius
  double decay_exponent = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

struct CrossReport {
  std::vector<int> radii;
  std::vector<PairVerdict> pairs;
  PairVerdict reference;  // q = 2, trivial weight
  bool consistent = false;
};

/// -log(l_last / l_first) / log(R_last / R_first)
inline double scaling_exponent(const std::vector<StabilityReport>& rows) {
  if (rows.size() < 2) return 0.0;
  const double l0 = rows.front().lower, l1 = rows.back().lower;
  const double r0 = std::max(rows.front().radius, 1), r1 = std::max(rows.back().radius, 1);
  if (r1 == r0) return 0.0;
  if (l1 <= 0.0) return kInf;
  if (l0 <= 0.0) return 0.0;
  return -std::log(l1 / l0) / std::log(double(r1) / r0);
}

namespace detail {

inline PairVerdict run_pair(const MatrixFamily& family, int d, const std::vector<int>& radii, double q,
                            const WeightSequence& proto, const BracketOptions& opt) {
  PairVerdict pv;
  pv.q = q;
  pv.weight_id = proto.id();
  for (int R : radii) {
    const Window win(d, R);
    pv.brackets.push_back(stability_bracket(family(win), q, proto.on(win), opt));
  }
  pv.decay_exponent = scaling_exponent(pv.brackets);
  return pv;
}

}  // namespace detail

/// Runs the bracket for each (q, w) over the radii and classifies the scaling.
/// q = 2 pairs use the certified lower bound. For q != 2 a shrinking sampled
/// value certifies degradation; stability is inferred from the certified q = 2
/// trivial-weight path and corroborated by non-shrinking samples.
inline CrossReport cross_stability_verdicts(const MatrixFamily& family, int d, const std::vector<int>& radii,
                                            const std::vector<StabilityPair>& pairs, const BracketOptions& opt = {},
                                            const ScalingThresholds& th = {}) {
  if (radii.empty()) throw ValidationError("need at least one radius");
  CrossReport rep;
  rep.radii = radii;
  auto classify_certified = [&](PairVerdict& pv) {
    double lo = kInf;
    for (const auto& b : pv.brackets) lo = std::min(lo, b.lower);
    if (pv.decay_exponent >= th.degrading_exponent) pv.verdict = Verdict::degrading;
    else if (std::abs(pv.decay_exponent) <= th.stable_exponent && lo > 0.0) pv.verdict = Verdict::stable;
    else pv.verdict = Verdict::inconclusive;
  };
  rep.reference = detail::run_pair(family, d, radii, 2.0, WeightSequence::trivial(Window(d, radii.front())), opt);
  classify_certified(rep.reference);

  for (const auto& pr : pairs) {
    auto pv = detail::run_pair(family, d, radii, pr.q, pr.weight, opt);
    if (pr.q == 2.0) {
      classify_certified(pv);
    } else if (pv.decay_exponent >= th.degrading_exponent) {
      pv.verdict = Verdict::degrading;
    } else if (rep.reference.verdict == Verdict::stable && std::abs(pv.decay_exponent) <= th.stable_exponent) {
      pv.verdict = Verdict::stable;
    } else {
      pv.verdict = Verdict::inconclusive;
    }
    rep.pairs.push_back(std::move(pv));
  }
  rep.consistent = !rep.pairs.empty();
  for (const auto& pv : rep.pairs)
    if (pv.verdict != rep.pairs.front().verdict || pv.verdict == Verdict::inconclusive) rep.consistent = false;
  return rep;
}

/// Single-window variant: one bracket per pair on A's own window.
inline std::vector<StabilityReport> cross_stability_verdicts(const LocalizedMatrix& A,
                                                             const std::vector<StabilityPair>& pairs,
                                                             const BracketOptions& opt = {}) {
  std::vector<StabilityReport> out;
  for (const auto& pr : pairs) out.push_back(stability_bracket(A, pr.q, pr.weight.on(A.window()), opt));
  return out;
}

// --- partition operators and the commutator estimate ----------------------

/// Tent multiplier h((j - n)/N), h(x) = min(max(2 - |x|_inf, 0), 1).
class PartitionOperator {
 public:
  PartitionOperator(const Window& w, int N, Index center) : window_(w), N_(N), center_(std::move(center)) {
    if (N < 1) throw ValidationError("partition scale N must be >= 1");
    if (static_cast<int>(center_.size()) != w.dim()) throw ValidationError("center dimension mismatch");
    for (int c : center_)
      if (c % N != 0) throw ValidationError("partition center must lie in N Z^d");
    if (!w.contains(center_)) throw ValidationError("partition center outside window");
    mult_.resize(static_cast<Eigen::Index>(w.size()));
    for (std::size_t k = 0; k < w.size(); ++k) {
      double x = 0.0;
      for (int a = 0; a < w.dim(); ++a) x = std::max(x, std::abs(double(w.coord(k, a) - center_[a]) / N));
      mult_(static_cast<Eigen::Index>(k)) = std::min(std::max(2.0 - x, 0.0), 1.0);
    }
  }

  const Eigen::VectorXd& multiplier() const { return mult_; }
  int scale() const { return N_; }
  const Index& center() const { return center_; }

  /// alpha_n = sum_{|i - n|_inf < 2N} w(i)
  double alpha(const Eigen::VectorXd& w) const {
    double s = 0.0;
    for (std::size_t k = 0; k < window_.size(); ++k) {
      int m = 0;
      for (int a = 0; a < window_.dim(); ++a) m = std::max(m, std::abs(window_.coord(k, a) - center_[a]));
      if (m < 2 * N_) s += w(static_cast<Eigen::Index>(k));
    }
    return s;
  }

 private:
  Window window_;
  int N_;
  Index center_;
  Eigen::VectorXd mult_;
};

struct CommutatorReport {
  bool near = true;
  double lhs = 0.0;         // ||(Psi_n A - A Psi_n) Psi_n' c||_{q,w}
  double rhs = 0.0;
  double margin = 0.0;
  double max_entry = 0.0;   // max |a(i,j)| |h_n(i) - h_n(j)|
  double alpha_ratio = 1.0; // alpha_n / alpha_n' (far case)
};

inline CommutatorReport commutator_diagnostic(const LocalizedMatrix& A, int N, const Index& n, const Index& n2,
                                              double q, const WeightSequence& w, const DenseVector& c, double aq) {
  require_same_window(A.window(), w.window(), "commutator_diagnostic");
  const Window& win = A.window();
  const int d = win.dim();
  if (N > win.radius()) throw ValidationError("partition scale too large for window");
  if (static_cast<std::size_t>(c.size()) != win.size()) throw ValidationError("probe size mismatch");
  const PartitionOperator P(win, N, n), P2(win, N, n2);
  const Eigen::VectorXcd h = P.multiplier().cast<cplx>();
  const Eigen::VectorXcd h2 = P2.multiplier().cast<cplx>();

  const DenseMatrix comm = h.asDiagonal() * A.dense() - A.dense() * h.asDiagonal();
  CommutatorReport rep;
  rep.max_entry = comm.cwiseAbs().maxCoeff();
  const DenseVector y = comm * h2.cwiseProduct(c);
  rep.lhs = weighted_norm(y, q, w.values());
  const double cn = weighted_norm(c, q, w.values());

  int sep = 0;
  for (int a = 0; a < d; ++a) sep = std::max(sep, std::abs(n[a] - n2[a]));
  const auto prof = decay_profile(A);
  const double aq_root = std::pow(aq, 1.0 / q);
  rep.near = sep <= 8 * N;
  if (rep.near) {
    double tail = 0.0;
    const auto m0 = static_cast<std::size_t>(std::ceil(std::sqrt(double(N)) / 2.0));
    for (std::size_t m = m0; m < prof.size(); ++m) tail += ring_size(static_cast<long>(m), d) * prof[m];
    const double c1 = std::pow(2.0, 2 * d + 2.0 * d / q) / std::sqrt(double(N)) * aq_root * ring_power_sum(prof, 1.0);
    const double c2 = std::pow(2.0, 3 * d + 2.0 * d / q + 1) * aq_root * tail;
    rep.rhs = (c1 + c2) * cn;
  } else {
    rep.alpha_ratio = P.alpha(w.values()) / P2.alpha(w.values());
    const double far_sup = prof[static_cast<std::size_t>((sep + 1) / 2)];
    rep.rhs = std::pow(2.0, 2 * d) * std::pow(double(N), d) * aq_root * far_sup * std::pow(rep.alpha_ratio, 1.0 / q) * cn;
  }
  rep.margin = rep.rhs - rep.lhs;
  return rep;
}

}  // namespace wiener
