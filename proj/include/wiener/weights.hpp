#pragma once

// Two-index weight matrices u(i,j) >= 1, companion weights, the cross norm
// C_p(v,u), and the (A_N, B_N(p)) -> (D, theta) certificate used by the
// constructive inversion bounds.

#include "wiener/generate.hpp"
#include "wiener/lattice.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cstdio>
#include <limits>
#include <optional>
#include <string>

namespace wiener {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Hoelder conjugate p/(p-1); p == 1 maps to +inf.
inline double conjugate_exponent(double p) {
  if (p < 1.0) throw ValidationError("exponent p must be >= 1");
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// c * (1+m)^alpha * exp(tau * m^delta). Every closed-form weight is one of these.
struct RadialForm {
  double c = 1.0;
  double alpha = 0.0;
  double tau = 0.0;
  double delta = 1.0;

  double operator()(double m) const {
    double v = c;
    if (alpha != 0.0) v *= std::pow(1.0 + m, alpha);
    if (tau != 0.0 && m > 0.0) v *= std::exp(tau * std::pow(m, delta));
    return v;
  }

  double log_value(double m) const {
    double v = std::log(c);
    if (alpha != 0.0) v += alpha * std::log1p(m);
    if (tau != 0.0 && m > 0.0) v += tau * std::pow(m, delta);
    return v;
  }
};

enum class WeightForm { trivial, polynomial, subexponential, constant, table };

class WeightMatrix {
 public:
  WeightMatrix() = default;

  static WeightMatrix trivial() { return {}; }

  static WeightMatrix polynomial(double alpha) {
    if (!(alpha >= 0.0)) throw ValidationError("polynomial weight needs alpha >= 0");
    WeightMatrix u;
    u.form_ = WeightForm::polynomial;
    u.radial_.alpha = alpha;
    return u;
  }

  static WeightMatrix subexponential(double delta, double tau = 1.0) {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("subexponential weight needs delta in (0,1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("subexponential weight needs tau in (0,1]");
    WeightMatrix u;
    u.form_ = WeightForm::subexponential;
    u.radial_.tau = tau;
    u.radial_.delta = delta;
    return u;
  }

  static WeightMatrix constant(double c) {
    if (!(c >= 1.0)) throw ValidationError("constant weight needs c >= 1");
    WeightMatrix u;
    u.form_ = WeightForm::constant;
    u.radial_.c = c;
    return u;
  }

  /// Tabulated weight on a window; must be symmetric with every entry >= 1.
  static WeightMatrix table(const Window& w, Eigen::MatrixXd values) {
    if (static_cast<std::size_t>(values.rows()) != w.size() || static_cast<std::size_t>(values.cols()) != w.size())
      throw ValidationError("weight table does not match window size");
    if (!(values.minCoeff() >= 1.0)) throw ValidationError("weight table has an entry below 1");
    if (!values.isApprox(values.transpose(), 0.0) && (values - values.transpose()).cwiseAbs().maxCoeff() != 0.0)
      throw ValidationError("weight table is not symmetric");
    WeightMatrix u;
    u.form_ = WeightForm::table;
    u.window_ = w;
    u.values_ = std::move(values);
    return u;
  }

  WeightForm form() const { return form_; }
  bool closed_form() const { return form_ != WeightForm::table; }
  const RadialForm& radial_form() const { return radial_; }
  const std::optional<Window>& table_window() const { return window_; }
  const Eigen::MatrixXd& table_values() const { return values_; }

  double alpha() const { return radial_.alpha; }
  double delta() const { return radial_.delta; }
  double tau() const { return radial_.tau; }
  double c() const { return radial_.c; }

  /// Value at sup-distance m (closed forms only).
  double radial(double m) const {
    if (!closed_form()) throw ValidationError("table weight has no radial form");
    return radial_(m);
  }

  /// u(i,j) for positions p, q of window w.
  double eval(const Window& w, std::size_t p, std::size_t q) const {
    if (closed_form()) return radial_(w.distance(p, q));
    check_window(w);
    return values_(p, q);
  }

  double at(const Window& w, std::span<const int> i, std::span<const int> j) const {
    if (closed_form()) {
      if (i.size() != j.size()) throw ValidationError("index dimension mismatch");
      int m = 0;
      for (std::size_t a = 0; a < i.size(); ++a) m = std::max(m, std::abs(i[a] - j[a]));
      return radial_(m);
    }
    check_window(w);
    if (!w.contains(i) || !w.contains(j)) throw ValidationError("weight table lookup outside window");
    return values_(w.position(i), w.position(j));
  }

  /// Functor (p, q, m) -> u for fast loops over window pairs.
  struct Evaluator {
    std::vector<double> by_distance;
    const Eigen::MatrixXd* table = nullptr;
    double operator()(std::size_t p, std::size_t q, int m) const {
      return table ? (*table)(p, q) : by_distance[m];
    }
  };

  Evaluator on(const Window& w) const {
    Evaluator ev;
    if (closed_form()) {
      ev.by_distance.resize(static_cast<std::size_t>(w.diameter()) + 1);
      for (std::size_t m = 0; m < ev.by_distance.size(); ++m) ev.by_distance[m] = radial_(double(m));
    } else {
      check_window(w);
      ev.table = &values_;
    }
    return ev;
  }

  /// sup_i u(i,i) on a window.
  double diagonal_sup(const Window& w) const {
    if (closed_form()) return radial_(0.0);
    check_window(w);
    return values_.diagonal().maxCoeff();
  }

  std::string id() const {
    char buf[96];
    switch (form_) {
      case WeightForm::trivial: return "trivial";
      case WeightForm::polynomial: std::snprintf(buf, sizeof buf, "polynomial(%g)", radial_.alpha); return buf;
      case WeightForm::subexponential:
        std::snprintf(buf, sizeof buf, "subexponential(%g,%g)", radial_.delta, radial_.tau);
        return buf;
      case WeightForm::constant: std::snprintf(buf, sizeof buf, "constant(%g)", radial_.c); return buf;
      case WeightForm::table: return "table";
    }
    return "?";
  }

  void check_window(const Window& w) const {
    if (closed_form()) return;
    if (w.dim() != window_->dim()) throw ValidationError("weight table dimension mismatch");
    if (!(w == *window_)) throw ValidationError("weight table defined on a different window");
  }

 private:
  WeightForm form_ = WeightForm::trivial;
  RadialForm radial_;
  std::optional<Window> window_;
  Eigen::MatrixXd values_;
};

/// Weighted envelope h(m) = sup_{|i-j|_inf >= m} |a(i,j)| u(i,j), m = 0..2R.
inline DecayProfile decay_profile(const LocalizedMatrix& A, const WeightMatrix& u) {
  const auto ev = u.on(A.window());
  const auto& a = A.dense();
  return ring_suprema(A.window(), [&](std::size_t p, std::size_t q, int m) { return std::abs(a(p, q)) * ev(p, q, m); });
}

/// Companion weight for the built-in families.
inline WeightMatrix default_companion(const WeightMatrix& u, double p) {
  conjugate_exponent(p);
  switch (u.form()) {
    case WeightForm::trivial: return WeightMatrix::trivial();
    case WeightForm::constant: return WeightMatrix::trivial();
    case WeightForm::polynomial: return WeightMatrix::constant(std::pow(2.0, u.alpha()));
    case WeightForm::subexponential: {
      // (x+y)^delta <= x^delta + (2^delta - 1) y^delta for y <= x; tau/2 covers
      // that whenever delta <= log2(3/2).
      const double tau_v = std::max(0.5, std::pow(2.0, u.delta()) - 1.0) * u.tau();
      return WeightMatrix::subexponential(u.delta(), std::min(tau_v, 1.0));
    }
    case WeightForm::table: break;
  }
  throw ValidationError("table weights need an explicitly supplied companion");
}

// --- ring series over Z^d --------------------------------------------------

/// Ratio v(x)/u(x) of two radial forms and its asymptotics.
struct RadialRatio {
  RadialForm num;
  RadialForm den;

  enum class Tail { decays_fast, polynomial, grows };

  // in log space: both factors may overflow separately
  double operator()(double x) const { return std::exp(num.log_value(x) - den.log_value(x)); }
  double log_ratio(double x) const { return num.log_value(x) - den.log_value(x); }

  /// d/dx log r(x) for x > 0.
  double log_derivative(double x) const {
    double g = (num.alpha - den.alpha) / (1.0 + x);
    if (num.tau != 0.0) g += num.tau * num.delta * std::pow(x, num.delta - 1.0);
    if (den.tau != 0.0) g -= den.tau * den.delta * std::pow(x, den.delta - 1.0);
    return g;
  }

  Tail tail() const {
    double lead_coef = 0.0;
    double lead_pow = -1.0;
    auto consider = [&](double coef, double pw) {
      if (coef == 0.0) return;
      if (pw > lead_pow) {
        lead_pow = pw;
        lead_coef = coef;
      } else if (pw == lead_pow) {
        lead_coef += coef;
      }
    };
    consider(num.tau, num.delta);
    if (den.tau != 0.0 && num.tau != 0.0 && den.delta == num.delta) {
      lead_coef = num.tau - den.tau;
      lead_pow = num.delta;
      if (lead_coef == 0.0) lead_pow = -1.0;
    } else {
      consider(-den.tau, den.delta);
    }
    if (lead_pow < 0.0 || lead_coef == 0.0) return Tail::polynomial;
    return lead_coef < 0.0 ? Tail::decays_fast : Tail::grows;
  }

  double poly_exponent() const { return num.alpha - den.alpha; }
};

/// sum over k in Z^d, |k|_inf >= m0, of s(|k|_inf)^e where s(m) = sup_{m'>=m} r(m').
/// Exact ring sums up to `cut`, plus an integral-comparison bound for the rest.
struct RingSeries {
  double exponent = 1.0;  // e; +inf means supremum instead of sum
  int d = 1;
  long cut = 0;                 // last ring summed exactly
  std::vector<double> sup;      // s(m), m = 0..cut
  std::vector<double> suffix;   // sum_{m' = m}^{cut} ring(m') s(m')^e
  double tail = 0.0;            // bound on sum_{m > cut}
  double limit = 0.0;           // lim_{m -> inf} s(m)
  bool finite = true;
  bool window_only = false;

  /// (sum_{|k| >= m0})^{1/e}, or sup_{m >= m0} s(m) when e is infinite.
  double norm_from(long m0) const {
    if (!finite) return kInf;
    if (std::isinf(exponent)) {
      if (m0 <= cut) return sup[static_cast<std::size_t>(m0)];
      return window_only ? 0.0 : limit_or_edge();
    }
    const double s = (m0 <= cut ? suffix[static_cast<std::size_t>(m0)] : 0.0) + tail;
    return std::pow(s, 1.0 / exponent);
  }
  double norm() const { return norm_from(0); }
  double partial_norm() const {
    if (!finite) return kInf;
    if (std::isinf(exponent)) return sup.empty() ? 0.0 : sup[0];
    return std::pow(suffix.empty() ? 0.0 : suffix[0], 1.0 / exponent);
  }

 private:
  double limit_or_edge() const { return sup.empty() ? limit : sup.back(); }
};

namespace detail {

/// Smallest grid point X such that f(x) <= 0 at every sampled x >= X.
template <class F>
std::optional<double> eventually_nonpositive(F&& f) {
  double last_bad = 0.0;
  bool seen_bad = false;
  for (int k = 1; k <= 1000; ++k)
    if (f(double(k)) > 0.0) {
      last_bad = k;
      seen_bad = true;
    }
  double x = 1000.0;
  while (x < 1e15) {
    x *= 1.01;
    if (f(x) > 0.0) {
      last_bad = x;
      seen_bad = true;
    }
  }
  if (seen_bad && last_bad > 1e14) return std::nullopt;
  return seen_bad ? std::ceil(last_bad) + 1.0 : 0.0;
}

}  // namespace detail

/// Ring series of the ratio v/u for closed-form weights over all of Z^d.
/// Rings up to max(min_cut, monotonicity threshold) are summed exactly.
inline RingSeries radial_ratio_series(const WeightMatrix& v, const WeightMatrix& u, double exponent, int d,
                                      long min_cut) {
  RingSeries rs;
  rs.exponent = exponent;
  rs.d = d;
  const RadialRatio r{v.radial_form(), u.radial_form()};
  const auto tail = r.tail();
  const double beta = r.poly_exponent();
  const bool sup_mode = std::isinf(exponent);

  bool bounded = tail == RadialRatio::Tail::decays_fast || (tail == RadialRatio::Tail::polynomial && beta <= 0.0);
  bool summable = sup_mode ? bounded
                           : (tail == RadialRatio::Tail::decays_fast ||
                              (tail == RadialRatio::Tail::polynomial && exponent * beta < -d));
  rs.limit = (tail == RadialRatio::Tail::polynomial && beta == 0.0) ? r(0.0) : 0.0;
  if (!summable) {
    rs.finite = false;
    return rs;
  }

  // Past X both r and the tail integrand (1+x)^{d-1} r(x)^e are nonincreasing.
  auto growth = [&](double x) {
    const double lr = r.log_derivative(x);
    if (sup_mode) return lr;
    return std::max(lr, (d - 1.0) / (1.0 + x) + exponent * lr);
  };
  const auto threshold = detail::eventually_nonpositive(growth);
  if (!threshold) {
    rs.finite = false;
    return rs;
  }
  rs.cut = std::max<long>(min_cut, static_cast<long>(*threshold));

  const auto n = static_cast<std::size_t>(rs.cut) + 1;
  rs.sup.assign(n, 0.0);
  double running = r(double(rs.cut + 1));
  for (std::size_t m = n; m-- > 0;) {
    running = std::max(running, r(double(m)));
    rs.sup[m] = running;
  }
  if (sup_mode) return rs;

  rs.suffix.assign(n + 1, 0.0);
  for (std::size_t m = n; m-- > 0;)
    rs.suffix[m] = rs.suffix[m + 1] + ring_size(static_cast<long>(m), d) * std::pow(rs.sup[m], exponent);
  rs.suffix.pop_back();

  // ring(m,d) <= d 2^d (1+m)^{d-1}; monotone integrand bounds the sum beyond cut.
  const double K = d * std::pow(2.0, d);
  const double M = static_cast<double>(rs.cut);
  if (tail == RadialRatio::Tail::polynomial) {
    const double gamma = d - 1.0 + exponent * beta;
    rs.tail = K * std::pow(r.num.c / r.den.c, exponent) * std::pow(1.0 + M, gamma + 1.0) / (-gamma - 1.0);
  } else {
    auto integrand = [&](double x) { return K * std::exp((d - 1.0) * std::log1p(x) + exponent * r.log_ratio(x)); };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double val = integrator.integrate(
        [&](double y) { return integrand(M + y); }, 0.0, std::numeric_limits<double>::infinity());
    rs.tail = val * (1.0 + 1e-10) + 1e-300;
  }
  return rs;
}

/// Ring series of v/u restricted to the pairs of a window (tables or mixed forms).
inline RingSeries window_ratio_series(const WeightMatrix& v, const WeightMatrix& u, double exponent,
                                      const Window& w) {
  RingSeries rs;
  rs.exponent = exponent;
  rs.d = w.dim();
  rs.window_only = true;
  const auto ev = v.on(w);
  const auto eu = u.on(w);
  const auto prof = ring_suprema(w, [&](std::size_t p, std::size_t q, int m) { return ev(p, q, m) / eu(p, q, m); });
  rs.cut = w.diameter();
  rs.sup = prof.h;
  if (!std::isinf(exponent)) {
    rs.suffix.assign(rs.sup.size() + 1, 0.0);
    for (std::size_t m = rs.sup.size(); m-- > 0;)
      rs.suffix[m] = rs.suffix[m + 1] + ring_size(static_cast<long>(m), rs.d) * std::pow(rs.sup[m], exponent);
    rs.suffix.pop_back();
  }
  return rs;
}

/// Rings summed exactly before the integral tail bound takes over.
inline constexpr long kCpExactRings = 1L << 16;

/// The ring series behind C_p(v,u): over Z^d for closed forms, else window-only.
inline RingSeries cp_series(const WeightMatrix& v, const WeightMatrix& u, double p, const Window& w) {
  const double e = conjugate_exponent(p);
  if (v.closed_form() && u.closed_form())
    return radial_ratio_series(v, u, e, w.dim(), std::max<long>(w.diameter(), kCpExactRings));
  return window_ratio_series(v, u, e, w);
}

/// C_p(v,u) = || (sup_{|i-j| >= |k|} v/u)_k ||_{p/(p-1)}.
inline double cp_value(const WeightMatrix& v, const WeightMatrix& u, double p, const Window& w) {
  return cp_series(v, u, p, w).norm();
}

struct SubmultReport {
  bool holds = false;
  double worst_margin = kInf;
  double Cp = kInf;
  double Cp_partial = kInf;
  double Cp_tail_bound = 0.0;
  bool Cp_window_only = false;
  std::size_t triples_checked = 0;
  bool exhaustive = false;
};

/// Checks u(i,j) <= u(i,k) v(k,j) + v(i,k) u(k,j) over window triples and
/// evaluates C_p(v,u).
inline SubmultReport check_submultiplicative(const WeightMatrix& u, const WeightMatrix& v, double p, const Window& w,
                                             std::size_t sample_budget, std::uint64_t seed = 0) {
  if (sample_budget < 1) throw ValidationError("sample budget must be >= 1");
  u.check_window(w);
  v.check_window(w);
  SubmultReport rep;
  const std::size_t n = w.size();
  const auto dist = distance_table(w);
  const auto eu = u.on(w);
  const auto ev = v.on(w);
  auto margin = [&](std::size_t i, std::size_t j, std::size_t k) {
    const int ij = dist[i * n + j], ik = dist[i * n + k], kj = dist[k * n + j];
    return eu(i, k, ik) * ev(k, j, kj) + ev(i, k, ik) * eu(k, j, kj) - eu(i, j, ij);
  };
  const double total = double(n) * double(n) * double(n);
  if (total <= double(sample_budget)) {
    rep.exhaustive = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) rep.worst_margin = std::min(rep.worst_margin, margin(i, j, k));
    rep.triples_checked = n * n * n;
  } else {
    rng::Stream s(seed, 0x5b);
    for (std::size_t t = 0; t < sample_budget; ++t) {
      const auto i = static_cast<std::size_t>(s.integer(0, long(n) - 1));
      const auto j = static_cast<std::size_t>(s.integer(0, long(n) - 1));
      const auto k = static_cast<std::size_t>(s.integer(0, long(n) - 1));
      rep.worst_margin = std::min(rep.worst_margin, margin(i, j, k));
    }
    rep.triples_checked = sample_budget;
  }
  rep.holds = rep.worst_margin >= 0.0;
  const auto series = cp_series(v, u, p, w);
  rep.Cp = series.norm();
  rep.Cp_partial = series.partial_norm();
  rep.Cp_tail_bound = series.tail;
  rep.Cp_window_only = series.window_only;
  return rep;
}

/// Upper bound for M_p(u): the smallest C_p(v,u) over candidates that pass
/// the submultiplicativity check on the window.
inline double mpu_upper_bound(const WeightMatrix& u, double p, const std::vector<WeightMatrix>& candidates,
                              const Window& w, std::size_t sample_budget = 200000) {
  if (candidates.empty()) throw ValidationError("mpu_upper_bound: empty candidate list");
  double best = kInf;
  bool any = false;
  for (const auto& v : candidates) {
    const auto rep = check_submultiplicative(u, v, p, w, sample_budget);
    if (!rep.holds) continue;
    any = true;
    best = std::min(best, rep.Cp);
  }
  if (!any) throw ValidationError("mpu_upper_bound: no candidate is a companion on this window");
  return best;
}

// --- (D, theta) certificate ------------------------------------------------

struct ThetaFit {
  bool ok = false;
  std::string reason;
  double D = kInf;
  double theta = kInf;
  std::vector<int> N_grid;
  std::vector<double> t_grid;
  std::vector<double> A_N_values;
  std::vector<double> B_N_values;
  std::vector<double> min_values;    // min_N (A_N + B_N t) per t
  std::vector<int> argmin_N;
  std::vector<double> margins;       // D t^theta - min value, per t
  double B_tail_bound = 0.0;
  long exact_cut = 0;
};

/// Log-spaced grid of `count` points in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int k = 0; k < count; ++k)
    g[k] = count == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (count - 1));
  return g;
}

inline ThetaFit theta_fit(const WeightMatrix& u, const WeightMatrix& v, double p, int d, int N_max,
                          const std::vector<double>& t_grid) {
  if (N_max < 2) throw ValidationError("theta_fit: N_max must be >= 2");
  if (t_grid.empty()) throw ValidationError("theta_fit: empty t grid");
  for (double t : t_grid)
    if (!(t >= 1.0)) throw ValidationError("theta_fit: t grid must lie in [1, inf)");
  if (!u.closed_form() || !v.closed_form()) throw ValidationError("theta_fit needs closed-form weights");

  ThetaFit fit;
  fit.t_grid = t_grid;
  const double e = conjugate_exponent(p);
  const auto series = radial_ratio_series(v, u, e, d, N_max);
  if (!series.finite) {
    fit.reason = "C_p(v,u) diverges; B_N(p) is infinite";
    return fit;
  }
  fit.B_tail_bound = series.tail;
  fit.exact_cut = series.cut;

  for (int N = 1; N <= N_max; ++N) {
    fit.N_grid.push_back(N);
    // A_N = sum_{m <= N} ring(m) max_{m <= m' <= N} v(m')
    double a = 0.0, run = 0.0;
    std::vector<double> vmax(static_cast<std::size_t>(N) + 1);
    for (int m = N; m >= 0; --m) {
      run = std::max(run, v.radial(m));
      vmax[m] = run;
    }
    for (int m = 0; m <= N; ++m) a += ring_size(m, d) * vmax[m];
    fit.A_N_values.push_back(a);
    fit.B_N_values.push_back(series.norm_from((N + 1) / 2));
  }

  for (double t : t_grid) {
    double best = kInf;
    int arg = 0;
    for (std::size_t k = 0; k < fit.N_grid.size(); ++k) {
      const double val = fit.A_N_values[k] + fit.B_N_values[k] * t;
      if (val < best) {
        best = val;
        arg = fit.N_grid[k];
      }
    }
    fit.min_values.push_back(best);
    fit.argmin_N.push_back(arg);
  }

  if (series.limit > 0.0) {
    fit.reason = "B_N(p) does not vanish as N grows; inf_N (A_N + B_N t) grows linearly in t";
    return fit;
  }
  if (t_grid.size() < 2) {
    fit.reason = "need at least two t values to fit theta";
    return fit;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double x = std::log(t_grid[k]), y = std::log(fit.min_values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double var = sxx - sx * sx / n;
  if (var <= 0.0) {
    fit.reason = "degenerate t grid";
    return fit;
  }
  fit.theta = (sxy - sx * sy / n) / var;
  if (!(fit.theta > 0.0 && fit.theta < 1.0)) {
    fit.reason = "fitted theta outside (0,1)";
    return fit;
  }
  double D = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    D = std::max(D, fit.min_values[k] / std::pow(t_grid[k], fit.theta));
  fit.D = D * (1.0 + 4 * std::numeric_limits<double>::epsilon());
  bool certified = true;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double m = fit.D * std::pow(t_grid[k], fit.theta) - fit.min_values[k];
    fit.margins.push_back(m);
    if (m < 0.0) certified = false;
  }
  fit.ok = certified;
  if (!certified) fit.reason = "certificate failed on the t grid";
  return fit;
}

}  // namespace wiener
