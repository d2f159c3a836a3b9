#pragma once

// Discrete A_q weights on windows of Z^d: cube scans, the centred maximal
// function, weighted l^q norms and empirical checks of the A_q inequalities.

#include "wiener/generate.hpp"
#include "wiener/lattice.hpp"

#include <optional>
#include <string>

namespace wiener {

enum class SequenceForm { trivial, power, table };

class WeightSequence {
 public:
  WeightSequence(const Window& w, Eigen::VectorXd values, SequenceForm form = SequenceForm::table, double alpha = 0.0)
      : window_(w), values_(std::move(values)), form_(form), alpha_(alpha) {
    if (static_cast<std::size_t>(values_.size()) != w.size()) throw ValidationError("weight sequence size mismatch");
    if (w.size() && !(values_.minCoeff() > 0.0)) throw ValidationError("weight sequence must be positive");
  }

  static WeightSequence trivial(const Window& w) {
    return {w, Eigen::VectorXd::Ones(w.size()), SequenceForm::trivial};
  }

  /// w(i) = (1 + |i|_inf)^alpha
  static WeightSequence power(const Window& w, double alpha) {
    Eigen::VectorXd v(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) v(k) = std::pow(1.0 + w.norm_inf(k), alpha);
    return {w, std::move(v), SequenceForm::power, alpha};
  }

  const Window& window() const { return window_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator()(std::size_t p) const { return values_(p); }
  SequenceForm form() const { return form_; }
  double alpha() const { return alpha_; }

  /// Same family on another window (tables cannot be re-windowed).
  WeightSequence on(const Window& w) const {
    switch (form_) {
      case SequenceForm::trivial: return trivial(w);
      case SequenceForm::power: return power(w, alpha_);
      case SequenceForm::table:
        if (w == window_) return *this;
        break;
    }
    throw ValidationError("table weight sequence is tied to its window");
  }

  std::string id() const {
    switch (form_) {
      case SequenceForm::trivial: return "trivial";
      case SequenceForm::power: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "power(%g)", alpha_);
        return buf;
      }
      case SequenceForm::table: return "table";
    }
    return "?";
  }

 private:
  Window window_;
  Eigen::VectorXd values_;
  SequenceForm form_;
  double alpha_;
};

/// d-dimensional inclusive prefix sums over the window box for box-sum queries.
class BoxSums {
 public:
  BoxSums(const Window& w, const Eigen::VectorXd& f) : d_(w.dim()), side_(w.side()) {
    std::size_t total = 1;
    for (int t = 0; t < d_; ++t) total *= static_cast<std::size_t>(side_ + 1);
    s_.assign(total, 0.0);
    // shift by one in each axis so that index 0 is the empty prefix
    for (std::size_t p = 0; p < w.size(); ++p) s_[padded(w, p)] = f(static_cast<Eigen::Index>(p));
    std::size_t stride = 1;
    for (int t = d_ - 1; t >= 0; --t) {
      for (std::size_t k = 0; k < total; ++k)
        if ((k / stride) % (side_ + 1) != 0) s_[k] += s_[k - stride];
      stride *= static_cast<std::size_t>(side_ + 1);
    }
  }

  /// Sum over the box lo[t] <= x[t] <= hi[t] in 0-based window offsets (clipped).
  double sum(const int* lo, const int* hi) const {
    std::vector<int> a(d_), b(d_);
    for (int t = 0; t < d_; ++t) {
      a[t] = std::max(lo[t], 0);
      b[t] = std::min(hi[t], side_ - 1);
      if (a[t] > b[t]) return 0.0;
    }
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << d_); ++mask) {
      std::size_t key = 0;
      int sign = 1;
      for (int t = 0; t < d_; ++t) {
        const int c = (mask >> t) & 1u ? a[t] : b[t] + 1;
        if ((mask >> t) & 1u) sign = -sign;
        key = key * static_cast<std::size_t>(side_ + 1) + static_cast<std::size_t>(c);
      }
      total += sign * s_[key];
    }
    return total;
  }

 private:
  std::size_t padded(const Window& w, std::size_t p) const {
    std::size_t key = 0;
    for (int t = 0; t < d_; ++t)
      key = key * static_cast<std::size_t>(side_ + 1) + static_cast<std::size_t>(w.coord(p, t) + w.radius() + 1);
    return key;
  }

  int d_;
  int side_;
  std::vector<double> s_;
};

struct AqReport {
  double q = 2.0;
  double bound = 1.0;
  Index argmax_corner;  // a
  int argmax_N = 1;
  int N_cap = 1;
  std::size_t cubes_scanned = 0;
};

namespace detail {

/// Calls f(corner offsets) for every corner of an N-cube inside a side^d box.
template <class F>
void for_each_corner(int d, int side, int N, F&& f) {
  const int last = side - N;
  if (last < 0) return;
  std::vector<int> c(d, 0);
  while (true) {
    f(c);
    int t = d - 1;
    while (t >= 0 && c[t] == last) c[t--] = 0;
    if (t < 0) return;
    ++c[t];
  }
}

}  // namespace detail

/// Scans the A_q quantity over all cubes a + [0, N-1]^d inside the window with N <= N_cap.
inline AqReport aq_bound(const WeightSequence& w, double q, int N_cap) {
  if (!(q >= 1.0) || std::isinf(q)) throw ValidationError("q must lie in [1, inf)");
  if (N_cap < 1) throw ValidationError("N_cap must be >= 1");
  const Window& win = w.window();
  const int d = win.dim();
  const int side = win.side();
  if (side < 1) throw ValidationError("window too small for any cube");
  AqReport rep;
  rep.q = q;
  rep.N_cap = N_cap;
  rep.bound = 0.0;

  const BoxSums sw(win, w.values());
  std::optional<BoxSums> sdual;
  if (q > 1.0) sdual.emplace(win, w.values().array().pow(-1.0 / (q - 1.0)).matrix());

  std::vector<int> hi(d);
  for (int N = 1; N <= std::min(N_cap, side); ++N) {
    const double vol = std::pow(double(N), d);
    detail::for_each_corner(d, side, N, [&](const std::vector<int>& lo) {
      for (int t = 0; t < d; ++t) hi[t] = lo[t] + N - 1;
      const double avg_w = sw.sum(lo.data(), hi.data()) / vol;
      double val;
      if (q > 1.0) {
        const double avg_dual = sdual->sum(lo.data(), hi.data()) / vol;
        val = avg_w * std::pow(avg_dual, q - 1.0);
      } else {
        double mn = std::numeric_limits<double>::infinity();
        detail::for_each_corner(d, N, 1, [&](const std::vector<int>& off) {
          Index idx(d);
          for (int t = 0; t < d; ++t) idx[t] = lo[t] + off[t] - win.radius();
          mn = std::min(mn, w(win.position(idx)));
        });
        val = avg_w / mn;
      }
      ++rep.cubes_scanned;
      if (val > rep.bound) {
        rep.bound = val;
        rep.argmax_N = N;
        rep.argmax_corner.assign(lo.begin(), lo.end());
        for (auto& c : rep.argmax_corner) c -= win.radius();
      }
    });
  }
  return rep;
}

/// Mc(i) = sup_N (2N+1)^{-d} sum_{k in i + [-N,N]^d} |c(k)|, N = 0..2R.
inline Eigen::VectorXd maximal_values(const LatticeSequence& c) {
  const Window& w = c.window();
  const int d = w.dim();
  const BoxSums s(w, c.values().cwiseAbs());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(w.size());
  std::vector<int> lo(d), hi(d);
  for (std::size_t p = 0; p < w.size(); ++p) {
    double best = 0.0;
    for (int N = 0; N <= w.diameter(); ++N) {
      for (int t = 0; t < d; ++t) {
        lo[t] = w.coord(p, t) + w.radius() - N;
        hi[t] = w.coord(p, t) + w.radius() + N;
      }
      best = std::max(best, s.sum(lo.data(), hi.data()) / std::pow(2.0 * N + 1.0, d));
    }
    out(static_cast<Eigen::Index>(p)) = best;
  }
  return out;
}

inline LatticeSequence maximal(const LatticeSequence& c) {
  return LatticeSequence(c.window(), maximal_values(c).cast<cplx>());
}

/// (sum |c(i)|^q w(i))^{1/q}
inline double weighted_norm(const Eigen::VectorXd& abs_c, double q, const Eigen::VectorXd& w) {
  if (!(q >= 1.0) || std::isinf(q)) throw ValidationError("q must lie in [1, inf)");
  double s = 0.0;
  for (Eigen::Index k = 0; k < abs_c.size(); ++k) s += std::pow(abs_c(k), q) * w(k);
  return std::pow(s, 1.0 / q);
}

inline double weighted_norm(const LatticeSequence& c, double q, const WeightSequence& w) {
  require_same_window(c.window(), w.window(), "weighted_norm");
  return weighted_norm(c.values().cwiseAbs().eval(), q, w.values());
}

inline double weighted_norm(const DenseVector& c, double q, const Eigen::VectorXd& w) {
  return weighted_norm(c.cwiseAbs().eval(), q, w);
}

struct CharacterizationCheck {
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_relative = std::numeric_limits<double>::infinity();
  int trials = 0;
};

/// (avg |c|)^q (avg w) <= A_q(w) avg(|c|^q w) on random cubes and sequences.
inline CharacterizationCheck aq_characterization_check(const WeightSequence& w, double q, const AqReport& aq,
                                                       int trials, std::uint64_t seed) {
  const Window& win = w.window();
  const int d = win.dim();
  rng::Stream s(seed, 0xa9);
  CharacterizationCheck rep;
  rep.trials = trials;
  const int Nmax = std::min(aq.N_cap, win.side());
  for (int t = 0; t < trials; ++t) {
    const int N = static_cast<int>(s.integer(1, Nmax));
    std::vector<int> lo(d);
    for (int a = 0; a < d; ++a) lo[a] = static_cast<int>(s.integer(0, win.side() - N));
    const int style = static_cast<int>(s.integer(0, 2));
    double sc = 0.0, sw = 0.0, scw = 0.0;
    detail::for_each_corner(d, N, 1, [&](const std::vector<int>& off) {
      Index idx(d);
      for (int a = 0; a < d; ++a) idx[a] = lo[a] + off[a] - win.radius();
      const double wi = w(win.position(idx));
      double c = s.uniform();
      if (style == 1) c = s.uniform() < 0.5 ? 0.0 : c;
      if (style == 2) c = std::pow(wi, -1.0 / std::max(q - 1.0, 1e-300)) * (0.9 + 0.2 * c);
      sc += c;
      sw += wi;
      scw += std::pow(c, q) * wi;
    });
    const double vol = std::pow(double(N), d);
    const double lhs = std::pow(sc / vol, q) * (sw / vol);
    const double rhs = aq.bound * scw / vol;
    rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
    if (rhs > 0.0) rep.worst_relative = std::min(rep.worst_relative, (rhs - lhs) / rhs);
  }
  return rep;
}

struct WeakTypeReport {
  double weak_constant = 0.0;  // max alpha^q sum_{Mc >= alpha} w / ||c||^q
  double strong_ratio = 0.0;   // max ||Mc||_{q,w} / ||c||_{q,w} (q > 1)
  int trials = 0;
};

namespace detail {

inline void accumulate_weak_type(const LatticeSequence& c, double q, const WeightSequence& w, WeakTypeReport& rep) {
  const double cn = weighted_norm(c, q, w);
  if (cn == 0.0) return;
  const Eigen::VectorXd M = maximal_values(c);
  std::vector<std::pair<double, double>> levels;  // (Mc(i), w(i)) sorted descending
  for (Eigen::Index k = 0; k < M.size(); ++k) levels.emplace_back(M(k), w(static_cast<std::size_t>(k)));
  std::sort(levels.begin(), levels.end(), [](auto& x, auto& y) { return x.first > y.first; });
  double mass = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    mass += levels[k].second;
    if (k + 1 < levels.size() && levels[k + 1].first == levels[k].first) continue;
    if (levels[k].first <= 0.0) break;
    rep.weak_constant = std::max(rep.weak_constant, std::pow(levels[k].first, q) * mass / std::pow(cn, q));
  }
  if (q > 1.0) rep.strong_ratio = std::max(rep.strong_ratio, weighted_norm(M, q, w.values()) / cn);
}

}  // namespace detail

/// Empirical weak- and strong-type constants of the maximal operator on l^q_w.
inline WeakTypeReport maximal_weak_type_check(const WeightSequence& w, double q, int trials, std::uint64_t seed) {
  const Window& win = w.window();
  rng::Stream s(seed, 0x3e);
  WeakTypeReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    LatticeSequence c(win);
    if (t == 0) {
      c.set(win.origin(), 1.0);
    } else {
      const double density = s.uniform(0.05, 1.0);
      for (std::size_t p = 0; p < win.size(); ++p)
        if (s.uniform() < density) c.set(p, s.uniform());
    }
    detail::accumulate_weak_type(c, q, w, rep);
  }
  return rep;
}

inline WeakTypeReport maximal_weak_type_single(const LatticeSequence& c, const WeightSequence& w, double q) {
  WeakTypeReport rep;
  rep.trials = 1;
  detail::accumulate_weak_type(c, q, w, rep);
  return rep;
}

}  // namespace wiener
