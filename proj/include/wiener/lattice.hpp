#pragma once

// Finitely supported matrices and sequences over a cubic window [-R, R]^d of
// the integer lattice. Every other header in the library builds on these.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wiener {

using cplx = std::complex<double>;
using Index = std::vector<int>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Bad input: wrong shapes, parameters out of range, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of lattice points k in Z^d with |k|_inf == m.
inline double ring_size(long m, int d) {
  if (m == 0) return 1.0;
  return std::pow(2.0 * m + 1.0, d) - std::pow(2.0 * m - 1.0, d);
}

/// The index set [-R, R]^d, enumerated lexicographically with the first
/// coordinate most significant.
class Window {
 public:
  Window() = default;
  Window(int d, int radius) : d_(d), radius_(radius) {
    if (d < 1) throw ValidationError("window dimension must be >= 1");
    if (radius < 0) throw ValidationError("window radius must be >= 0");
    std::size_t n = 1;
    for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(side());
    size_ = n;
  }

  int dim() const { return d_; }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }
  std::size_t size() const { return size_; }

  bool contains(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != d_) return false;
    return std::all_of(idx.begin(), idx.end(),
                       [&](int x) { return x >= -radius_ && x <= radius_; });
  }

  std::size_t position(std::span<const int> idx) const {
    if (!contains(idx)) throw ValidationError("index outside window");
    std::size_t pos = 0;
    for (int x : idx) pos = pos * side() + static_cast<std::size_t>(x + radius_);
    return pos;
  }

  int coord(std::size_t pos, int axis) const {
    std::size_t stride = 1;
    for (int a = d_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(side());
    return static_cast<int>((pos / stride) % side()) - radius_;
  }

  Index index(std::size_t pos) const {
    Index idx(d_);
    for (int a = d_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(pos % side()) - radius_;
      pos /= side();
    }
    return idx;
  }

  /// Flat table of all coordinates, d entries per position.
  std::vector<int> coordinates() const {
    std::vector<int> out(size_ * d_);
    for (std::size_t p = 0; p < size_; ++p) {
      std::size_t rest = p;
      for (int a = d_ - 1; a >= 0; --a) {
        out[p * d_ + a] = static_cast<int>(rest % side()) - radius_;
        rest /= side();
      }
    }
    return out;
  }

  int norm_inf(std::size_t pos) const {
    int m = 0;
    for (int a = 0; a < d_; ++a) m = std::max(m, std::abs(coord(pos, a)));
    return m;
  }

  int distance(std::size_t p, std::size_t q) const {
    int m = 0;
    for (int a = 0; a < d_; ++a) m = std::max(m, std::abs(coord(p, a) - coord(q, a)));
    return m;
  }

  std::size_t origin() const { return (size_ - 1) / 2; }

  /// Largest |i - j|_inf inside the window.
  int diameter() const { return 2 * radius_; }

  bool operator==(const Window& o) const { return d_ == o.d_ && radius_ == o.radius_; }

 private:
  int d_ = 1;
  int radius_ = 0;
  std::size_t size_ = 1;
};

/// Pairwise sup-distances |i - j|_inf for all positions, row-major n x n.
inline std::vector<int> distance_table(const Window& w) {
  const auto coords = w.coordinates();
  const std::size_t n = w.size();
  const int d = w.dim();
  std::vector<int> dist(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      int m = 0;
      for (int a = 0; a < d; ++a) m = std::max(m, std::abs(coords[p * d + a] - coords[q * d + a]));
      dist[p * n + q] = m;
    }
  return dist;
}

/// Matrix (a(i,j)) with i, j in a window. Absent and zero entries are the
/// same thing; storage is dense because the windows used here are small.
class LocalizedMatrix {
 public:
  LocalizedMatrix() = default;
  explicit LocalizedMatrix(const Window& w) : window_(w), a_(DenseMatrix::Zero(w.size(), w.size())) {}
  LocalizedMatrix(const Window& w, DenseMatrix a) : window_(w), a_(std::move(a)) {
    if (static_cast<std::size_t>(a_.rows()) != w.size() || static_cast<std::size_t>(a_.cols()) != w.size())
      throw ValidationError("dense block does not match window size");
  }

  static LocalizedMatrix identity(const Window& w) {
    return {w, DenseMatrix::Identity(w.size(), w.size())};
  }

  const Window& window() const { return window_; }
  const DenseMatrix& dense() const { return a_; }
  std::size_t size() const { return window_.size(); }

  cplx operator()(std::size_t p, std::size_t q) const { return a_(p, q); }
  cplx at(std::span<const int> i, std::span<const int> j) const {
    return a_(window_.position(i), window_.position(j));
  }
  void set(std::span<const int> i, std::span<const int> j, cplx value) {
    a_(window_.position(i), window_.position(j)) = value;
  }
  void set(std::size_t p, std::size_t q, cplx value) { a_(p, q) = value; }

  struct Entry {
    std::size_t row;
    std::size_t col;
    cplx value;
  };
  /// Nonzero entries in lexicographic (row, column) order.
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    for (Eigen::Index p = 0; p < a_.rows(); ++p)
      for (Eigen::Index q = 0; q < a_.cols(); ++q)
        if (a_(p, q) != cplx(0.0, 0.0)) out.push_back({std::size_t(p), std::size_t(q), a_(p, q)});
    return out;
  }

  double max_abs() const { return a_.size() ? a_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  Window window_;
  DenseMatrix a_;
};

/// Sequence c(i), i in a window.
class LatticeSequence {
 public:
  LatticeSequence() = default;
  explicit LatticeSequence(const Window& w) : window_(w), c_(DenseVector::Zero(w.size())) {}
  LatticeSequence(const Window& w, DenseVector c) : window_(w), c_(std::move(c)) {
    if (static_cast<std::size_t>(c_.size()) != w.size())
      throw ValidationError("sequence length does not match window size");
  }

  static LatticeSequence delta(const Window& w, std::span<const int> at) {
    LatticeSequence s(w);
    s.c_(w.position(at)) = 1.0;
    return s;
  }

  const Window& window() const { return window_; }
  const DenseVector& values() const { return c_; }
  std::size_t size() const { return window_.size(); }
  cplx operator()(std::size_t p) const { return c_(p); }
  void set(std::size_t p, cplx v) { c_(p) = v; }

 private:
  Window window_;
  DenseVector c_;
};

/// Radial envelope h(0) >= h(1) >= ... >= h(M).
struct DecayProfile {
  std::vector<double> h;
  int d = 1;

  bool nonincreasing() const {
    for (std::size_t n = 1; n < h.size(); ++n)
      if (h[n] > h[n - 1]) return false;
    return true;
  }
  double operator[](std::size_t n) const { return n < h.size() ? h[n] : 0.0; }
  std::size_t size() const { return h.size(); }
};

/// Fourier coefficients a(n) of a Toeplitz symbol, finitely supported.
struct SymbolCoeffs {
  int d = 1;
  std::map<Index, cplx> coeffs;

  cplx operator()(const Index& n) const {
    auto it = coeffs.find(n);
    return it == coeffs.end() ? cplx(0.0, 0.0) : it->second;
  }
  /// max |n|_inf over the support.
  int support_radius() const {
    int r = 0;
    for (const auto& [n, v] : coeffs)
      for (int x : n) r = std::max(r, std::abs(x));
    return r;
  }
};

inline void require_same_window(const Window& a, const Window& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": window mismatch");
}

// --- algebra ---------------------------------------------------------------

inline LocalizedMatrix adjoint(const LocalizedMatrix& A) {
  return {A.window(), A.dense().adjoint()};
}

inline LocalizedMatrix add(const LocalizedMatrix& A, const LocalizedMatrix& B) {
  require_same_window(A.window(), B.window(), "add");
  return {A.window(), A.dense() + B.dense()};
}

inline LocalizedMatrix subtract(const LocalizedMatrix& A, const LocalizedMatrix& B) {
  require_same_window(A.window(), B.window(), "subtract");
  return {A.window(), A.dense() - B.dense()};
}

inline LocalizedMatrix scale(cplx alpha, const LocalizedMatrix& A) {
  return {A.window(), alpha * A.dense()};
}

inline LocalizedMatrix multiply(const LocalizedMatrix& A, const LocalizedMatrix& B) {
  require_same_window(A.window(), B.window(), "multiply");
  DenseMatrix c = A.dense() * B.dense();
  return {A.window(), std::move(c)};
}

inline LatticeSequence apply(const LocalizedMatrix& A, const LatticeSequence& c) {
  require_same_window(A.window(), c.window(), "apply");
  DenseVector out = A.dense() * c.values();
  return {A.window(), std::move(out)};
}

inline LocalizedMatrix power(const LocalizedMatrix& A, int n) {
  if (n < 0) throw ValidationError("negative matrix power");
  DenseMatrix result = DenseMatrix::Identity(A.size(), A.size());
  DenseMatrix base = A.dense();
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return {A.window(), std::move(result)};
}

/// Zero-extension of A to a window at least as large.
inline LocalizedMatrix embed(const LocalizedMatrix& A, const Window& larger) {
  const Window& w = A.window();
  if (larger.dim() != w.dim() || larger.radius() < w.radius())
    throw ValidationError("embed: target window must contain the source window");
  std::vector<std::size_t> map(w.size());
  for (std::size_t p = 0; p < w.size(); ++p) map[p] = larger.position(w.index(p));
  LocalizedMatrix out(larger);
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q)
      if (A(p, q) != cplx(0.0, 0.0)) out.set(map[p], map[q], A(p, q));
  return out;
}

inline LatticeSequence embed(const LatticeSequence& c, const Window& larger) {
  const Window& w = c.window();
  if (larger.dim() != w.dim() || larger.radius() < w.radius())
    throw ValidationError("embed: target window must contain the source window");
  LatticeSequence out(larger);
  for (std::size_t p = 0; p < w.size(); ++p) out.set(larger.position(w.index(p)), c(p));
  return out;
}

// --- decay envelopes -------------------------------------------------------

/// Ring maxima R(m) = max{ f(p,q,m) : |i-j|_inf == m } for m = 0..2R, then
/// converted in place to suffix maxima h(m) = max_{m' >= m} R(m').
template <class EntryFn>
DecayProfile ring_suprema(const Window& w, EntryFn&& f) {
  const std::size_t n = w.size();
  const auto dist = distance_table(w);
  DecayProfile prof;
  prof.d = w.dim();
  prof.h.assign(static_cast<std::size_t>(w.diameter()) + 1, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const int m = dist[p * n + q];
      const double v = f(p, q, m);
      auto& slot = prof.h[m];
      if (v > slot) slot = v;
    }
  for (std::size_t m = prof.h.size() - 1; m-- > 0;) prof.h[m] = std::max(prof.h[m], prof.h[m + 1]);
  return prof;
}

/// Unweighted envelope h(m) = sup_{|i-j|_inf >= m} |a(i,j)|.
inline DecayProfile decay_profile(const LocalizedMatrix& A) {
  const auto& a = A.dense();
  return ring_suprema(A.window(), [&](std::size_t p, std::size_t q, int) { return std::abs(a(p, q)); });
}

/// sum_{k in Z^d} h(|k|_inf)^p, accumulated in ascending ring order.
inline double ring_power_sum(const DecayProfile& prof, double p) {
  double total = 0.0;
  for (std::size_t m = 0; m < prof.h.size(); ++m) {
    if (prof.h[m] == 0.0) continue;
    total += ring_size(static_cast<long>(m), prof.d) * std::pow(prof.h[m], p);
  }
  return total;
}

/// (sum_k h(|k|_inf)^p)^{1/p}, scaled by h(0) so that a lone diagonal is exact.
inline double ring_lp_norm(const DecayProfile& prof, double p) {
  const double top = prof[0];
  if (top == 0.0) return 0.0;
  if (std::isinf(p)) return top;
  double total = 0.0;
  for (std::size_t m = 0; m < prof.h.size(); ++m) {
    if (prof.h[m] == 0.0) continue;
    total += ring_size(static_cast<long>(m), prof.d) * std::pow(prof.h[m] / top, p);
  }
  return top * std::pow(total, 1.0 / p);
}

/// Largest |i-j|_inf carrying an entry above rel_tol * max|a|.
inline int effective_bandwidth(const LocalizedMatrix& A, double rel_tol = 1e-12) {
  const double cut = rel_tol * A.max_abs();
  const auto prof = decay_profile(A);
  int bw = 0;
  for (std::size_t m = 0; m < prof.h.size(); ++m)
    if (prof.h[m] > cut) bw = static_cast<int>(m);
  return bw;
}

/// Max-entry distance between two matrices on the same window.
inline double max_entry_diff(const LocalizedMatrix& A, const LocalizedMatrix& B) {
  require_same_window(A.window(), B.window(), "max_entry_diff");
  return (A.dense() - B.dense()).cwiseAbs().maxCoeff();
}

}  // namespace wiener
