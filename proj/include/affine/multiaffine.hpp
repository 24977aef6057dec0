#pragma once

// Multi-affine polynomials f(x) = sum_J a_J prod_{j in J} x_j, function
// oracles over R^n, finite-difference coefficient extraction on the unit
// hypercube, and affinity checks of a function along a single line.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "affine/errors.hpp"
#include "affine/ring.hpp"

namespace affine {

/// Subset of {1..n} as a bitmask; bit j-1 stands for variable x_j.
using Mask = std::uint32_t;
inline constexpr int kMaxArity = 16;
// Largest |R|^n that is ever materialised as a table.
inline constexpr std::uint64_t kMaxTableSize = std::uint64_t{1} << 22;

inline int popcount(Mask m) { return std::popcount(m); }

/// 1-based variable indices of a mask, ascending.
inline std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int j = 0; m != 0; ++j, m >>= 1) {
    if (m & 1u) out.push_back(j + 1);
  }
  return out;
}

inline Mask mask_from_indices(const std::vector<int>& idx, int arity) {
  Mask m = 0;
  for (int j : idx) {
    if (j < 1 || j > arity) throw PreconditionError("variable index " + std::to_string(j) + " out of range");
    if (m & (Mask{1} << (j - 1))) throw PreconditionError("repeated variable index " + std::to_string(j));
    m |= Mask{1} << (j - 1);
  }
  return m;
}

inline std::string mask_to_string(Mask m) {
  std::string out = "{";
  bool first = true;
  for (int j : mask_indices(m)) {
    if (!first) out += ",";
    out += std::to_string(j);
    first = false;
  }
  return out + "}";
}

/// All k-subsets of {1..n}, lexicographic in their sorted index lists.
inline std::vector<Mask> masks_of_size(int n, int k) {
  std::vector<Mask> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Mask m = 0;
    for (int i : idx) m |= Mask{1} << i;
    out.push_back(m);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

inline void check_arity(int n) {
  if (n < 1 || n > kMaxArity) throw PreconditionError("arity must be in [1, 16]");
}

template <Ring R>
using Point = std::vector<Elem<R>>;

template <Ring R>
Point<R> zero_point(const R& ring, int n) {
  return Point<R>(n, ring.zero());
}

template <Ring R>
Point<R> unit_vector(const R& ring, int n, int i) {
  Point<R> e(n, ring.zero());
  e[i] = ring.one();
  return e;
}

template <Ring R>
bool is_zero_point(const R& ring, const Point<R>& p) {
  return std::all_of(p.begin(), p.end(), [&](const auto& x) { return ring.is_zero(x); });
}

template <Ring R>
std::string point_to_string(const R& ring, const Point<R>& p, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += sep;
    out += ring.to_string(p[i]);
  }
  return out;
}

/// The affine line base + R * dir, dir != 0.
template <Ring R>
class Line {
 public:
  Line(const R& ring, Point<R> base, Point<R> dir) : base_(std::move(base)), dir_(std::move(dir)) {
    if (base_.size() != dir_.size()) throw PreconditionError("line base and direction differ in arity");
    if (is_zero_point(ring, dir_)) throw PreconditionError("line direction must be nonzero");
  }

  const Point<R>& base() const { return base_; }
  const Point<R>& dir() const { return dir_; }
  int arity() const { return static_cast<int>(base_.size()); }

  Point<R> at(const R& ring, const Elem<R>& r) const {
    Point<R> p(base_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = ring.add(base_[i], ring.mul(r, dir_[i]));
    return p;
  }

 private:
  Point<R> base_;
  Point<R> dir_;
};

/// Sparse multi-affine polynomial: only nonzero coefficients are stored.
template <Ring R>
class MultiAffinePoly {
 public:
  MultiAffinePoly(R ring, int arity) : ring_(std::move(ring)), arity_(arity) { check_arity(arity); }

  const R& ring() const { return ring_; }
  int arity() const { return arity_; }
  const std::map<Mask, Elem<R>>& coeffs() const { return coeffs_; }

  Elem<R> coeff(Mask m) const {
    auto it = coeffs_.find(m);
    return it == coeffs_.end() ? ring_.zero() : it->second;
  }

  void set(Mask m, const Elem<R>& v) {
    check_mask(m);
    if (ring_.is_zero(v)) {
      coeffs_.erase(m);
    } else {
      coeffs_[m] = v;
    }
  }

  void add_to(Mask m, const Elem<R>& v) { set(m, ring_.add(coeff(m), v)); }

  bool is_zero() const { return coeffs_.empty(); }

  /// Largest |J| with a_J != 0, or -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [m, v] : coeffs_) d = std::max(d, popcount(m));
    return d;
  }

  /// Terms ordered by |J|, then lexicographically.
  std::vector<std::pair<Mask, Elem<R>>> graded_terms() const {
    std::vector<std::pair<Mask, Elem<R>>> out;
    for (int k = 0; k <= arity_; ++k) {
      for (Mask m : masks_of_size(arity_, k)) {
        auto it = coeffs_.find(m);
        if (it != coeffs_.end()) out.emplace_back(m, it->second);
      }
    }
    return out;
  }

  bool operator==(const MultiAffinePoly& o) const {
    return ring_ == o.ring_ && arity_ == o.arity_ && coeffs_ == o.coeffs_;
  }

 private:
  void check_mask(Mask m) const {
    if (arity_ < 32 && (m >> arity_) != 0) throw PreconditionError("mask " + mask_to_string(m) + " exceeds arity");
  }

  R ring_;
  int arity_;
  std::map<Mask, Elem<R>> coeffs_;
};

/// c0 + sum_i linear[i] x_{i+1}.
template <Ring R>
MultiAffinePoly<R> affine_poly(const R& ring, const Elem<R>& c0, const std::vector<Elem<R>>& linear) {
  MultiAffinePoly<R> p(ring, static_cast<int>(linear.size()));
  p.set(0, c0);
  for (std::size_t i = 0; i < linear.size(); ++i) p.set(Mask{1} << i, linear[i]);
  return p;
}

template <Ring R>
std::string poly_to_string(const MultiAffinePoly<R>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, v] : p.graded_terms()) {
    if (!out.empty()) out += " ";
    out += p.ring().to_string(v) + ":" + mask_to_string(m);
  }
  return out;
}

template <Ring R>
Elem<R> evaluate(const MultiAffinePoly<R>& p, const Point<R>& x) {
  if (static_cast<int>(x.size()) != p.arity()) throw PreconditionError("evaluate: point arity mismatch");
  const R& ring = p.ring();
  Elem<R> acc = ring.zero();
  for (const auto& [m, a] : p.coeffs()) {
    Elem<R> term = a;
    for (Mask rest = m; rest != 0 && !ring.is_zero(term); rest &= rest - 1) {
      term = ring.mul(term, x[std::countr_zero(rest)]);
    }
    acc = ring.add(acc, term);
  }
  return acc;
}

/// is_affine_poly: every stored mask has at most one variable.
template <Ring R>
bool is_affine_poly(const MultiAffinePoly<R>& p) {
  return std::all_of(p.coeffs().begin(), p.coeffs().end(), [](const auto& kv) { return popcount(kv.first) <= 1; });
}

// ---------------------------------------------------------------------------
// Points of a finite ring as table indices. x_1 is the most significant
// digit, so index order is lexicographic order of points.

template <FiniteRing R>
std::uint64_t table_size(const R& ring, int n) {
  std::uint64_t size = 1;
  for (int i = 0; i < n; ++i) {
    if (size > kMaxTableSize / ring.size()) {
      throw PreconditionError("domain " + ring.describe() + "^" + std::to_string(n) + " too large for a table");
    }
    size *= ring.size();
  }
  return size;
}

template <FiniteRing R>
std::uint64_t point_index(const R& ring, const Point<R>& x) {
  std::uint64_t idx = 0;
  for (const auto& v : x) idx = idx * ring.size() + ring.index(v);
  return idx;
}

template <FiniteRing R>
Point<R> point_from_index(const R& ring, int n, std::uint64_t idx) {
  Point<R> x(n);
  for (int i = n - 1; i >= 0; --i) {
    x[i] = ring.element(idx % ring.size());
    idx /= ring.size();
  }
  return x;
}

/// Values of p at every point of R^n in index order, expanding one variable
/// at a time: O(|R|^n) ring operations instead of O(|R|^n * 2^n).
template <FiniteRing R>
std::vector<Elem<R>> tabulate(const MultiAffinePoly<R>& p) {
  const R& ring = p.ring();
  const int n = p.arity();
  const std::uint64_t q = ring.size();
  table_size(ring, n);
  std::vector<Elem<R>> cur(std::size_t{1} << n, ring.zero());
  for (const auto& [m, v] : p.coeffs()) cur[m] = v;
  std::uint64_t prefixes = 1;
  std::uint64_t width = std::uint64_t{1} << n;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t half = width / 2;
    std::vector<Elem<R>> next(prefixes * q * half, ring.zero());
    for (std::uint64_t pre = 0; pre < prefixes; ++pre) {
      for (std::uint64_t rest = 0; rest < half; ++rest) {
        const Elem<R>& c0 = cur[pre * width + 2 * rest];
        const Elem<R>& c1 = cur[pre * width + 2 * rest + 1];
        for (std::uint64_t xi = 0; xi < q; ++xi) {
          next[(pre * q + xi) * half + rest] = ring.add(c0, ring.mul(c1, ring.element(xi)));
        }
      }
    }
    cur = std::move(next);
    prefixes *= q;
    width = half;
  }
  return cur;
}

/// A map f : R^n -> R, either an exhaustive table (finite rings) or a
/// multi-affine polynomial evaluated exactly (required for Q).
template <Ring R>
class FunctionOracle {
 public:
  static FunctionOracle from_poly(MultiAffinePoly<R> p) {
    FunctionOracle f(p.ring(), p.arity());
    f.body_ = std::move(p);
    return f;
  }

  /// `values[point_index(x)] = f(x)`.
  static FunctionOracle from_table(const R& ring, int arity, std::vector<Elem<R>> values) {
    check_arity(arity);
    if constexpr (FiniteRing<R>) {
      if (values.size() != table_size(ring, arity)) {
        throw PreconditionError("table has " + std::to_string(values.size()) + " entries, expected " +
                                std::to_string(table_size(ring, arity)));
      }
      FunctionOracle f(ring, arity);
      f.body_ = std::move(values);
      return f;
    } else {
      throw Unsupported("table oracles need a finite ring; use a polynomial over " + ring.describe());
    }
  }

  const R& ring() const { return ring_; }
  int arity() const { return arity_; }
  bool is_table() const { return std::holds_alternative<std::vector<Elem<R>>>(body_); }
  const MultiAffinePoly<R>* poly() const { return std::get_if<MultiAffinePoly<R>>(&body_); }
  const std::vector<Elem<R>>* table() const { return std::get_if<std::vector<Elem<R>>>(&body_); }

  Elem<R> operator()(const Point<R>& x) const {
    if (static_cast<int>(x.size()) != arity_) throw PreconditionError("oracle: point arity mismatch");
    if (const auto* p = poly()) return evaluate(*p, x);
    if constexpr (FiniteRing<R>) {
      return (*table())[point_index(ring_, x)];
    } else {
      throw Unsupported("table oracle over an infinite ring");
    }
  }

  bool operator==(const FunctionOracle& o) const {
    return ring_ == o.ring_ && arity_ == o.arity_ && body_ == o.body_;
  }

  /// Same function as an exhaustive table.
  FunctionOracle tabulated() const {
    if constexpr (FiniteRing<R>) {
      if (is_table()) return *this;
      return from_table(ring_, arity_, tabulate(*poly()));
    } else {
      throw Unsupported("cannot tabulate over " + ring_.describe());
    }
  }

 private:
  FunctionOracle(R ring, int arity) : ring_(std::move(ring)), arity_(arity), body_(std::vector<Elem<R>>{}) {}

  R ring_;
  int arity_;
  std::variant<std::vector<Elem<R>>, MultiAffinePoly<R>> body_;
};

// ---------------------------------------------------------------------------
// Finite-difference extraction.

/// Psi_J^{(m0)} = sum_{K subset J} (-1)^{|J|-|K|} f(m0 + sum_{k in K} e_k) for
/// every J, returned as the polynomial in the shifted coordinates x - m0.
template <Ring R>
MultiAffinePoly<R> psi_extract(const FunctionOracle<R>& f, const Point<R>& m0, int n) {
  if (n != f.arity() || static_cast<int>(m0.size()) != n) throw PreconditionError("psi_extract: arity mismatch");
  const R& ring = f.ring();
  const std::size_t size = std::size_t{1} << n;
  std::vector<Elem<R>> vals(size);
  Point<R> x = m0;
  for (Mask K = 0; K < size; ++K) {
    for (int j = 0; j < n; ++j) x[j] = (K >> j) & 1u ? ring.add(m0[j], ring.one()) : m0[j];
    vals[K] = f(x);
  }
  // In-place subset-difference (Moebius) transform.
  for (int j = 0; j < n; ++j) {
    const Mask bit = Mask{1} << j;
    for (Mask m = 0; m < size; ++m) {
      if (m & bit) vals[m] = ring.sub(vals[m], vals[m ^ bit]);
    }
  }
  MultiAffinePoly<R> out(ring, n);
  for (Mask m = 0; m < size; ++m) out.set(m, vals[m]);
  return out;
}

// ---------------------------------------------------------------------------
// Restrictions to lines.

/// Coefficients (b_0..b_n) of r -> p(base + r dir).
template <Ring R>
std::vector<Elem<R>> restrict_line(const MultiAffinePoly<R>& p, const Line<R>& line) {
  if (line.arity() != p.arity()) throw PreconditionError("restrict_line: arity mismatch");
  const R& ring = p.ring();
  std::vector<Elem<R>> out(p.arity() + 1, ring.zero());
  for (const auto& [m, a] : p.coeffs()) {
    std::vector<Elem<R>> term{a};
    for (int j : mask_indices(m)) {
      std::vector<Elem<R>> next(term.size() + 1, ring.zero());
      for (std::size_t d = 0; d < term.size(); ++d) {
        next[d] = ring.add(next[d], ring.mul(term[d], line.base()[j - 1]));
        next[d + 1] = ring.add(next[d + 1], ring.mul(term[d], line.dir()[j - 1]));
      }
      term = std::move(next);
    }
    for (std::size_t d = 0; d < term.size(); ++d) out[d] = ring.add(out[d], term[d]);
  }
  return out;
}

/// b_k = sum_{|J|=k} a_J prod_{j in J} v_j, so that p(r v) = sum_k b_k r^k.
template <Ring R>
std::vector<Elem<R>> restrict_radial(const MultiAffinePoly<R>& p, const Point<R>& v) {
  if (static_cast<int>(v.size()) != p.arity()) throw PreconditionError("restrict_radial: arity mismatch");
  const R& ring = p.ring();
  std::vector<Elem<R>> b(p.arity() + 1, ring.zero());
  for (const auto& [m, a] : p.coeffs()) {
    Elem<R> term = a;
    for (Mask rest = m; rest != 0; rest &= rest - 1) term = ring.mul(term, v[std::countr_zero(rest)]);
    b[popcount(m)] = ring.add(b[popcount(m)], term);
  }
  return b;
}

template <Ring R>
Elem<R> eval_univariate(const R& ring, const std::vector<Elem<R>>& coeffs, const Elem<R>& r) {
  Elem<R> acc = ring.zero();
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = ring.add(ring.mul(acc, r), *it);
  return acc;
}

// ---------------------------------------------------------------------------
// Affinity along one line.

template <Ring R>
struct AffineAlongLine {
  Elem<R> slope;
};

/// g(r) = f(base + r dir) violates g(r) = g(r1) + (g(r2) - g(r1)) r at r = r3,
/// with (r1, r2) = (0, 1) and r3 the first failing parameter.
template <Ring R>
struct LineWitness {
  Elem<R> r1, r2, r3;
};

template <Ring R>
using LineCheck = std::variant<AffineAlongLine<R>, LineWitness<R>>;

template <Ring R>
bool passes(const LineCheck<R>& c) {
  return std::holds_alternative<AffineAlongLine<R>>(c);
}

namespace detail {

template <Ring R>
LineCheck<R> symbolic_line_check(const R& ring, const std::vector<Elem<R>>& g) {
  bool affine = true;
  for (std::size_t d = 2; d < g.size(); ++d) affine = affine && ring.is_zero(g[d]);
  const Elem<R> g0 = g[0];
  const Elem<R> slope = ring.sub(eval_univariate(ring, g, ring.one()), g0);
  if (affine) return AffineAlongLine<R>{slope};
  // A nonzero polynomial of degree d vanishing at 0 and 1 has at most d - 2
  // further roots, so one of r = 2..d+1 refutes.
  for (long long r = 2;; ++r) {
    const Elem<R> x = ring.from_int(r);
    if (eval_univariate(ring, g, x) != ring.add(g0, ring.mul(slope, x))) {
      return LineWitness<R>{ring.zero(), ring.one(), x};
    }
  }
}

}  // namespace detail

/// Exhaustive over r for finite rings; symbolic restriction over Q.
template <Ring R>
LineCheck<R> line_affine_check(const FunctionOracle<R>& f, const Line<R>& line) {
  if (line.arity() != f.arity()) throw PreconditionError("line_affine_check: arity mismatch");
  const R& ring = f.ring();
  if constexpr (FiniteRing<R>) {
    const Elem<R> g0 = f(line.base());
    const Elem<R> slope = ring.sub(f(line.at(ring, ring.one())), g0);
    for (std::uint64_t i = 0; i < ring.size(); ++i) {
      const Elem<R> r = ring.element(i);
      if (f(line.at(ring, r)) != ring.add(g0, ring.mul(slope, r))) {
        return LineWitness<R>{ring.zero(), ring.one(), r};
      }
    }
    return AffineAlongLine<R>{slope};
  } else {
    const auto* p = f.poly();
    if (p == nullptr) throw Unsupported("line checks over " + ring.describe() + " need a polynomial oracle");
    return detail::symbolic_line_check(ring, restrict_line(*p, line));
  }
}

}  // namespace affine
