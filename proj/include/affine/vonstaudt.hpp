#pragma once

// Maps F_q^d -> F_q^e that send affine lines onto affine lines and keep every
// point off the image of lines that miss it are tau-affine: f(v) = b +
// sum_i tau(v_i) g(e_i) for a field automorphism tau. Everything here is
// exhaustive over small finite fields.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "affine/errors.hpp"
#include "affine/multiaffine.hpp"
#include "affine/ring.hpp"

namespace affine {

inline constexpr std::uint64_t kMaxVonStaudtField = 9;
inline constexpr int kMaxVonStaudtDimProduct = 6;
inline constexpr std::uint64_t kMaxLineDomain = 10000;

template <FiniteRing F>
std::uint64_t checked_power(const F& field, int d, std::uint64_t cap) {
  std::uint64_t size = 1;
  for (int i = 0; i < d; ++i) {
    size *= field.size();
    if (size > cap) throw PreconditionError(field.describe() + "^" + std::to_string(d) + " is too large");
  }
  return size;
}

/// Exhaustive f : F^d -> F^e, with the value at point_index(x) stored at
/// [point_index(x) * e, point_index(x) * e + e).
template <FiniteRing F>
class VectorMapTable {
 public:
  VectorMapTable(F field, int d, int e, std::vector<Elem<F>> values)
      : field_(std::move(field)), d_(d), e_(e), values_(std::move(values)) {
    if (!field_.is_field()) throw PreconditionError(field_.describe() + " is not a field");
    if (field_.size() <= 2) throw PreconditionError("vector maps over F_2 are excluded: the line argument needs a third scalar");
    if (field_.size() > kMaxVonStaudtField) throw PreconditionError("field order exceeds 9");
    if (d < 2) throw PreconditionError("domain dimension must be >= 2");
    if (e < 1) throw PreconditionError("codomain dimension must be >= 1");
    if (d * e > kMaxVonStaudtDimProduct) throw PreconditionError("d * e exceeds 6");
    domain_size_ = checked_power(field_, d_, kMaxLineDomain);
    if (values_.size() != domain_size_ * static_cast<std::uint64_t>(e_)) {
      throw PreconditionError("vector map table has the wrong number of entries");
    }
  }

  static VectorMapTable from_function(const F& field, int d, int e, const std::function<Point<F>(const Point<F>&)>& fn) {
    const std::uint64_t size = checked_power(field, d, kMaxLineDomain);
    std::vector<Elem<F>> values;
    values.reserve(size * e);
    for (std::uint64_t i = 0; i < size; ++i) {
      const Point<F> y = fn(point_from_index(field, d, i));
      if (static_cast<int>(y.size()) != e) throw PreconditionError("map returned a vector of the wrong dimension");
      values.insert(values.end(), y.begin(), y.end());
    }
    return VectorMapTable(field, d, e, std::move(values));
  }

  const F& field() const { return field_; }
  int domain_dim() const { return d_; }
  int codomain_dim() const { return e_; }
  std::uint64_t domain_size() const { return domain_size_; }
  const std::vector<Elem<F>>& values() const { return values_; }

  Point<F> at_index(std::uint64_t i) const {
    return Point<F>(values_.begin() + static_cast<std::ptrdiff_t>(i * e_),
                    values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * e_));
  }

  Point<F> operator()(const Point<F>& x) const {
    if (static_cast<int>(x.size()) != d_) throw PreconditionError("vector map: point arity mismatch");
    return at_index(point_index(field_, x));
  }

  bool operator==(const VectorMapTable&) const = default;

 private:
  F field_;
  int d_;
  int e_;
  std::vector<Elem<F>> values_;
  std::uint64_t domain_size_ = 0;
};

/// Every affine line of F^d once: directions normalised so their first
/// nonzero coordinate is 1, bases the lexicographically least point of the
/// line (that coordinate 0). Ordered by base, then direction.
template <FiniteRing F>
std::vector<Line<F>> enumerate_affine_lines(const F& field, int d) {
  if (!field.is_field()) throw PreconditionError("enumerate_affine_lines needs a field");
  if (d < 1) throw PreconditionError("dimension must be >= 1");
  const std::uint64_t size = checked_power(field, d, kMaxLineDomain);
  std::vector<std::pair<int, Point<F>>> dirs;  // (lead coordinate, direction)
  for (std::uint64_t i = 1; i < size; ++i) {
    Point<F> v = point_from_index(field, d, i);
    int lead = 0;
    while (field.is_zero(v[lead])) ++lead;
    if (v[lead] == field.one()) dirs.emplace_back(lead, std::move(v));
  }
  std::vector<Line<F>> lines;
  for (std::uint64_t i = 0; i < size; ++i) {
    const Point<F> base = point_from_index(field, d, i);
    for (const auto& [lead, dir] : dirs) {
      if (field.is_zero(base[lead])) lines.emplace_back(field, base, dir);
    }
  }
  return lines;
}

enum class ViolationKind { kImageNotLine, kNotSeparated };

template <FiniteRing F>
struct HypothesisFailure {
  ViolationKind kind;
  Line<F> line;
  std::optional<Point<F>> point;  // the separated point, for kNotSeparated
  std::uint64_t image_size = 0;
};

struct HypothesesOk {};

template <FiniteRing F>
using HypothesisCheck = std::variant<HypothesesOk, HypothesisFailure<F>>;

/// (a) f maps every affine line onto an affine line; (b) f(v) is not in f(l)
/// for any line l and any v off l. Returns the first failure in line order.
template <FiniteRing F>
HypothesisCheck<F> check_hypotheses(const VectorMapTable<F>& f) {
  const F& field = f.field();
  const int d = f.domain_dim();
  const int e = f.codomain_dim();
  const std::uint64_t q = field.size();
  std::uint64_t codomain_size = 1;
  for (int i = 0; i < e; ++i) codomain_size *= q;

  std::vector<std::uint64_t> image(f.domain_size());
  for (std::uint64_t i = 0; i < f.domain_size(); ++i) image[i] = point_index(field, f.at_index(i));

  std::vector<char> marked(codomain_size, 0);
  std::vector<char> on_line(f.domain_size(), 0);
  for (const auto& line : enumerate_affine_lines(field, d)) {
    std::vector<std::uint64_t> pts, imgs;
    for (std::uint64_t x = 0; x < q; ++x) {
      pts.push_back(point_index(field, line.at(field, field.element(x))));
      imgs.push_back(image[pts.back()]);
    }
    std::vector<std::uint64_t> distinct = imgs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() != q) return HypothesisFailure<F>{ViolationKind::kImageNotLine, line, std::nullopt, distinct.size()};

    // The only line through f(base) and f(base + dir) is
    // { y0 + lambda (y1 - y0) }; the image must be exactly that set.
    const Point<F> y0 = f.at_index(pts[0]);
    const Point<F> y1 = f.at_index(pts[1]);
    std::vector<std::uint64_t> span;
    for (std::uint64_t x = 0; x < q; ++x) {
      const Elem<F> lambda = field.element(x);
      Point<F> y(e);
      for (int c = 0; c < e; ++c) y[c] = field.add(y0[c], field.mul(lambda, field.sub(y1[c], y0[c])));
      span.push_back(point_index(field, y));
    }
    std::sort(span.begin(), span.end());
    if (span != distinct) return HypothesisFailure<F>{ViolationKind::kImageNotLine, line, std::nullopt, distinct.size()};

    for (auto y : imgs) marked[y] = 1;
    for (auto p : pts) on_line[p] = 1;
    std::optional<std::uint64_t> offender;
    for (std::uint64_t v = 0; v < f.domain_size() && !offender; ++v) {
      if (!on_line[v] && marked[image[v]]) offender = v;
    }
    for (auto y : imgs) marked[y] = 0;
    for (auto p : pts) on_line[p] = 0;
    if (offender) {
      return HypothesisFailure<F>{ViolationKind::kNotSeparated, line, point_from_index(field, d, *offender), q};
    }
  }
  return HypothesesOk{};
}

enum class AutomorphismDefect { kNotBijective, kNotAdditive, kNotMultiplicative, kNotFrobenius };

template <FiniteRing F>
struct NotAutomorphism {
  AutomorphismDefect defect;
  Elem<F> x;
  Elem<F> y;
};

struct FrobeniusPower {
  std::uint64_t j = 0;
};

template <FiniteRing F>
using AutomorphismId = std::variant<FrobeniusPower, NotAutomorphism<F>>;

/// tau given by its values on element indices 0..q-1. Returns the Frobenius
/// power j with tau(x) = x^(p^j), or the first pair breaking bijectivity,
/// additivity or multiplicativity.
template <FiniteRing F>
AutomorphismId<F> identify_automorphism(const F& field, const std::vector<Elem<F>>& tau) {
  const std::uint64_t q = field.size();
  if (tau.size() != q) throw PreconditionError("automorphism table must cover the field");
  auto t = [&](const Elem<F>& x) { return tau[field.index(x)]; };
  for (std::uint64_t a = 0; a < q; ++a) {
    for (std::uint64_t b = a + 1; b < q; ++b) {
      if (tau[a] == tau[b]) return NotAutomorphism<F>{AutomorphismDefect::kNotBijective, field.element(a), field.element(b)};
    }
  }
  for (std::uint64_t a = 0; a < q; ++a) {
    for (std::uint64_t b = a; b < q; ++b) {
      const Elem<F> x = field.element(a), y = field.element(b);
      if (t(field.add(x, y)) != field.add(t(x), t(y))) return NotAutomorphism<F>{AutomorphismDefect::kNotAdditive, x, y};
    }
  }
  for (std::uint64_t a = 0; a < q; ++a) {
    for (std::uint64_t b = a; b < q; ++b) {
      const Elem<F> x = field.element(a), y = field.element(b);
      if (t(field.mul(x, y)) != field.mul(t(x), t(y))) {
        return NotAutomorphism<F>{AutomorphismDefect::kNotMultiplicative, x, y};
      }
    }
  }
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(field.extension_degree()); ++j) {
    bool match = true;
    for (std::uint64_t a = 0; a < q && match; ++a) match = tau[a] == field.frobenius(field.element(a), j);
    if (match) return FrobeniusPower{j};
  }
  return NotAutomorphism<F>{AutomorphismDefect::kNotFrobenius, field.zero(), field.one()};
}

template <FiniteRing F>
struct SemilinearCert {
  std::uint64_t tau_power = 0;
  std::vector<Point<F>> basis_images;  // g(e_i) = f(e_i) - f(0)
  Point<F> offset;                     // f(0)
};

template <FiniteRing F>
Point<F> apply_semilinear(const F& field, const SemilinearCert<F>& cert, const Point<F>& v) {
  Point<F> y = cert.offset;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Elem<F> s = field.frobenius(v[i], cert.tau_power);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] = field.add(y[c], field.mul(s, cert.basis_images[i][c]));
  }
  return y;
}

namespace detail {

// tau with g(lambda e_i) = tau(lambda) g(e_i), indexed by element index.
template <FiniteRing F>
std::vector<Elem<F>> scalar_table(const VectorMapTable<F>& f, const Point<F>& offset, int i) {
  const F& field = f.field();
  const int d = f.domain_dim();
  auto g = [&](const Point<F>& v) {
    Point<F> y = f(v);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] = field.sub(y[c], offset[c]);
    return y;
  };
  const Point<F> gi = g(unit_vector(field, d, i));
  std::size_t pivot = 0;
  while (pivot < gi.size() && field.is_zero(gi[pivot])) ++pivot;
  if (pivot == gi.size()) throw InconsistencyError("f(e_" + std::to_string(i + 1) + ") = f(0); f is not injective");
  const Elem<F> inv = ring_inverse(field, gi[pivot]);
  std::vector<Elem<F>> tau(field.size());
  for (std::uint64_t a = 0; a < field.size(); ++a) {
    Point<F> v(d, field.zero());
    v[i] = field.element(a);
    const Point<F> w = g(v);
    const Elem<F> mu = field.mul(w[pivot], inv);
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (w[c] != field.mul(mu, gi[c])) {
        throw InconsistencyError("g(lambda e_" + std::to_string(i + 1) + ") leaves the line through g(e_" +
                                 std::to_string(i + 1) + ")");
      }
    }
    tau[a] = mu;
  }
  return tau;
}

}  // namespace detail

/// Semilinear decomposition of a map satisfying check_hypotheses.
template <FiniteRing F>
SemilinearCert<F> recover_semilinear(const VectorMapTable<F>& f) {
  if (!std::holds_alternative<HypothesesOk>(check_hypotheses(f))) {
    throw PreconditionError("map fails the line hypotheses");
  }
  const F& field = f.field();
  const int d = f.domain_dim();
  SemilinearCert<F> cert;
  cert.offset = f(zero_point(field, d));

  const auto tau = detail::scalar_table(f, cert.offset, 0);
  const auto id = identify_automorphism(field, tau);
  if (const auto* bad = std::get_if<NotAutomorphism<F>>(&id)) {
    throw InconsistencyError("scalar map along e_1 is not a field automorphism at (" + field.to_string(bad->x) + ", " +
                             field.to_string(bad->y) + ")");
  }
  cert.tau_power = std::get<FrobeniusPower>(id).j;
  for (int i = 1; i < d; ++i) {
    if (detail::scalar_table(f, cert.offset, i) != tau) {
      throw InconsistencyError("scalar map along e_" + std::to_string(i + 1) + " differs from the one along e_1");
    }
  }
  for (int i = 0; i < d; ++i) {
    Point<F> y = f(unit_vector(field, d, i));
    for (std::size_t c = 0; c < y.size(); ++c) y[c] = field.sub(y[c], cert.offset[c]);
    cert.basis_images.push_back(std::move(y));
  }
  for (std::uint64_t i = 0; i < f.domain_size(); ++i) {
    const Point<F> v = point_from_index(field, d, i);
    if (apply_semilinear(field, cert, v) != f.at_index(i)) {
      throw InconsistencyError("semilinear form disagrees with the map at " + point_to_string(field, v));
    }
  }
  return cert;
}

}  // namespace affine
