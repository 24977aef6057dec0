#pragma once

// End-to-end recovery of global affine-linearity from line restrictions:
// coordinate lines give a multi-affine polynomial, radial lines give one
// linear constraint per direction and degree, and the per-degree systems are
// cancelled with the adjugate when their determinant is regular.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "affine/errors.hpp"
#include "affine/linalg.hpp"
#include "affine/multiaffine.hpp"
#include "affine/ring.hpp"

namespace affine {

enum class DirectionProvenance { kFamily, kMoment, kCustom };

template <Ring R>
struct DirectionSet {
  std::vector<Point<R>> dirs;
  DirectionProvenance provenance = DirectionProvenance::kCustom;
};

/// m_J = sum_{j in J} c_j^J e_j for every J with |J| >= 2, ordered by |J| then
/// lexicographically. `coeffs[J]` lists c_j^J for j in J ascending.
template <Ring R>
DirectionSet<R> family_directions(const R& ring, int n, const std::map<Mask, std::vector<Elem<R>>>& coeffs) {
  check_arity(n);
  DirectionSet<R> out;
  out.provenance = DirectionProvenance::kFamily;
  for (int k = 2; k <= n; ++k) {
    for (Mask J : masks_of_size(n, k)) {
      auto it = coeffs.find(J);
      if (it == coeffs.end()) throw PreconditionError("missing coefficients for J = " + mask_to_string(J));
      const auto idx = mask_indices(J);
      if (it->second.size() != idx.size()) {
        throw PreconditionError("J = " + mask_to_string(J) + " needs " + std::to_string(idx.size()) + " coefficients");
      }
      Point<R> m(n, ring.zero());
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (!ring.is_regular(it->second[t])) {
          throw PreconditionError("coefficient c_" + std::to_string(idx[t]) + " for J = " + mask_to_string(J) + " is " +
                                  ring.to_string(it->second[t]) + ", not a non-zerodivisor");
        }
        m[idx[t] - 1] = it->second[t];
      }
      out.dirs.push_back(std::move(m));
    }
  }
  return out;
}

/// Family with every c_j^J = 1.
template <Ring R>
DirectionSet<R> family_directions(const R& ring, int n) {
  std::map<Mask, std::vector<Elem<R>>> coeffs;
  for (int k = 2; k <= n; ++k) {
    for (Mask J : masks_of_size(n, k)) coeffs[J] = std::vector<Elem<R>>(k, ring.one());
  }
  return family_directions(ring, n, coeffs);
}

/// v_i = (s_1^{i-1}, ..., s_n^{i-1}) for 1 <= i <= count.
template <Ring R>
DirectionSet<R> moment_directions(const R& ring, const std::vector<Elem<R>>& S, int count) {
  if (count < 1) throw PreconditionError("moment_directions needs count >= 1");
  DirectionSet<R> out;
  out.provenance = DirectionProvenance::kMoment;
  Point<R> v(S.size(), ring.one());
  for (int i = 0; i < count; ++i) {
    out.dirs.push_back(v);
    for (std::size_t j = 0; j < S.size(); ++j) v[j] = ring.mul(v[j], S[j]);
  }
  return out;
}

/// Degree-k constraints sum_{|J|=k} a_J prod_{j in J} v_j = 0, one row per
/// direction; `observed` holds the left-hand side evaluated at the extracted
/// coefficients.
template <Ring R>
struct DegreeSystem {
  int k = 0;
  std::vector<Mask> masks;
  Matrix<Elem<R>> matrix;
  std::vector<Elem<R>> observed;
};

template <Ring R>
Elem<R> monomial(const R& ring, Mask J, const Point<R>& v) {
  Elem<R> acc = ring.one();
  for (Mask rest = J; rest != 0; rest &= rest - 1) acc = ring.mul(acc, v[std::countr_zero(rest)]);
  return acc;
}

template <Ring R>
Matrix<Elem<R>> constraint_matrix(const R& ring, int n, int k, const std::vector<Point<R>>& dirs) {
  const auto masks = masks_of_size(n, k);
  Matrix<Elem<R>> m(dirs.size(), masks.size(), ring.zero());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (static_cast<int>(dirs[i].size()) != n) throw PreconditionError("direction arity mismatch");
    for (std::size_t c = 0; c < masks.size(); ++c) m(i, c) = monomial(ring, masks[c], dirs[i]);
  }
  return m;
}

template <Ring R>
std::map<int, DegreeSystem<R>> build_degree_systems(const MultiAffinePoly<R>& psi, const DirectionSet<R>& dirs) {
  const R& ring = psi.ring();
  const int n = psi.arity();
  std::vector<std::vector<Elem<R>>> radial;
  for (const auto& v : dirs.dirs) radial.push_back(restrict_radial(psi, v));
  std::map<int, DegreeSystem<R>> out;
  for (int k = 2; k <= n; ++k) {
    DegreeSystem<R> sys;
    sys.k = k;
    sys.masks = masks_of_size(n, k);
    sys.matrix = constraint_matrix(ring, n, k, dirs.dirs);
    for (const auto& b : radial) sys.observed.push_back(b[k]);
    out.emplace(k, std::move(sys));
  }
  return out;
}

/// Rows (i, i^2, ..., i^d) for i = 1..d; determinant prod_{i<=d} i!.
template <Ring R>
Matrix<Elem<R>> power_vandermonde(const R& ring, int d) {
  Matrix<Elem<R>> a(d, d, ring.zero());
  for (int i = 1; i <= d; ++i) {
    const Elem<R> node = ring.from_int(i);
    Elem<R> p = node;
    for (int j = 0; j < d; ++j) {
      a(i - 1, j) = p;
      p = ring.mul(p, node);
    }
  }
  return a;
}

// Outcomes of A x = 0.
template <Ring R>
struct AllZero {
  // Regular (maximal) minor used for the cancellation; absent when the
  // system has no unknowns or was decided by rank over a field.
  std::optional<Elem<R>> det;
};

template <Ring R>
struct KernelBasis {
  std::vector<std::vector<Elem<R>>> basis;
  std::optional<Elem<R>> det;
};

template <Ring R>
struct CannotCancel {
  Elem<R> det;
};

template <Ring R>
using SolveResult = std::variant<AllZero<R>, KernelBasis<R>, CannotCancel<R>>;

inline constexpr std::size_t kMaxMinorSearch = 20000;

/// Square: det regular => AllZero (adj(A) A x = det(A) x = 0); otherwise a
/// kernel basis over a field, or CannotCancel(det) over a non-field.
/// Tall systems look for a regular maximal minor; wide ones never force zero.
template <Ring R>
SolveResult<R> solve_vandermonde_exact(const Matrix<Elem<R>>& a, const R& ring) {
  if (a.cols() == 0) return AllZero<R>{};
  if (a.square()) {
    const Elem<R> det = determinant(ring, a);
    if (ring.is_regular(det)) return AllZero<R>{det};
    if (ring.is_field()) return KernelBasis<R>{kernel_basis(ring, a), det};
    return CannotCancel<R>{det};
  }
  if (ring.is_field()) {
    if (a.rows() > a.cols() && rank(ring, a) == a.cols()) return AllZero<R>{};
    return KernelBasis<R>{kernel_basis(ring, a), std::nullopt};
  }
  if (a.rows() < a.cols()) return CannotCancel<R>{ring.zero()};

  std::vector<std::size_t> candidates;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    if (std::any_of(row.begin(), row.end(), [&](const auto& x) { return !ring.is_zero(x); })) candidates.push_back(r);
  }
  const std::size_t k = a.cols();
  if (candidates.size() < k) return CannotCancel<R>{ring.zero()};
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::optional<Elem<R>> first_det;
  for (std::size_t tried = 0; tried < kMaxMinorSearch; ++tried) {
    std::vector<std::size_t> rows(k);
    for (std::size_t i = 0; i < k; ++i) rows[i] = candidates[pick[i]];
    const Elem<R> det = determinant(ring, a.submatrix(rows));
    if (ring.is_regular(det)) return AllZero<R>{det};
    if (!first_det) first_det = det;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == candidates.size() - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return CannotCancel<R>{*first_det};
}

template <Ring R>
SolveResult<R> solve_vandermonde_exact(const DegreeSystem<R>& sys, const R& ring) {
  return solve_vandermonde_exact(sys.matrix, ring);
}

// ---------------------------------------------------------------------------
// Certificates.

template <Ring R>
struct AffineCertificate {
  Elem<R> c0;
  std::vector<Elem<R>> linear;  // c_i = f(e_i) - f(0)
};

template <Ring R>
struct LineFailure {
  Line<R> line;
  LineWitness<R> witness;
  bool radial = false;
};

/// a_J != 0 at degree k although every line hypothesis holds. `forced` is
/// true when the degree-k system alone already pins a_J to zero.
template <Ring R>
struct CoefficientWitness {
  int degree = 0;
  Mask mask = 0;
  Elem<R> value;
  bool forced = false;
};

template <Ring R>
struct NonAffineCertificate {
  std::variant<LineFailure<R>, CoefficientWitness<R>> witness;
};

template <Ring R>
struct CannotCancelCertificate {
  int degree = 0;
  Elem<R> det;
  std::optional<Point<R>> direction;  // set when the univariate step failed
};

struct HypothesisViolation {
  std::string description;
};

template <Ring R>
using Certificate =
    std::variant<AffineCertificate<R>, NonAffineCertificate<R>, CannotCancelCertificate<R>, HypothesisViolation>;

enum class ConstraintMode {
  // Radial lines checked at every r in R; cancellation only needed when the
  // restricted polynomial vanishes as a function but not coefficientwise.
  kExhaustive,
  // Radial lines checked only at r = 0, 1, ..., d and the resulting
  // evaluation system cancelled by its determinant prod i!.
  kProofNodes,
};

struct RecoverOptions {
  ConstraintMode mode = ConstraintMode::kExhaustive;
};

namespace detail {

template <FiniteRing R>
std::optional<LineFailure<R>> check_coordinate_lines(const R& ring, int n, const std::vector<Elem<R>>& table) {
  const std::uint64_t q = ring.size();
  std::uint64_t stride = table.size();
  for (int i = 0; i < n; ++i) {
    stride /= q;
    const std::uint64_t block = stride * q;
    for (std::uint64_t high = 0; high < table.size(); high += block) {
      for (std::uint64_t low = 0; low < stride; ++low) {
        const std::uint64_t base = high + low;
        const Elem<R>& g0 = table[base];
        const Elem<R> slope = ring.sub(table[base + stride], g0);
        for (std::uint64_t x = 2; x < q; ++x) {
          const Elem<R> r = ring.element(x);
          if (table[base + x * stride] != ring.add(g0, ring.mul(slope, r))) {
            Line<R> line(ring, point_from_index(ring, n, base), unit_vector(ring, n, i));
            return LineFailure<R>{line, LineWitness<R>{ring.zero(), ring.one(), r}, false};
          }
        }
      }
    }
  }
  return std::nullopt;
}

// Radial check at r = 1..d only.
template <Ring R>
LineCheck<R> node_line_check(const FunctionOracle<R>& f, const Line<R>& line, int d) {
  const R& ring = f.ring();
  const Elem<R> g0 = f(line.base());
  const Elem<R> slope = ring.sub(f(line.at(ring, ring.one())), g0);
  for (int i = 2; i <= d; ++i) {
    const Elem<R> r = ring.from_int(i);
    if (f(line.at(ring, r)) != ring.add(g0, ring.mul(slope, r))) return LineWitness<R>{ring.zero(), ring.one(), r};
  }
  return AffineAlongLine<R>{slope};
}

template <Ring R>
std::optional<Elem<R>> solve_det(const SolveResult<R>& s) {
  if (const auto* z = std::get_if<AllZero<R>>(&s)) return z->det;
  if (const auto* k = std::get_if<KernelBasis<R>>(&s)) return k->det;
  return std::get<CannotCancel<R>>(s).det;
}

}  // namespace detail

/// Decides whether f is affine-linear on R^n given the coordinate lines and
/// the radial lines R v for v in `dirs`, and explains the outcome.
template <Ring R>
Certificate<R> recover(const FunctionOracle<R>& f, const DirectionSet<R>& dirs, RecoverOptions options = {}) {
  const R& ring = f.ring();
  const int n = f.arity();
  for (std::size_t i = 0; i < dirs.dirs.size(); ++i) {
    if (static_cast<int>(dirs.dirs[i].size()) != n) {
      throw PreconditionError("direction " + std::to_string(i + 1) + " has arity " +
                              std::to_string(dirs.dirs[i].size()) + ", expected " + std::to_string(n));
    }
    if (is_zero_point(ring, dirs.dirs[i])) {
      return HypothesisViolation{"direction " + std::to_string(i + 1) + " is zero and spans no line"};
    }
  }

  // (i) every line m0 + R e_i.
  FunctionOracle<R> oracle = f;
  if constexpr (FiniteRing<R>) {
    oracle = f.tabulated();
    if (auto fail = detail::check_coordinate_lines(ring, n, *oracle.table())) return NonAffineCertificate<R>{*fail};
  } else {
    // Polynomial oracles are multi-affine, hence affine along every m0 + R e_i.
    if (oracle.poly() == nullptr) throw Unsupported("recovery over " + ring.describe() + " needs a polynomial oracle");
  }

  // (ii) coefficients of the multi-affine form at m0 = 0.
  const MultiAffinePoly<R> psi = psi_extract(oracle, zero_point(ring, n), n);

  // (iii) radial lines, then the univariate cancellation per direction.
  std::vector<Elem<R>> slopes;
  for (const auto& v : dirs.dirs) {
    Line<R> line(ring, zero_point(ring, n), v);
    const int support = static_cast<int>(std::count_if(v.begin(), v.end(), [&](const auto& x) { return !ring.is_zero(x); }));
    LineCheck<R> check = options.mode == ConstraintMode::kExhaustive ? line_affine_check(oracle, line)
                                                                      : detail::node_line_check(oracle, line, support);
    if (const auto* w = std::get_if<LineWitness<R>>(&check)) return NonAffineCertificate<R>{LineFailure<R>{line, *w, true}};
    slopes.push_back(std::get<AffineAlongLine<R>>(check).slope);
  }
  for (std::size_t i = 0; i < dirs.dirs.size(); ++i) {
    const auto& v = dirs.dirs[i];
    // sum_k c_k r^k vanishes on the tested parameters.
    std::vector<Elem<R>> c = restrict_radial(psi, v);
    c[0] = ring.zero();
    c[1] = ring.sub(c[1], slopes[i]);
    int top = 0;
    for (int d = 1; d <= n; ++d) {
      if (!ring.is_zero(c[d])) top = d;
    }
    int d = top;
    if (options.mode == ConstraintMode::kProofNodes) {
      d = static_cast<int>(std::count_if(v.begin(), v.end(), [&](const auto& x) { return !ring.is_zero(x); }));
    }
    if (d < 2 && top == 0) continue;
    const auto solved = solve_vandermonde_exact(power_vandermonde(ring, std::max(d, top)), ring);
    if (std::holds_alternative<AllZero<R>>(solved)) {
      if (top != 0) throw InconsistencyError("regular evaluation determinant but nonzero radial residual");
      continue;
    }
    return CannotCancelCertificate<R>{std::max(d, top), *detail::solve_det(solved), v};
  }

  // (iv) per-degree systems in increasing k.
  const auto systems = build_degree_systems(psi, dirs);
  for (const auto& [k, sys] : systems) {
    std::optional<std::pair<Mask, Elem<R>>> survivor;
    for (Mask J : sys.masks) {
      if (!ring.is_zero(psi.coeff(J))) {
        survivor.emplace(J, psi.coeff(J));
        break;
      }
    }
    const auto solved = solve_vandermonde_exact(sys, ring);
    if (!survivor) continue;
    if (std::holds_alternative<AllZero<R>>(solved)) {
      return NonAffineCertificate<R>{CoefficientWitness<R>{k, survivor->first, survivor->second, true}};
    }
    if (std::holds_alternative<KernelBasis<R>>(solved)) {
      return NonAffineCertificate<R>{CoefficientWitness<R>{k, survivor->first, survivor->second, false}};
    }
    return CannotCancelCertificate<R>{k, std::get<CannotCancel<R>>(solved).det, std::nullopt};
  }

  // (v) assemble and verify.
  AffineCertificate<R> cert{oracle(zero_point(ring, n)), {}};
  for (int i = 0; i < n; ++i) cert.linear.push_back(ring.sub(oracle(unit_vector(ring, n, i)), cert.c0));
  const auto candidate = affine_poly(ring, cert.c0, cert.linear);
  if constexpr (FiniteRing<R>) {
    if (tabulate(candidate) != *oracle.table()) throw InconsistencyError("affine candidate disagrees with the oracle");
  } else {
    if (!(candidate == *oracle.poly())) throw InconsistencyError("affine candidate disagrees with the oracle");
  }
  return cert;
}

}  // namespace affine
