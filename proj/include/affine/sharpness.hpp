#pragma once

// How many radial directions are needed: N = C(n, ceil(n/2)) for n >= 3
// (1 for n = 2). Moment directions built from a verified B_h-set attain it,
// and any smaller direction set is defeated by a degree-ceil(n/2) polynomial.

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "affine/bh_sets.hpp"
#include "affine/errors.hpp"
#include "affine/linalg.hpp"
#include "affine/multiaffine.hpp"
#include "affine/recovery.hpp"
#include "affine/ring.hpp"

namespace affine {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t acc = 1;
  for (int i = 1; i <= k; ++i) acc = acc * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return acc;
}

inline std::uint64_t minimal_direction_count(int n) {
  if (n < 2) throw PreconditionError("minimal_direction_count needs n >= 2");
  if (n == 2) return 1;
  return binomial(n, (n + 1) / 2);
}

template <Ring R>
struct SharpnessWitness {
  MultiAffinePoly<R> poly;
  int degree = 0;
  std::vector<Point<R>> dirs;
};

/// A nonzero polynomial, homogeneous of degree k = ceil(n/2), whose degree-k
/// radial coefficient vanishes along every direction in D. It is taken as
/// the first reduced-echelon kernel vector of the k-th constraint matrix.
template <Ring R>
SharpnessWitness<R> lower_bound_witness(const R& ring, int n, const DirectionSet<R>& D) {
  if (n < 3) throw PreconditionError("lower_bound_witness needs n >= 3");
  check_arity(n);
  if (!ring.is_field()) throw PreconditionError("lower_bound_witness needs a field, got " + ring.describe());
  if constexpr (FiniteRing<R>) {
    if (ring.size() <= (std::uint64_t{1} << (n - 1))) {
      throw PreconditionError("field " + ring.describe() + " has at most 2^(n-1) elements");
    }
  }
  const std::uint64_t N = minimal_direction_count(n);
  if (D.dirs.size() >= N) {
    throw PreconditionError(std::to_string(D.dirs.size()) + " directions is not fewer than N = " + std::to_string(N));
  }
  const int k = (n + 1) / 2;
  const auto masks = masks_of_size(n, k);
  const auto basis = kernel_basis(ring, constraint_matrix(ring, n, k, D.dirs));
  if (basis.empty()) throw InconsistencyError("underdetermined system has an empty kernel");
  SharpnessWitness<R> w{MultiAffinePoly<R>(ring, n), k, D.dirs};
  for (std::size_t c = 0; c < masks.size(); ++c) w.poly.set(masks[c], basis.front()[c]);
  return w;
}

/// Structural invariants: nonzero, homogeneous of the stated degree,
/// b_k(v) = 0 for every v in the direction set, and not affine.
template <Ring R>
bool witness_valid(const SharpnessWitness<R>& w) {
  if (w.poly.is_zero() || is_affine_poly(w.poly)) return false;
  for (const auto& [m, a] : w.poly.coeffs()) {
    if (popcount(m) != w.degree) return false;
  }
  for (const auto& v : w.dirs) {
    if (!w.poly.ring().is_zero(restrict_radial(w.poly, v)[w.degree])) return false;
  }
  return true;
}

template <Ring R>
struct CertifyOk {
  std::vector<Point<R>> dirs;
  std::map<int, Elem<R>> dets;  // det(A_k) for 2 <= k <= n
};

template <Ring R>
struct CertifyFailure {
  int degree = 0;
  Elem<R> det;
};

template <Ring R>
using CertifyResult = std::variant<CertifyOk<R>, CertifyFailure<R>>;

/// prod_{a < b} (x_b - x_a).
template <Ring R>
Elem<R> vandermonde_product(const R& ring, const std::vector<Elem<R>>& nodes) {
  Elem<R> acc = ring.one();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) acc = ring.mul(acc, ring.sub(nodes[b], nodes[a]));
  }
  return acc;
}

/// Checks that the N moment directions of S force every a_J with |J| >= 2 to
/// vanish: for 2 <= k < n the square matrix A_k with (i, J) entry
/// (prod_{j in J} s_j)^(i-1) must have a regular determinant, and k = n is
/// settled by the all-ones direction.
template <Ring R>
CertifyResult<R> certify_directions(const BhCandidate<R>& S) {
  const R& ring = S.ring;
  const int n = S.size();
  if (n < 3) throw PreconditionError("certify_directions needs |S| >= 3");
  if (!verify_properties(S).ok()) throw PreconditionError("S fails the B_h properties (1)/(2)");
  const auto N = static_cast<int>(minimal_direction_count(n));
  const auto dirs = moment_directions(ring, S.elements, N);
  CertifyOk<R> ok{dirs.dirs, {}};
  for (int k = 2; k < n; ++k) {
    const auto masks = masks_of_size(n, k);
    const std::vector<Point<R>> rows(dirs.dirs.begin(), dirs.dirs.begin() + static_cast<std::ptrdiff_t>(masks.size()));
    const Elem<R> det = determinant(ring, constraint_matrix(ring, n, k, rows));
    std::vector<Elem<R>> nodes;
    for (Mask J : masks) nodes.push_back(subset_product(S, J));
    if (det != vandermonde_product(ring, nodes)) {
      throw InconsistencyError("A_" + std::to_string(k) + " determinant disagrees with the Vandermonde product");
    }
    if (!ring.is_regular(det)) return CertifyFailure<R>{k, det};
    ok.dets.emplace(k, det);
  }
  // Row v_1 = (1, ..., 1) gives a_{1..n} * 1 = 0.
  const Elem<R> top = monomial(ring, static_cast<Mask>((Mask{1} << n) - 1), dirs.dirs.front());
  if (!ring.is_regular(top)) return CertifyFailure<R>{n, top};
  ok.dets.emplace(n, top);
  return ok;
}

}  // namespace affine
