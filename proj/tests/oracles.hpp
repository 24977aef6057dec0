#pragma once

// Independent reference implementations used to cross-check the library.
// Deliberately naive: permutation expansion, direct subset sums, sorting.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "affine/affine.hpp"

namespace oracle {

using affine::Elem;
using affine::Mask;
using affine::Point;

// Leibniz formula: sum over permutations of sign * prod a(i, sigma(i)).
template <affine::Ring R>
Elem<R> leibniz_det(const R& ring, const affine::Matrix<Elem<R>>& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Elem<R> acc = ring.zero();
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    Elem<R> term = ring.one();
    for (std::size_t i = 0; i < n; ++i) term = ring.mul(term, a(i, perm[i]));
    acc = inversions % 2 ? ring.sub(acc, term) : ring.add(acc, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

// Regular iff x -> r x is injective on the whole ring.
template <affine::FiniteRing R>
bool regular_by_enumeration(const R& ring, const Elem<R>& r) {
  std::vector<Elem<R>> image;
  for (std::uint64_t i = 0; i < ring.size(); ++i) image.push_back(ring.mul(r, ring.element(i)));
  std::sort(image.begin(), image.end());
  return std::adjacent_find(image.begin(), image.end()) == image.end();
}

// Schoolbook product of digit polynomials reduced by the monic modulus.
inline std::uint64_t gf_mul_by_digits(const affine::GaloisField& f, std::uint64_t a, std::uint64_t b) {
  const auto p = f.p();
  const int k = f.k();
  const auto da = f.digits(a);
  const auto db = f.digits(b);
  std::vector<std::uint64_t> prod(2 * k, 0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
  }
  const auto& c = f.modulus_coeffs();  // x^k = -(c_0 + ... + c_{k-1} x^{k-1})
  for (int d = 2 * k - 1; d >= k; --d) {
    const std::uint64_t top = prod[d];
    prod[d] = 0;
    for (int i = 0; i < k; ++i) prod[d - k + i] = (prod[d - k + i] + (p - c[i]) * top) % p;
  }
  prod.resize(k);
  return f.from_digits(prod);
}

// Psi_J computed one J at a time from its own 2^|J| vertices.
template <affine::Ring R>
Elem<R> psi_direct(const affine::FunctionOracle<R>& f, const Point<R>& m0, Mask J) {
  const R& ring = f.ring();
  Elem<R> acc = ring.zero();
  for (Mask K = J;; K = (K - 1) & J) {
    Point<R> x = m0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if ((K >> j) & 1u) x[j] = ring.add(x[j], ring.one());
    }
    const bool negative = (std::popcount(J) - std::popcount(K)) % 2 != 0;
    acc = negative ? ring.sub(acc, f(x)) : ring.add(acc, f(x));
    if (K == 0) break;
  }
  return acc;
}

// Affine iff f(x + t e_i) - f(x) = t (f(e_i) - f(0)) for all x, i, t.
template <affine::FiniteRing R>
bool brute_is_affine(const affine::FunctionOracle<R>& f) {
  const R& ring = f.ring();
  const int n = f.arity();
  const auto zero = affine::zero_point(ring, n);
  const Elem<R> f0 = f(zero);
  for (int i = 0; i < n; ++i) {
    const Elem<R> c = ring.sub(f(affine::unit_vector(ring, n, i)), f0);
    for (std::uint64_t idx = 0; idx < affine::table_size(ring, n); ++idx) {
      const auto x = affine::point_from_index(ring, n, idx);
      for (std::uint64_t t = 0; t < ring.size(); ++t) {
        auto y = x;
        y[i] = ring.add(y[i], ring.element(t));
        if (ring.sub(f(y), f(x)) != ring.mul(ring.element(t), c)) return false;
      }
    }
  }
  return true;
}

// B_h by sorting all h-fold products.
template <affine::Ring R>
bool bh_by_sorting(const affine::BhCandidate<R>& S, int h) {
  std::vector<Elem<R>> prods;
  const int n = S.size();
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (std::popcount(m) != h) continue;
    Elem<R> p = S.ring.one();
    for (int j = 0; j < n; ++j) {
      if ((m >> j) & 1u) p = S.ring.mul(p, S.elements[j]);
    }
    prods.push_back(p);
  }
  std::sort(prods.begin(), prods.end());
  return std::adjacent_find(prods.begin(), prods.end()) == prods.end();
}

// ---------------------------------------------------------------------------
// Random inputs.

template <affine::FiniteRing R>
Elem<R> random_element(const R& ring, std::mt19937_64& rng) {
  return ring.element(std::uniform_int_distribution<std::uint64_t>(0, ring.size() - 1)(rng));
}

inline affine::Rational random_rational(std::mt19937_64& rng, long long span = 20) {
  std::uniform_int_distribution<long long> num(-span, span), den(1, span);
  return affine::Rational(num(rng), den(rng));
}

template <affine::Ring R, class Gen>
affine::MultiAffinePoly<R> random_poly(const R& ring, int n, Gen&& coeff, int max_degree = -1) {
  affine::MultiAffinePoly<R> p(ring, n);
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (max_degree >= 0 && std::popcount(m) > max_degree) continue;
    p.set(m, coeff());
  }
  return p;
}

}  // namespace oracle
