#pragma once

// Weak multiplicative B_h-sets: finite S in R whose h-element subsets have
// pairwise distinct products. Subsets of S are masks over positions in S.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "affine/errors.hpp"
#include "affine/multiaffine.hpp"
#include "affine/ring.hpp"

namespace affine {

template <Ring R>
struct BhCandidate {
  R ring;
  std::vector<Elem<R>> elements;

  BhCandidate(R r, std::vector<Elem<R>> s) : ring(std::move(r)), elements(std::move(s)) {
    if (elements.empty()) throw PreconditionError("B_h candidate must be nonempty");
    if (elements.size() > static_cast<std::size_t>(kMaxArity)) throw PreconditionError("B_h candidate larger than 16");
    std::set<Elem<R>> seen(elements.begin(), elements.end());
    if (seen.size() != elements.size()) throw PreconditionError("B_h candidate has repeated elements");
  }

  int size() const { return static_cast<int>(elements.size()); }
};

template <Ring R>
Elem<R> subset_product(const BhCandidate<R>& S, Mask J) {
  Elem<R> acc = S.ring.one();
  for (Mask rest = J; rest != 0; rest &= rest - 1) acc = S.ring.mul(acc, S.elements[std::countr_zero(rest)]);
  return acc;
}

/// Elements of S picked by J, in S order.
template <Ring R>
std::vector<Elem<R>> subset_elements(const BhCandidate<R>& S, Mask J) {
  std::vector<Elem<R>> out;
  for (Mask rest = J; rest != 0; rest &= rest - 1) out.push_back(S.elements[std::countr_zero(rest)]);
  return out;
}

struct BhOk {
  bool operator==(const BhOk&) const = default;
};

template <Ring R>
struct Collision {
  int h = 0;
  Mask left = 0;
  Mask right = 0;
  Elem<R> product;
};

template <Ring R>
using BhVerdict = std::variant<BhOk, Collision<R>>;

/// ok iff the product map on h-subsets is injective; otherwise the first
/// colliding pair (J, J') with J < J' in lexicographic subset order.
template <Ring R>
BhVerdict<R> verify_bh(const BhCandidate<R>& S, int h) {
  const int n = S.size();
  if (h < 1 || h > n) throw PreconditionError("h must be in [1, |S|]");
  const auto subsets = masks_of_size(n, h);
  std::map<Elem<R>, std::size_t> first_seen;
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    auto [it, inserted] = first_seen.emplace(subset_product(S, subsets[i]), i);
    if (inserted) continue;
    // The earliest later duplicate of a given J is met first in this scan.
    const std::pair<std::size_t, std::size_t> pair{it->second, i};
    if (!best || pair.first < best->first) best = pair;
  }
  if (!best) return BhOk{};
  return Collision<R>{h, subsets[best->first], subsets[best->second], subset_product(S, subsets[best->first])};
}

struct Property2Ok {};

template <Ring R>
struct NonRegularDifference {
  int h = 0;
  Mask left = 0;
  Mask right = 0;
  Elem<R> value;  // prod(left) - prod(right)
};

template <Ring R>
struct NonRegularElement {
  std::size_t position = 0;
  Elem<R> value;
};

template <Ring R>
struct BhReport {
  std::vector<BhVerdict<R>> per_h;  // entry h-1
  std::variant<Property2Ok, NonRegularDifference<R>, NonRegularElement<R>> property2;

  bool property1_ok() const {
    return std::all_of(per_h.begin(), per_h.end(), [](const auto& v) { return std::holds_alternative<BhOk>(v); });
  }
  bool property2_ok() const { return std::holds_alternative<Property2Ok>(property2); }
  bool ok() const { return property1_ok() && property2_ok(); }
};

/// Property (1): B_h for every 1 <= h <= n. Property (2): for 1 < h < n every
/// difference of distinct h-fold products is regular, and every element of S
/// is regular. h = n differences are not checked; the top degree is handled
/// by the all-ones direction instead.
template <Ring R>
BhReport<R> verify_properties(const BhCandidate<R>& S) {
  const int n = S.size();
  if (n < 3) throw PreconditionError("verify_properties needs |S| >= 3");
  const R& ring = S.ring;
  BhReport<R> report;
  report.property2 = Property2Ok{};
  for (int h = 1; h <= n; ++h) report.per_h.push_back(verify_bh(S, h));

  for (int h = 2; h < n; ++h) {
    const auto subsets = masks_of_size(n, h);
    std::vector<Elem<R>> prods;
    for (Mask J : subsets) prods.push_back(subset_product(S, J));
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      for (std::size_t j = i + 1; j < subsets.size(); ++j) {
        const Elem<R> diff = ring.sub(prods[i], prods[j]);
        if (!ring.is_regular(diff)) {
          report.property2 = NonRegularDifference<R>{h, subsets[i], subsets[j], diff};
          return report;
        }
      }
    }
  }
  for (std::size_t i = 0; i < S.elements.size(); ++i) {
    if (!ring.is_regular(S.elements[i])) {
      report.property2 = NonRegularElement<R>{i, S.elements[i]};
      return report;
    }
  }
  return report;
}

/// S = {1, g, g^2, g^4, ..., g^(2^(n-2))}; needs g and g^k - 1 regular for
/// 1 <= k <= 2^(n-1) - 1.
template <Ring R>
BhCandidate<R> construct_geometric(const R& ring, const Elem<R>& g, int n) {
  if (n < 2 || n > kMaxArity) throw PreconditionError("construct_geometric needs 2 <= n <= 16");
  if (!ring.is_regular(g)) throw PreconditionError("g = " + ring.to_string(g) + " is not a non-zerodivisor");
  const std::uint64_t limit = (std::uint64_t{1} << (n - 1)) - 1;
  Elem<R> power = ring.one();
  for (std::uint64_t k = 1; k <= limit; ++k) {
    power = ring.mul(power, g);
    if (!ring.is_regular(ring.sub(power, ring.one()))) {
      throw PreconditionError("g^" + std::to_string(k) + " - 1 = " + ring.to_string(ring.sub(power, ring.one())) +
                              " is not a non-zerodivisor (k = " + std::to_string(k) + ")");
    }
  }
  std::vector<Elem<R>> S{ring.one()};
  for (int j = 0; j <= n - 2; ++j) S.push_back(ring_pow(ring, g, std::uint64_t{1} << j));
  return BhCandidate<R>(ring, std::move(S));
}

/// The first n primes, as rationals.
inline BhCandidate<Rationals> construct_primes(int n) {
  if (n < 1 || n > kMaxArity) throw PreconditionError("construct_primes needs 1 <= n <= 16");
  std::vector<Rational> S;
  for (std::uint64_t c = 2; static_cast<int>(S.size()) < n; ++c) {
    if (is_prime(c)) S.emplace_back(static_cast<long long>(c));
  }
  return BhCandidate<Rationals>(Rationals{}, std::move(S));
}

/// First n-subset of the ring (lexicographic in element encodings) passing
/// verify_properties. Only subsets of regular elements are candidates, and
/// `budget` caps how many are examined.
template <Ring R>
std::optional<BhCandidate<R>> search_bh(const R& ring, int n, std::uint64_t budget) {
  if (n < 3 || n > kMaxArity) throw PreconditionError("search_bh needs 3 <= n <= 16");
  if constexpr (!FiniteRing<R>) {
    throw Unsupported("search_bh needs a finite ring; use construct_primes over " + ring.describe());
  } else {
    std::vector<Elem<R>> pool;
    for (const auto& x : enumerate_elements(ring)) {
      if (ring.is_regular(x)) pool.push_back(x);
    }
    if (pool.size() < static_cast<std::size_t>(n)) return std::nullopt;
    std::vector<std::size_t> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    for (std::uint64_t tried = 0; tried < budget; ++tried) {
      std::vector<Elem<R>> S;
      for (auto i : pick) S.push_back(pool[i]);
      BhCandidate<R> cand(ring, std::move(S));
      if (verify_properties(cand).ok()) return cand;
      int i = n;
      while (i > 0 && pick[i - 1] == pool.size() - n + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (int j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return std::nullopt;
  }
}

}  // namespace affine
