#include <gtest/gtest.h>

#include <random>

#include "affine/sharpness.hpp"
#include "oracles.hpp"

using namespace affine;

namespace {

// Every line m0 + R e_i and every R v (v in D) passes, yet the witness is not
// affine and recovery with D cannot force its coefficients to zero.
template <FiniteRing R>
void expect_functionally_valid(const R& ring, int n, const SharpnessWitness<R>& w) {
  ASSERT_TRUE(witness_valid(w));
  const auto f = FunctionOracle<R>::from_poly(w.poly).tabulated();
  for (std::uint64_t idx = 0; idx < table_size(ring, n); ++idx) {
    for (int i = 0; i < n; ++i) {
      ASSERT_TRUE(passes(line_affine_check(f, Line<R>(ring, point_from_index(ring, n, idx), unit_vector(ring, n, i)))));
    }
  }
  for (const auto& v : w.dirs) ASSERT_TRUE(passes(line_affine_check(f, Line<R>(ring, zero_point(ring, n), v))));
  ASSERT_FALSE(oracle::brute_is_affine(f));
  const auto cert = recover(f, DirectionSet<R>{w.dirs});
  ASSERT_TRUE(std::holds_alternative<NonAffineCertificate<R>>(cert));
  const auto& cw = std::get<CoefficientWitness<R>>(std::get<NonAffineCertificate<R>>(cert).witness);
  EXPECT_EQ(cw.degree, w.degree);
  EXPECT_FALSE(cw.forced);
}

template <Ring R>
std::vector<DirectionSet<R>> subsets_missing_one(const R&, const std::vector<Point<R>>& dirs) {
  std::vector<DirectionSet<R>> out;
  for (std::size_t skip = 0; skip < dirs.size(); ++skip) {
    DirectionSet<R> d;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (i != skip) d.dirs.push_back(dirs[i]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

TEST(MinimalDirectionCount, Examples) {
  EXPECT_EQ(minimal_direction_count(2), 1u);
  EXPECT_EQ(minimal_direction_count(3), 3u);
  EXPECT_EQ(minimal_direction_count(4), 6u);
  EXPECT_EQ(minimal_direction_count(5), 10u);
  EXPECT_THROW(minimal_direction_count(1), PreconditionError);
}

TEST(MinimalDirectionCount, IsTheLargestBinomial) {
  for (int n = 3; n <= 16; ++n) {
    std::uint64_t best = 0;
    for (int k = 0; k <= n; ++k) best = std::max(best, binomial(n, k));
    EXPECT_EQ(minimal_direction_count(n), best) << n;
  }
}

TEST(LowerBoundWitness, Examples) {
  const auto f7 = ZMod::prime(7);
  const auto w = lower_bound_witness(f7, 3, DirectionSet<ZMod>{{{1, 1, 1}, {1, 2, 4}}});
  EXPECT_EQ(w.degree, 2);
  // Proportional to 4 x1x2 + x1x3 + 2 x2x3.
  const std::uint64_t scale = f7.mul(4, ring_inverse(f7, w.poly.coeff(0b011)));
  EXPECT_EQ(f7.mul(scale, w.poly.coeff(0b101)), 1u);
  EXPECT_EQ(f7.mul(scale, w.poly.coeff(0b110)), 2u);
  EXPECT_EQ(w.poly.coeffs().size(), 3u);

  const auto empty = lower_bound_witness(f7, 3, DirectionSet<ZMod>{});
  EXPECT_EQ(poly_to_string(empty.poly), "1:{1,2}");
}

TEST(LowerBoundWitness, Preconditions) {
  const auto f7 = ZMod::prime(7);
  EXPECT_THROW(lower_bound_witness(f7, 3, moment_directions(f7, {1, 2, 4}, 3)), PreconditionError);
  EXPECT_THROW(lower_bound_witness(ZMod::prime(3), 3, DirectionSet<ZMod>{}), PreconditionError);
  EXPECT_THROW(lower_bound_witness(f7, 4, DirectionSet<ZMod>{}), PreconditionError);  // 7 <= 2^3
  EXPECT_THROW(lower_bound_witness(ZMod::zmod(25), 3, DirectionSet<ZMod>{}), PreconditionError);
  EXPECT_THROW(lower_bound_witness(f7, 2, DirectionSet<ZMod>{}), PreconditionError);
}

TEST(LowerBoundWitness, AnyFiveDirectionsInF17) {
  std::mt19937_64 rng(61);
  const auto f17 = ZMod::prime(17);
  for (int i = 0; i < 500; ++i) {
    DirectionSet<ZMod> D;
    const int count = static_cast<int>(rng() % 6);
    while (static_cast<int>(D.dirs.size()) < count) {
      Point<ZMod> v;
      for (int j = 0; j < 4; ++j) v.push_back(oracle::random_element(f17, rng));
      if (!is_zero_point(f17, v)) D.dirs.push_back(v);
    }
    const auto w = lower_bound_witness(f17, 4, D);
    ASSERT_EQ(w.degree, 2);
    ASSERT_TRUE(witness_valid(w));
  }
}

TEST(LowerBoundWitness, FunctionallyValidN3) {
  for (std::uint64_t p : {7, 11, 17}) {
    const auto f = ZMod::prime(p);
    const auto S = search_bh(f, 3, 100000);
    ASSERT_TRUE(S.has_value());
    for (const auto& D : subsets_missing_one(f, moment_directions(f, S->elements, 3).dirs)) {
      expect_functionally_valid(f, 3, lower_bound_witness(f, 3, D));
    }
  }
}

TEST(LowerBoundWitness, FunctionallyValidN4) {
  // Needs |F| > 8, so p = 7 is excluded here.
  for (std::uint64_t p : {11, 17}) {
    const auto f = ZMod::prime(p);
    const auto S = search_bh(f, 4, 100000);
    ASSERT_TRUE(S.has_value());
    for (const auto& D : subsets_missing_one(f, moment_directions(f, S->elements, 6).dirs)) {
      expect_functionally_valid(f, 4, lower_bound_witness(f, 4, D));
    }
  }
}

TEST(LowerBoundWitness, RationalDirections) {
  const Rationals q;
  for (int n = 3; n <= 5; ++n) {
    const auto S = construct_primes(n);
    const int N = static_cast<int>(minimal_direction_count(n));
    for (const auto& D : subsets_missing_one(q, moment_directions(q, S.elements, N).dirs)) {
      const auto w = lower_bound_witness(q, n, D);
      ASSERT_TRUE(witness_valid(w));
      const auto cert = recover(FunctionOracle<Rationals>::from_poly(w.poly), D);
      ASSERT_TRUE(std::holds_alternative<NonAffineCertificate<Rationals>>(cert));
    }
  }
}

TEST(CertifyDirections, Examples) {
  const auto f5 = ZMod::prime(5);
  const auto r = certify_directions(BhCandidate<ZMod>(f5, {1, 2, 4}));
  ASSERT_TRUE(std::holds_alternative<CertifyOk<ZMod>>(r));
  const auto& ok = std::get<CertifyOk<ZMod>>(r);
  EXPECT_EQ(ok.dets.at(2), 3u);  // (4-2)(3-2)(3-4) mod 5
  EXPECT_EQ(ok.dirs.size(), 3u);

  const auto f17 = ZMod::prime(17);
  EXPECT_TRUE(std::holds_alternative<CertifyOk<ZMod>>(certify_directions(construct_geometric(f17, std::uint64_t{3}, 4))));
  EXPECT_THROW(certify_directions(BhCandidate<ZMod>(ZMod::zmod(6), {1, 2, 3})), PreconditionError);
}

TEST(CertifyDirections, DeterminantsMatchLeibniz) {
  const auto f17 = ZMod::prime(17);
  const auto S = construct_geometric(f17, std::uint64_t{3}, 4);
  const auto result = certify_directions(S);
  const auto& ok = std::get<CertifyOk<ZMod>>(result);
  const auto masks = masks_of_size(4, 2);
  const std::vector<Point<ZMod>> rows(ok.dirs.begin(), ok.dirs.begin() + masks.size());
  EXPECT_EQ(ok.dets.at(2), oracle::leibniz_det(f17, constraint_matrix(f17, 4, 2, rows)));
}

TEST(CertifyDirections, RationalPrimes) {
  for (int n = 3; n <= 6; ++n) {
    const auto r = certify_directions(construct_primes(n));
    ASSERT_TRUE(std::holds_alternative<CertifyOk<Rationals>>(r)) << n;
  }
}

TEST(CertifyDirections, EveryValidSetOverSmallFields) {
  for (std::uint64_t p : {11, 13, 17}) {
    const auto f = ZMod::prime(p);
    for (int n : {3, 4}) {
      const auto S = search_bh(f, n, 100000);
      ASSERT_TRUE(S.has_value());
      ASSERT_TRUE(std::holds_alternative<CertifyOk<ZMod>>(certify_directions(*S)));
    }
  }
}
