#include <gtest/gtest.h>

#include <random>

#include "affine/bh_sets.hpp"
#include "oracles.hpp"

using namespace affine;

TEST(VerifyBh, Examples) {
  const Rationals q;
  const BhCandidate<Rationals> s(q, {Rational(1), Rational(2), Rational(3), Rational(6)});
  const auto v = verify_bh(s, 2);
  ASSERT_TRUE(std::holds_alternative<Collision<Rationals>>(v));
  const auto& c = std::get<Collision<Rationals>>(v);
  EXPECT_EQ(subset_elements(s, c.left), (std::vector<Rational>{Rational(1), Rational(6)}));
  EXPECT_EQ(subset_elements(s, c.right), (std::vector<Rational>{Rational(2), Rational(3)}));
  EXPECT_EQ(c.product, Rational(6));

  const auto f5 = ZMod::prime(5);
  EXPECT_TRUE(std::holds_alternative<BhOk>(verify_bh(BhCandidate<ZMod>(f5, {1, 2, 4}), 2)));
  EXPECT_TRUE(std::holds_alternative<BhOk>(verify_bh(s, 1)));
  EXPECT_THROW(verify_bh(s, 0), PreconditionError);
  EXPECT_THROW(verify_bh(s, 5), PreconditionError);
  EXPECT_THROW(BhCandidate<ZMod>(f5, {1, 1}), PreconditionError);
  EXPECT_THROW(BhCandidate<ZMod>(f5, {}), PreconditionError);
}

TEST(VerifyBh, FirstCollisionIsLexicographicallyLeast) {
  // Pair products mod 7: {1,2} = 2 = {5,6}, and {1,6} = 6 = {2,3} comes later.
  const auto f7 = ZMod::prime(7);
  const BhCandidate<ZMod> s(f7, {1, 2, 3, 4, 5, 6});
  const auto v = verify_bh(s, 2);
  const auto& c = std::get<Collision<ZMod>>(v);
  EXPECT_EQ(subset_elements(s, c.left), (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(subset_elements(s, c.right), (std::vector<std::uint64_t>{5, 6}));
}

TEST(VerifyBh, AgreesWithSortingOracle) {
  std::mt19937_64 rng(51);
  const std::vector<ZMod> rings{ZMod::prime(11), ZMod::prime(13), ZMod::zmod(16), ZMod::zmod(30), ZMod::prime(31)};
  int collisions = 0;
  for (int i = 0; i < 600; ++i) {
    const auto& ring = rings[i % rings.size()];
    const int n = 2 + static_cast<int>(rng() % 5);
    std::set<std::uint64_t> pick;
    while (static_cast<int>(pick.size()) < n) pick.insert(oracle::random_element(ring, rng));
    const BhCandidate<ZMod> s(ring, std::vector<std::uint64_t>(pick.begin(), pick.end()));
    const int h = 1 + static_cast<int>(rng() % n);
    const auto v = verify_bh(s, h);
    ASSERT_EQ(std::holds_alternative<BhOk>(v), oracle::bh_by_sorting(s, h));
    if (const auto* c = std::get_if<Collision<ZMod>>(&v)) {
      ++collisions;
      ASSERT_EQ(subset_product(s, c->left), subset_product(s, c->right));
      ASSERT_EQ(c->product, subset_product(s, c->left));
      ASSERT_LT(mask_indices(c->left), mask_indices(c->right));
    }
  }
  EXPECT_GT(collisions, 50);
}

TEST(VerifyProperties, Examples) {
  const Rationals q;
  EXPECT_TRUE(verify_properties(BhCandidate<Rationals>(q, {Rational(2), Rational(3), Rational(5), Rational(7)})).ok());

  const auto z6 = ZMod::zmod(6);
  const auto r = verify_properties(BhCandidate<ZMod>(z6, {1, 2, 3}));
  EXPECT_TRUE(r.property1_ok());  // products 2, 3, 0 are distinct
  ASSERT_FALSE(r.property2_ok());
  const auto& d = std::get<NonRegularDifference<ZMod>>(r.property2);
  EXPECT_EQ(d.h, 2);
  EXPECT_FALSE(z6.is_regular(d.value));

  EXPECT_TRUE(verify_properties(BhCandidate<ZMod>(ZMod::prime(5), {1, 2, 4})).ok());
  EXPECT_THROW(verify_properties(BhCandidate<ZMod>(ZMod::prime(5), {1, 2})), PreconditionError);
}

TEST(VerifyProperties, ZerodivisorElementsFailThroughDifferences) {
  // s_1 s_2 - s_1 s_3 = s_1 (s_2 - s_3), so a zerodivisor in S already shows
  // up as a non-regular pair difference.
  const auto r = verify_properties(BhCandidate<ZMod>(ZMod::prime(7), {0, 1, 3}));
  ASSERT_TRUE(std::holds_alternative<NonRegularDifference<ZMod>>(r.property2));
  const auto z9 = verify_properties(BhCandidate<ZMod>(ZMod::zmod(9), {2, 3, 4}));
  ASSERT_TRUE(std::holds_alternative<NonRegularDifference<ZMod>>(z9.property2));
}

// Within 1 < h < n a collision is a zero difference, so property (2) fails
// whenever property (1) fails there.
TEST(VerifyProperties, Property2ImpliesProperty1) {
  std::mt19937_64 rng(52);
  const std::vector<ZMod> rings{ZMod::prime(7), ZMod::prime(11), ZMod::zmod(12), ZMod::zmod(25), ZMod::prime(17)};
  for (int i = 0; i < 500; ++i) {
    const auto& ring = rings[i % rings.size()];
    const int n = 3 + static_cast<int>(rng() % 3);
    std::set<std::uint64_t> pick;
    while (static_cast<int>(pick.size()) < n) pick.insert(oracle::random_element(ring, rng));
    const BhCandidate<ZMod> s(ring, std::vector<std::uint64_t>(pick.begin(), pick.end()));
    const auto r = verify_properties(s);
    bool middle_collision = false;
    for (int h = 2; h < n; ++h) middle_collision |= !std::holds_alternative<BhOk>(r.per_h[h - 1]);
    if (middle_collision) {
      ASSERT_FALSE(r.property2_ok());
    }
    if (const auto* d = std::get_if<NonRegularDifference<ZMod>>(&r.property2)) {
      ASSERT_FALSE(ring.is_regular(d->value));
      ASSERT_EQ(d->value, ring.sub(subset_product(s, d->left), subset_product(s, d->right)));
    }
  }
}

TEST(ConstructGeometric, Examples) {
  const auto f17 = ZMod::prime(17);
  EXPECT_EQ(construct_geometric(f17, std::uint64_t{3}, 4).elements, (std::vector<std::uint64_t>{1, 3, 9, 13}));
  EXPECT_EQ(construct_geometric(ZMod::prime(5), std::uint64_t{2}, 3).elements, (std::vector<std::uint64_t>{1, 2, 4}));
  try {
    construct_geometric(ZMod::prime(5), std::uint64_t{4}, 3);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("k = 2"), std::string::npos);
  }
}

TEST(ConstructGeometric, OutputPassesWheneverPreconditionHolds) {
  int built = 0;
  for (std::uint64_t p = 2; p <= 31; ++p) {
    if (!is_prime(p)) continue;
    const auto f = ZMod::prime(p);
    for (std::uint64_t g = 0; g < p; ++g) {
      for (int n = 3; n <= 4; ++n) {
        std::optional<BhCandidate<ZMod>> S;
        try {
          S = construct_geometric(f, g, n);
        } catch (const PreconditionError&) {
          continue;
        }
        ++built;
        ASSERT_TRUE(verify_properties(*S).ok()) << "p=" << p << " g=" << g << " n=" << n;
      }
    }
  }
  EXPECT_GT(built, 50);
}

TEST(ConstructPrimes, Examples) {
  EXPECT_EQ(construct_primes(3).elements, (std::vector<Rational>{Rational(2), Rational(3), Rational(5)}));
  EXPECT_EQ(construct_primes(5).elements.back(), Rational(11));
  for (int n = 3; n <= 8; ++n) EXPECT_TRUE(verify_properties(construct_primes(n)).ok());
}

TEST(SearchBh, Examples) {
  const auto s = search_bh(ZMod::prime(5), 3, 1000);
  ASSERT_TRUE(s.has_value());
  EXPECT_TRUE(verify_properties(*s).ok());
  EXPECT_FALSE(search_bh(ZMod::zmod(4), 3, 1000).has_value());
  EXPECT_FALSE(search_bh(ZMod::prime(2), 3, 1000).has_value());
  EXPECT_THROW(search_bh(Rationals{}, 3, 10), Unsupported);
  EXPECT_FALSE(search_bh(ZMod::prime(13), 4, 0).has_value());
}

TEST(SearchBh, SucceedsAboveTheFieldThreshold) {
  for (int n : {3, 4}) {
    for (std::uint64_t p = (std::uint64_t{1} << (n - 1)) + 1; p <= 40; ++p) {
      if (!is_prime(p)) continue;
      const auto s = search_bh(ZMod::prime(p), n, 1'000'000);
      ASSERT_TRUE(s.has_value()) << "p=" << p << " n=" << n;
      EXPECT_TRUE(verify_properties(*s).ok());
    }
  }
}
