#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "excursion/lattice.hpp"
#include "excursion/simgen.hpp"

namespace excursion {
namespace {

RegionSet from_indices(std::size_t m, std::initializer_list<std::size_t> members) {
  std::vector<std::uint8_t> flags(m, 0);
  for (auto i : members) flags[i] = 1;
  return RegionSet(LatticeShape{m}, std::move(flags));
}

TEST(LatticeShape, RejectsBadExtents) {
  EXPECT_THROW(LatticeShape({}), std::invalid_argument);
  EXPECT_THROW(LatticeShape({3, 0}), std::invalid_argument);
  EXPECT_THROW(LatticeShape({2, 2, 2, 2}), std::invalid_argument);
}

TEST(LatticeShape, RowMajorStrides) {
  LatticeShape s{4, 5, 6};
  EXPECT_EQ(s.size(), 120u);
  EXPECT_EQ(s.stride(0), 30u);
  EXPECT_EQ(s.stride(1), 6u);
  EXPECT_EQ(s.stride(2), 1u);
}

TEST(ScalarField, NaNOnlyOutsideMask) {
  LatticeShape s{3};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ScalarField(s, {0.0, nan, 1.0}), std::invalid_argument);
  Mask mask(s, {1, 0, 1});
  ScalarField f(s, {0.0, nan, 1.0}, mask);
  EXPECT_EQ(f.in_mask_count(), 2u);
  EXPECT_FALSE(f.in_mask(1));
}

TEST(SampleStack, NeedsTwoMatchingSamples) {
  LatticeShape s{2, 2};
  EXPECT_THROW(SampleStack({ScalarField::constant(s, 0.0)}), std::invalid_argument);
  EXPECT_THROW(SampleStack({ScalarField::constant(s, 0.0),
                            ScalarField::constant(LatticeShape{4}, 0.0)}),
               ShapeMismatch);
}

TEST(ExcursionSet, RampAtZeroKeepsRightHalf) {
  const ScalarField ramp = generate_signal(SignalSpec::ramp(), LatticeShape{50, 50});
  const RegionSet above = excursion_set(ramp, 0.0, Strictness::Strict);
  EXPECT_EQ(above.count(), 1250u);
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t c = 0; c < 50; ++c) {
      EXPECT_EQ(above.contains(r * 50 + c), c >= 25) << r << "," << c;
    }
  }
}

TEST(ExcursionSet, LevelBelowMinimumTakesEverythingInMask) {
  LatticeShape s{4};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ScalarField f(s, {-3.0, nan, 2.0, 0.5}, Mask(s, {1, 0, 1, 1}));
  const RegionSet all = excursion_set(f, -1e300, Strictness::Strict);
  EXPECT_EQ(all.count(), 3u);
  EXPECT_FALSE(all.contains(1));
}

TEST(ExcursionSet, BoundaryEquality) {
  const ScalarField one = ScalarField::constant(LatticeShape{3, 3}, 1.0);
  EXPECT_EQ(excursion_set(one, 1.0, Strictness::Strict).count(), 0u);
  EXPECT_EQ(excursion_set(one, 1.0, Strictness::NonStrict).count(), 9u);
}

TEST(ExcursionSet, StrictInsideNonStrictAndAntitone) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> coarse(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(30);
    // Mix continuous values with repeated grid values to exercise ties.
    for (auto& x : v) x = trial % 2 ? u(rng) : 0.5 * coarse(rng);
    ScalarField f(LatticeShape{5, 6}, v);
    double c1 = 0.5 * coarse(rng);
    double c2 = c1 + std::abs(u(rng));
    for (auto strict : {Strictness::Strict, Strictness::NonStrict}) {
      EXPECT_TRUE(excursion_set(f, c2, strict).is_subset_of(excursion_set(f, c1, strict)));
    }
    EXPECT_TRUE(excursion_set(f, c1, Strictness::Strict)
                    .is_subset_of(excursion_set(f, c1, Strictness::NonStrict)));
  }
}

TEST(RegionConfusion, FourElementTable) {
  const auto null = from_indices(4, {0, 1});
  const auto rej = from_indices(4, {1, 2});
  const RegionPartition p = region_confusion(null, rej);
  EXPECT_EQ(p.true_null_not_rejected, 1u);
  EXPECT_EQ(p.true_null_rejected, 1u);
  EXPECT_EQ(p.alt_not_rejected, 1u);
  EXPECT_EQ(p.alt_rejected, 1u);
}

TEST(RegionConfusion, EmptyAndFullRejection) {
  const auto null = from_indices(5, {0, 3});
  const RegionPartition none = region_confusion(null, RegionSet::empty(LatticeShape{5}));
  EXPECT_EQ(none.true_null_rejected, 0u);
  EXPECT_EQ(none.alt_rejected, 0u);

  const auto all = RegionSet::full(LatticeShape{5});
  EXPECT_EQ(region_confusion(all, all).true_null_rejected, 5u);
}

TEST(RegionConfusion, SumsToMAndComplementSwapsColumns) {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.4);
  LatticeShape s{6, 7};
  std::vector<std::uint8_t> inside(s.size());
  for (auto& x : inside) x = coin(rng) ? 0 : 1;
  Mask mask(s, inside);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> a(s.size()), b(s.size());
    for (auto& x : a) x = coin(rng);
    for (auto& x : b) x = coin(rng);
    RegionSet null(s, a, mask), rej(s, b, mask);
    const RegionPartition p = region_confusion(null, rej);
    const RegionPartition q = region_confusion(null, rej.complement());
    EXPECT_EQ(p.total(), mask.inside_count());
    EXPECT_EQ(p.true_null_rejected, q.true_null_not_rejected);
    EXPECT_EQ(p.true_null_not_rejected, q.true_null_rejected);
    EXPECT_EQ(p.alt_rejected, q.alt_not_rejected);
    EXPECT_EQ(p.alt_not_rejected, q.alt_rejected);
  }
}

TEST(RegionConfusion, ShapeMismatchThrows) {
  EXPECT_THROW(region_confusion(RegionSet::empty(LatticeShape{4}),
                                RegionSet::empty(LatticeShape{2, 2})),
               ShapeMismatch);
  LatticeShape s{3};
  EXPECT_THROW(region_confusion(RegionSet::empty(s), RegionSet::empty(s, Mask(s, {1, 1, 0}))),
               ShapeMismatch);
}

TEST(SetCardinalities, SmallCases) {
  const auto a = from_indices(4, {0, 1});
  const auto b = from_indices(4, {1, 2});
  const SetCardinalities s = set_cardinalities(a, b);
  EXPECT_EQ(s.a_minus_b, 1u);
  EXPECT_EQ(s.b_minus_a, 1u);
  EXPECT_EQ(s.intersection, 1u);

  EXPECT_EQ(set_cardinalities(a, a).a_minus_b, 0u);

  const SetCardinalities e = set_cardinalities(RegionSet::empty(LatticeShape{4}), b);
  EXPECT_EQ(e.a, 0u);
  EXPECT_EQ(e.a_minus_b, 0u);
  EXPECT_EQ(e.intersection, 0u);
}

TEST(SetCardinalities, Decomposition) {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> a(20), b(20);
    for (auto& x : a) x = coin(rng);
    for (auto& x : b) x = coin(rng);
    const auto s = set_cardinalities(RegionSet(LatticeShape{20}, a), RegionSet(LatticeShape{20}, b));
    EXPECT_EQ(s.a, s.a_minus_b + s.intersection);
    EXPECT_EQ(s.b, s.b_minus_a + s.intersection);
  }
}

TEST(RegionSet, OutOfMaskIsNeverMember) {
  LatticeShape s{4};
  Mask mask(s, {1, 0, 1, 0});
  const RegionSet full = RegionSet::full(s, mask);
  EXPECT_EQ(full.count(), 2u);
  EXPECT_EQ(full.complement().count(), 0u);
}

}  // namespace
}  // namespace excursion
