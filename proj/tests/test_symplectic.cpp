#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"
#include "separation_oracle.hpp"
#include "stw/counting.hpp"
#include "stw/error.hpp"
#include "stw/symplectic.hpp"

using namespace stw;

TEST(SymplecticForm, MatchesReferenceForm) {
  gen::Rng rng(21);
  for (std::uint32_t p : {2u, 3u, 5u}) {
    const SymplecticSpace space(2, PrimeModulus(p));
    for (int t = 0; t < 200; ++t) {
      const auto u = rng.vec(4, p), v = rng.vec(4, p);
      EXPECT_EQ(space.omega(FpVector(PrimeModulus(p), u), FpVector(PrimeModulus(p), v)), oracle::omega(u, v, p));
    }
    EXPECT_EQ(space.omega(space.e(0), space.f(0)), 1u);
    EXPECT_EQ(space.omega(space.f(1), space.e(1)), p - 1);
  }
}

TEST(Splittings, CountsMatchClosedFormAndOrderFormula) {
  struct Case {
    std::size_t g;
    std::uint32_t p;
    std::size_t total;
  };
  for (const Case c : {Case{1, 2, 1}, Case{1, 3, 1}, Case{2, 2, 11}, Case{2, 3, 46}, Case{2, 5, 326}}) {
    const auto all = enumerate_splittings(SymplecticSpace(c.g, PrimeModulus(c.p)));
    EXPECT_EQ(all.size(), c.total) << c.g << "," << c.p;
    std::map<std::vector<std::size_t>, std::size_t> by_type;
    for (const auto& s : all) ++by_type[s.type()];
    for (const auto& [type, count] : by_type)
      EXPECT_EQ(splitting_count(Partition::from_parts(type), c.g, c.p, false), count);
  }
}

TEST(Splittings, BudgetRequiresExtendedForGenusThree) {
  const SymplecticSpace space(3, PrimeModulus(2));
  EXPECT_THROW(enumerate_splittings(space), BudgetExceeded);
  // Extended mode admits genus 3 only while p^6 <= 1000.
  EXPECT_NO_THROW(check_splitting_budget(SymplecticSpace(3, PrimeModulus(3)), {true}));
  EXPECT_THROW(check_splitting_budget(SymplecticSpace(3, PrimeModulus(5)), {true}), BudgetExceeded);
  EXPECT_THROW(check_splitting_budget(SymplecticSpace(4, PrimeModulus(2)), {true}), BudgetExceeded);
}

TEST(Splittings, ValidationNamesTheProblem) {
  const SymplecticSpace space(2, PrimeModulus(2));
  const Subspace a = span({space.e(0), space.f(0)});
  const Subspace b = span({space.e(1), space.f(1)});
  const Subspace bad = span({space.e(0), space.f(1)});
  EXPECT_NO_THROW(validate_splitting(space, {a, b}));
  EXPECT_THROW(validate_splitting(space, {a, bad}), DomainError);
  EXPECT_THROW(validate_splitting(space, {a}), DomainError);
}

TEST(Refinement, IsAPartialOrder) {
  const auto all = enumerate_splittings(SymplecticSpace(2, PrimeModulus(3)));
  for (const auto& a : all) {
    EXPECT_TRUE(refinement_leq(a, a));
    for (const auto& b : all) {
      if (a != b && refinement_leq(a, b)) EXPECT_FALSE(refinement_leq(b, a));
      for (const auto& c : all)
        if (refinement_leq(a, b) && refinement_leq(b, c)) EXPECT_TRUE(refinement_leq(a, c));
    }
  }
}

TEST(Projection, ComponentsSumBack) {
  gen::Rng rng(22);
  const PrimeModulus p(3);
  const auto all = enumerate_splittings(SymplecticSpace(2, p));
  for (int t = 0; t < 300; ++t) {
    const auto& s = all[rng.below(all.size())];
    const FpVector x(p, rng.vec(4, 3));
    FpVector sum(p, 4);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const FpVector c = component_projection(x, s, i);
      EXPECT_TRUE(s.part(i).contains(c));
      sum += c;
    }
    EXPECT_EQ(sum, x);
  }
}

TEST(Separation, HyperbolicBasisSplitsAndPathDoesNot) {
  const SymplecticSpace space(2, PrimeModulus(2));
  const std::vector<FpVector> hyperbolic{space.e(0), space.f(0), space.e(1), space.f(1)};
  const auto r = separation_components(space, hyperbolic);
  EXPECT_TRUE(r.separated);
  EXPECT_EQ(r.components, (std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}}));
  const std::vector<FpVector> path{space.e(0), space.f(0), space.e(0) + space.e(1), space.f(1)};
  EXPECT_FALSE(separation_components(space, path).separated);
  const SymplecticSpace one(1, PrimeModulus(5));
  EXPECT_FALSE(separation_components(one, std::vector<FpVector>{one.e(0), one.f(0)}).separated);
  EXPECT_THROW(separation_components(space, std::vector<FpVector>{space.e(0), space.e(0), space.f(0), space.f(1)}),
               DomainError);
}

TEST(Separation, AgreesWithSplittingSearchOnChainAndRandomBases) {
  for (std::uint32_t p : {2u, 3u}) {
    const auto r = separation_oracle::compare(2, p, 300, 23);
    EXPECT_EQ(r.mismatches, 0u) << r.first_mismatch;
    EXPECT_GT(r.chain_bases, 0u);
    EXPECT_GE(r.separated_seen, r.adapted_bases);
  }
}

TEST(ChainBases, SatisfyTheFormConditions) {
  for (std::uint32_t p : {2u, 3u}) {
    const SymplecticSpace space(2, PrimeModulus(p));
    std::size_t count = 0;
    for_each_chain_basis(space, [&](std::span<const FpVector> b) {
      ++count;
      for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j)
          EXPECT_EQ(space.omega(b[i], b[j]), j == i + 1 ? 1u : 0u);
      EXPECT_EQ(span(b).dim(), 4u);
    });
    EXPECT_GT(count, 0u);
  }
}
