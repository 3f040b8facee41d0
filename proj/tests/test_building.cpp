#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"
#include "stw/building.hpp"
#include "stw/error.hpp"
#include "stw/steinberg.hpp"

using namespace stw;

TEST(Flags, CountsMatchChainEnumeration) {
  struct Case {
    std::size_t n;
    std::uint32_t p;
    std::uint64_t expected;
  };
  for (const Case c : {Case{3, 2, 21}, Case{3, 3, 52}, Case{4, 2, 315}, Case{4, 3, 2080}}) {
    EXPECT_EQ(oracle::count_complete_flags(c.n, c.p), c.expected);
    EXPECT_EQ(complete_flag_count(c.n, c.p), c.expected);
    EXPECT_EQ(BuildingContext::get(c.n, PrimeModulus(c.p))->flag_count(), c.expected);
  }
}

TEST(Flags, IndexRoundTripsAndChainsNest) {
  for (auto [n, p] : {std::pair<std::size_t, std::uint32_t>{3, 3}, {4, 2}}) {
    auto ctx = BuildingContext::get(n, PrimeModulus(p));
    for (std::uint64_t i = 0; i < ctx->flag_count(); ++i) {
      const CompleteFlag f = ctx->decode(i);
      ASSERT_EQ(f.spaces.size(), n - 1);
      for (std::size_t k = 0; k < f.spaces.size(); ++k) {
        EXPECT_EQ(f.spaces[k].dim(), k + 1);
        if (k) EXPECT_TRUE(f.spaces[k].contains(f.spaces[k - 1]));
      }
      EXPECT_EQ(ctx->flag_index(f), i);
    }
  }
}

TEST(Flags, BudgetGuard) {
  EXPECT_THROW(BuildingContext(5, PrimeModulus(3), 1000), BudgetExceeded);
}

TEST(OppositeFlags, CountIsSteinbergDimensionAndMatchesDefinition) {
  for (auto [n, p] : {std::pair<std::size_t, std::uint32_t>{3, 2}, {3, 3}, {4, 2}}) {
    auto ctx = BuildingContext::get(n, PrimeModulus(p));
    const auto cols = opposite_flag_columns(*ctx);
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < ctx->flag_count(); ++i) {
      // Reference flag C_k spans the last k unit vectors; opposite means F_k meets C_(n-k) in 0.
      const CompleteFlag f = ctx->decode(i);
      bool opposite = true;
      for (std::size_t k = 1; k < n && opposite; ++k) {
        std::vector<oracle::Vec> c_gens, f_gens;
        for (std::size_t j = k; j < n; ++j) {
          oracle::Vec e(n, 0);
          e[j] = 1;
          c_gens.push_back(e);
        }
        for (const auto& b : f.spaces[k - 1].basis_vectors()) f_gens.emplace_back(b.entries().begin(), b.entries().end());
        const auto cs = oracle::span_set(c_gens, n, p), fs = oracle::span_set(f_gens, n, p);
        for (auto x : fs)
          if (x != 0 && cs.count(x)) opposite = false;
      }
      EXPECT_EQ(cols[i] >= 0, opposite) << i;
      if (cols[i] >= 0) EXPECT_EQ(static_cast<std::uint64_t>(cols[i]), count++);
    }
    EXPECT_EQ(count, oracle::ipow(p, n * (n - 1) / 2));
  }
}

TEST(ChainComplex, BoundaryOfBoundaryVanishes) {
  auto ctx = BuildingContext::get(4, PrimeModulus(2));
  const BuildingChainComplex complex(ctx);
  for (int r = 1; r <= complex.top_degree(); ++r) {
    const auto& outer = complex.boundary(r);
    const auto& inner = complex.boundary(r - 1);
    for (const auto& col : outer) {
      std::map<std::uint32_t, std::int64_t> acc;
      for (const auto& [i, c] : col.entries)
        for (const auto& [j, d] : inner[i].entries) acc[j] += c * d;
      for (const auto& [j, v] : acc) EXPECT_EQ(v, 0) << "degree " << r << " row " << j;
    }
  }
}

TEST(ChainComplex, HomologyIsConcentratedInTopDegree) {
  for (auto [n, p] : {std::pair<std::size_t, std::uint32_t>{2, 5}, {3, 2}, {3, 3}}) {
    const BuildingChainComplex complex(BuildingContext::get(n, PrimeModulus(p)));
    const auto h = homology_ranks(complex, RankEngineConfig::modular());
    EXPECT_TRUE(h.exact) << "small buildings use exact ranks";
    EXPECT_EQ(h.betti.back(), static_cast<std::int64_t>(oracle::ipow(p, n * (n - 1) / 2)));
    for (std::size_t i = 0; i + 1 < h.betti.size(); ++i) EXPECT_EQ(h.betti[i], 0);
    EXPECT_EQ(h.euler_betti, h.euler_chains);
  }
}

TEST(ChainComplex, DefaultModeRefusesLargeBuildings) {
  EXPECT_THROW(BuildingChainComplex(BuildingContext::get(4, PrimeModulus(3))), BudgetExceeded);
}

TEST(Cycles, ApartmentsAreCyclesAndSingleFlagsAreNot) {
  auto ctx = BuildingContext::get(3, PrimeModulus(3));
  gen::Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    std::vector<FpVector> b;
    for (int i = 0; i < 3; ++i) b.emplace_back(PrimeModulus(3), rng.nonzero_vec(3, 3));
    EXPECT_TRUE(is_cycle(apartment_vector(b, *ctx), *ctx));
  }
  IntVector single;
  single.entries.emplace_back(0, 1);
  EXPECT_FALSE(is_cycle(single, *ctx));
}
