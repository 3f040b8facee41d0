#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>

#include "oracles.hpp"
#include "stw/error.hpp"
#include "stw/steinberg.hpp"

using namespace stw;

namespace {

// Apartment by the definition: every ordering of B, signed by its inversion
// count, contributes the flag of its partial spans.
IntVector apartment_by_permutations(const std::vector<FpVector>& b, const BuildingContext& ctx) {
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::map<std::uint64_t, std::int64_t> acc;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j];
    CompleteFlag f;
    std::vector<FpVector> prefix;
    for (std::size_t k = 0; k + 1 < perm.size(); ++k) {
      prefix.push_back(b[perm[k]]);
      f.spaces.push_back(span(prefix));
    }
    acc[ctx.flag_index(f)] += inversions % 2 ? -1 : 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  IntVector v;
  for (const auto& [i, c] : acc)
    if (c) v.entries.emplace_back(static_cast<std::uint32_t>(i), c);
  return v;
}

std::vector<FpVector> random_basis(gen::Rng& rng, std::size_t n, std::uint32_t p) {
  for (;;) {
    std::vector<oracle::Vec> raw;
    for (std::size_t i = 0; i < n; ++i) raw.push_back(rng.vec(n, p));
    if (oracle::dim_of(raw, n, p) != n) continue;
    std::vector<FpVector> b;
    for (auto& v : raw) b.emplace_back(PrimeModulus(p), v);
    return b;
  }
}

IntVector negate(IntVector v) {
  for (auto& [i, c] : v.entries) c = -c;
  return v;
}

}  // namespace

TEST(Apartments, MatchThePermutationSum) {
  gen::Rng rng(51);
  for (auto [n, p] : {std::pair<std::size_t, std::uint32_t>{3, 2}, {3, 3}, {4, 2}}) {
    auto ctx = BuildingContext::get(n, PrimeModulus(p));
    for (int t = 0; t < 40; ++t) {
      const auto b = random_basis(rng, n, p);
      EXPECT_EQ(apartment_vector(b, *ctx), apartment_by_permutations(b, *ctx));
    }
  }
}

TEST(Apartments, SignScalingAndDependence) {
  gen::Rng rng(52);
  auto ctx = BuildingContext::get(4, PrimeModulus(3));
  for (int t = 0; t < 40; ++t) {
    auto b = random_basis(rng, 4, 3);
    const IntVector a = apartment_vector(b, *ctx);
    auto swapped = b;
    std::swap(swapped[0], swapped[2]);
    EXPECT_EQ(apartment_vector(swapped, *ctx), negate(a));
    auto scaled = b;
    scaled[1] = scaled[1].scaled(2);
    EXPECT_EQ(apartment_vector(scaled, *ctx), a);
    auto dependent = b;
    dependent[3] = b[0] + b[1];
    EXPECT_TRUE(apartment_vector(dependent, *ctx).empty());
    const NormalizedTuple nt = normalize(b);
    IntVector signed_norm = apartment_vector(nt.vectors, *ctx);
    if (nt.sign < 0) signed_norm = negate(signed_norm);
    EXPECT_EQ(signed_norm, a);
  }
}

TEST(Apartments, RejectZeroVectors) {
  auto ctx = BuildingContext::get(2, PrimeModulus(2));
  const std::vector<FpVector> b{FpVector(PrimeModulus(2), 2), FpVector::unit(PrimeModulus(2), 2, 0)};
  EXPECT_THROW(apartment_vector(b, *ctx), DomainError);
}

TEST(SteinbergDimension, SaturatesAtTheSolomonTitsValue) {
  for (auto [n, p] : {std::pair<std::size_t, std::uint32_t>{2, 2}, {2, 3}, {2, 5}, {3, 2}, {3, 3}, {4, 2}}) {
    const std::uint64_t expected = oracle::ipow(p, n * (n - 1) / 2);
    EXPECT_EQ(steinberg_dimension(n, p), expected);
    const SpanResult r = st_dim(n, PrimeModulus(p));
    EXPECT_EQ(r.rank, expected) << n << "," << p;
    EXPECT_TRUE(r.reached_ceiling);
  }
}

TEST(SteinbergDimension, ExactModeAgrees) {
  StDimOptions o;
  o.engine = RankEngineConfig::exact_mode();
  EXPECT_EQ(st_dim(3, PrimeModulus(3), o).rank, 27u);
}

TEST(SteinbergDimension, AllApartmentsSpanNoMoreThanNormalizedOnes) {
  // Every ordered basis of F_2^3, not just the normalized ones: the span is still 8.
  auto ctx = BuildingContext::get(3, PrimeModulus(2));
  SpanBasis all(ctx->flag_count(), RankEngineConfig::exact_mode());
  for (std::uint64_t a = 1; a < 8; ++a)
    for (std::uint64_t b = 1; b < 8; ++b)
      for (std::uint64_t c = 1; c < 8; ++c) {
        std::vector<FpVector> t{FpVector::from_code(PrimeModulus(2), 3, a), FpVector::from_code(PrimeModulus(2), 3, b),
                                FpVector::from_code(PrimeModulus(2), 3, c)};
        all.insert(apartment_vector(t, *ctx));
      }
  EXPECT_EQ(all.rank(), 8u);
}

TEST(Relations, AllFourHoldOnRandomInstances) {
  for (auto [n, p] : {std::pair<std::size_t, std::uint32_t>{3, 2}, {3, 3}, {4, 2}}) {
    const RelationReport r = relation_checks(BuildingContext::get(n, PrimeModulus(p)), 100, 53);
    ASSERT_EQ(r.relations.size(), 4u);
    for (const auto& o : r.relations) {
      EXPECT_EQ(o.instances, 100u) << o.name;
      EXPECT_TRUE(o.ok()) << o.name << " " << o.counterexample;
    }
  }
}

TEST(Snapshots, StDimResumesFromCheckpoint) {
  const auto path = std::filesystem::temp_directory_path() / "stw-test-stdim.snap";
  std::filesystem::remove(path);
  StDimOptions o;
  o.snapshot_path = path.string();
  o.checkpoint_every = 10;
  EXPECT_EQ(st_dim(3, PrimeModulus(3), o).rank, 27u);
  EXPECT_EQ(st_dim(3, PrimeModulus(3), o).rank, 27u);
  std::filesystem::remove(path);
}
