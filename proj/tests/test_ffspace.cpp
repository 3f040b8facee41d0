#include <gtest/gtest.h>

#include <iterator>

#include "oracles.hpp"
#include "stw/building.hpp"
#include "stw/error.hpp"
#include "stw/ffspace.hpp"

using namespace stw;

namespace {

FpVector fp(const oracle::Vec& v, std::uint32_t p) { return FpVector(PrimeModulus(p), v); }

std::set<std::uint64_t> closure(const Subspace& s) {
  std::vector<oracle::Vec> rows;
  for (const auto& b : s.basis_vectors()) rows.emplace_back(b.entries().begin(), b.entries().end());
  return oracle::span_set(rows, s.ambient_dim(), s.modulus().value());
}

}  // namespace

TEST(PrimeModulus, RejectsComposites) {
  EXPECT_THROW(PrimeModulus(4), DomainError);
  EXPECT_THROW(PrimeModulus(1), DomainError);
  EXPECT_NO_THROW(PrimeModulus(7));
  EXPECT_EQ(PrimeModulus(5).inv(2), 3u);
}

TEST(FpVector, CodeRoundTrip) {
  const PrimeModulus p(3);
  for (std::uint64_t c = 0; c < 81; ++c) {
    const FpVector v = FpVector::from_code(p, 4, c);
    EXPECT_EQ(v.code(), c);
    EXPECT_EQ(oracle::encode(oracle::Vec(v.entries().begin(), v.entries().end()), 3), c);
  }
}

TEST(Subspaces, CountsMatchExhaustiveTupleCount) {
  struct Case {
    std::size_t n, k;
    std::uint32_t p;
  };
  for (const Case c : {Case{4, 2, 2}, Case{4, 1, 2}, Case{3, 1, 3}, Case{3, 2, 3}, Case{2, 1, 5}, Case{4, 3, 2}}) {
    const std::uint64_t brute = oracle::count_subspaces(c.n, c.k, c.p);
    EXPECT_EQ(enumerate_subspaces(c.n, PrimeModulus(c.p), c.k).size(), brute) << c.n << " " << c.k << " " << c.p;
    EXPECT_EQ(gaussian_binomial(c.n, c.k, c.p), brute);
  }
  EXPECT_EQ(gaussian_binomial(4, 2, 2), 35u);
}

TEST(Subspaces, EnumeratedAreCanonicalAndDistinct) {
  const PrimeModulus p(2);
  const auto all = enumerate_subspaces(4, p, 2);
  std::set<std::set<std::uint64_t>> seen;
  for (const auto& s : all) {
    EXPECT_EQ(span(s.basis_vectors()), s);  // re-echelonizing is a fixed point
    EXPECT_TRUE(seen.insert(closure(s)).second);
  }
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Subspaces, SpanMatchesClosureOnRandomTuples) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint32_t p = trial % 2 ? 3 : 2;
    const std::size_t n = 2 + rng.below(3);
    std::vector<oracle::Vec> gens;
    std::vector<FpVector> vs;
    for (std::size_t i = 0, m = 1 + rng.below(4); i < m; ++i) {
      gens.push_back(rng.vec(n, p));
      vs.push_back(fp(gens.back(), p));
    }
    const Subspace s = span(PrimeModulus(p), n, vs);
    EXPECT_EQ(closure(s), oracle::span_set(gens, n, p));
    EXPECT_EQ(s.dim(), oracle::dim_of(gens, n, p));
  }
}

TEST(Subspaces, SumAndIntersectionAgreeWithSetOperations) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t p = trial % 3 == 0 ? 3 : 2;
    const std::size_t n = 4;
    std::vector<FpVector> a, b;
    for (std::size_t i = 0, m = 1 + rng.below(3); i < m; ++i) a.push_back(fp(rng.vec(n, p), p));
    for (std::size_t i = 0, m = 1 + rng.below(3); i < m; ++i) b.push_back(fp(rng.vec(n, p), p));
    const Subspace A = span(PrimeModulus(p), n, a), B = span(PrimeModulus(p), n, b);
    const auto ca = closure(A), cb = closure(B);
    std::set<std::uint64_t> meet;
    std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::inserter(meet, meet.end()));
    EXPECT_EQ(closure(intersect(A, B)), meet);
    const Subspace S = subspace_sum(A, B);
    EXPECT_EQ(S.dim() + intersect(A, B).dim(), A.dim() + B.dim());
    for (auto c : ca) EXPECT_TRUE(S.contains(FpVector::from_code(PrimeModulus(p), n, c)));
  }
}

TEST(Subspaces, CoordinatesInvertEmbed) {
  gen::Rng rng(13);
  const PrimeModulus p(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FpVector> gens{fp(rng.nonzero_vec(4, 5), 5), fp(rng.nonzero_vec(4, 5), 5)};
    const Subspace s = span(p, 4, gens);
    for (const auto& g : gens) EXPECT_EQ(s.embed(s.coordinates(g)), g);
  }
}

TEST(Enumeration, BudgetGuard) {
  EXPECT_THROW(all_vectors(20, PrimeModulus(3), 1000), BudgetExceeded);
  EXPECT_EQ(projective_points(3, PrimeModulus(2)).size(), 7u);
}
