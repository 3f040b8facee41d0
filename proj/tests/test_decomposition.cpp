#include <gtest/gtest.h>

#include "oracles.hpp"
#include "separation_oracle.hpp"
#include "stw/counting.hpp"
#include "stw/decomposition.hpp"
#include "stw/error.hpp"

using namespace stw;

namespace {

// dim of the span of every separated apartment, with separatedness decided by
// the brute-force splitting search and bases drawn as sets of projective points.
std::size_t stsep_by_definition(std::size_t g, std::uint32_t p) {
  const std::size_t n = 2 * g;
  const separation_oracle::Searcher search(g, p);
  auto ctx = BuildingContext::get(n, PrimeModulus(p));
  std::vector<oracle::Vec> points;
  for (std::uint64_t c = 1; c < oracle::ipow(p, n); ++c) {
    const auto v = oracle::decode(c, n, p);
    const auto lead = std::find_if(v.begin(), v.end(), [](auto x) { return x != 0; });
    if (*lead == 1) points.push_back(v);
  }
  SpanBasis span(ctx->flag_count(), RankEngineConfig::modular());
  std::vector<std::size_t> idx(n);
  auto rec = [&](auto&& self, std::size_t depth, std::size_t from) -> void {
    if (depth == n) {
      std::vector<oracle::Vec> raw;
      for (auto i : idx) raw.push_back(points[i]);
      if (oracle::dim_of(raw, n, p) != n) return;
      std::vector<FpVector> b;
      for (auto& v : raw) b.emplace_back(PrimeModulus(p), v);
      if (search.separated(b)) span.insert(apartment_vector(b, *ctx));
      return;
    }
    for (std::size_t i = from; i < points.size(); ++i) {
      idx[depth] = i;
      self(self, depth + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
  return span.rank();
}

const SymplecticSplitting& standard_pair(const std::vector<SymplecticSplitting>& all, const SymplecticSpace& space) {
  const auto target = validate_splitting(space, {span({space.e(0), space.f(0)}), span({space.e(1), space.f(1)})});
  return *std::find(all.begin(), all.end(), target);
}

}  // namespace

TEST(SeparatedSpan, TwoPartGeneratorsMatchTheFullDefinition) {
  EXPECT_EQ(stsep_by_definition(2, 2), 40u);
  EXPECT_EQ(stsep_dim(2, PrimeModulus(2)), 40u);
  EXPECT_EQ(stsep_by_definition(2, 3), 405u);
  EXPECT_EQ(stsep_dim(2, PrimeModulus(3)), 405u);
}

TEST(SeparatedSpan, GenusOneHasNothingSeparated) {
  for (std::uint32_t p : {2u, 3u, 5u}) {
    EXPECT_EQ(stsep_dim(1, PrimeModulus(p)), 0u);
    EXPECT_EQ(stns_dim(1, PrimeModulus(p)), p);
  }
}

TEST(SeparatedSpan, RestrictedCoordinatesAgreeWithFullCoordinates) {
  for (std::uint32_t p : {2u, 3u}) {
    DecompositionOptions full, restricted;
    restricted.restricted_ambient = true;
    EXPECT_EQ(stsep_dim(2, PrimeModulus(p), full), stsep_dim(2, PrimeModulus(p), restricted));
    EXPECT_EQ(stns_dim(2, PrimeModulus(p), full), stns_dim(2, PrimeModulus(p), restricted));
    AuditSelection sel;
    sel.inc_identity = sel.cross_projection = sel.vdec_equals_stsep = false;
    const auto a = poset_rep_audit(2, PrimeModulus(p), full, sel);
    const auto b = poset_rep_audit(2, PrimeModulus(p), restricted, sel);
    EXPECT_TRUE(b.restricted_ambient);
    EXPECT_EQ(b.dense_primes.size(), 2u);
    EXPECT_EQ(a.step1_quotient_rank, b.step1_quotient_rank);
    EXPECT_EQ(a.stns_sum, b.stns_sum);
  }
}

TEST(SeparatedSpan, ExactEngineAgrees) {
  DecompositionOptions o;
  o.engine = RankEngineConfig::exact_mode();
  EXPECT_EQ(stns_dim(2, PrimeModulus(2), o), 24u);
}

TEST(TensorProduct, MixedRadixLayout) {
  IntVector a, b;
  a.entries = {{0, 2}, {2, -1}};
  b.entries = {{1, 3}};
  const std::vector<IntVector> f{a, b};
  const std::vector<std::uint64_t> sizes{3, 4};
  const IntVector t = tensor_product(f, sizes);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_EQ(t.entries[0], (std::pair<std::uint32_t, std::int64_t>{1, 6}));
  EXPECT_EQ(t.entries[1], (std::pair<std::uint32_t, std::int64_t>{9, -3}));
}

TEST(Projection, PiAfterIncIsIdentityOnRandomProducts) {
  gen::Rng rng(61);
  for (std::uint32_t p : {2u, 3u}) {
    const PrimeModulus mod(p);
    for (const auto& s : enumerate_splittings(SymplecticSpace(2, mod))) {
      const TensorFlagBasis f(s);
      for (int t = 0; t < 20; ++t) {
        PartTuples b(f.parts());
        for (std::size_t i = 0; i < f.parts(); ++i) {
          const std::size_t m = s.part(i).dim();
          while (b[i].size() < m) {
            const FpVector chart(mod, rng.vec(m, p));
            if (!chart.is_zero()) b[i].push_back(f.from_chart(chart, i));
          }
        }
        EXPECT_EQ(f.pi(f.inc(b)), to_rational(f.tensor_generator(b)));
      }
    }
  }
}

TEST(Projection, OrderedProjectionsAverageToPi) {
  const SymplecticSpace space(2, PrimeModulus(3));
  const auto all = enumerate_splittings(space);
  const TensorFlagBasis f(standard_pair(all, space));
  gen::Rng rng(62);
  auto ctx = BuildingContext::get(4, PrimeModulus(3));
  for (int t = 0; t < 20; ++t) {
    std::vector<FpVector> b;
    for (int i = 0; i < 4; ++i) b.emplace_back(PrimeModulus(3), rng.nonzero_vec(4, 3));
    const IntVector x = apartment_vector(b, *ctx);
    RatVector sum;
    for (const auto& o : orderings(f.splitting())) sum = add_scaled(sum, to_rational(f.chainproj_ordered(x, o)), Rational(1, 2));
    sum.canonicalize();
    EXPECT_EQ(sum, f.pi(x));
  }
}

TEST(ChainBases, SomeSurviveProjectionToTheStandardSplitting) {
  // (f2, e2, f1+f2, e1) over F_2 is a chain basis whose first two vectors span
  // a part of {<e1,f1>, <e2,f2>}; with that part ordered first the projection
  // keeps it, so pi_S of its apartment is not zero.
  const SymplecticSpace space(2, PrimeModulus(2));
  const std::vector<FpVector> b{space.f(1), space.e(1), space.f(0) + space.f(1), space.e(0)};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) EXPECT_EQ(space.omega(b[i], b[j]), j == i + 1 ? 1u : 0u);
  const auto all = enumerate_splittings(space);
  const TensorFlagBasis f(standard_pair(all, space));
  auto ctx = BuildingContext::get(4, PrimeModulus(2));
  EXPECT_FALSE(f.pi(apartment_vector(b, *ctx)).empty());

  AuditSelection sel;
  sel.inc_identity = sel.cross_projection = sel.vdec_equals_stsep = sel.step1 = false;
  sel.chain_bases_vanish = true;
  const auto rep = poset_rep_audit(2, PrimeModulus(2), {}, sel);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_EQ(rep.checks[0].instances, 7200u);
  EXPECT_EQ(rep.checks[0].instances - rep.checks[0].passed, 2160u);
}

TEST(CrossProjection, HoldsForNonRefiningPairs) {
  const auto all = enumerate_splittings(SymplecticSpace(2, PrimeModulus(2)));
  std::size_t tested = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      if (refinement_leq(a, b)) {
        if (a != b) EXPECT_THROW(cross_projection_check(a, b, all, RankEngineConfig::modular()), DomainError);
        continue;
      }
      EXPECT_TRUE(cross_projection_check(a, b, all, RankEngineConfig::modular()));
      ++tested;
    }
  EXPECT_EQ(tested, 100u);
}

TEST(Audit, GenusTwoDecomposesAsExpected) {
  AuditSelection sel;
  sel.all_cross_pairs = true;
  sel.product_isomorphism = true;
  const auto rep = poset_rep_audit(2, PrimeModulus(2), {}, sel);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.audit_ok());
  EXPECT_EQ(rep.stns_rank, 24u);
  EXPECT_EQ(rep.step1_quotient_rank, 24u);
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& row : rep.rows) {
    if (row.type.size() == 2) {
      EXPECT_EQ(row.count, 10u);
      EXPECT_EQ(row.stns_dim, 4u);
    }
  }
  for (const auto& c : rep.checks) EXPECT_TRUE(c.ok()) << c.name;
}

TEST(Audit, GenusThreeNeedsExtendedMode) {
  EXPECT_THROW(stns_dim(3, PrimeModulus(2)), BudgetExceeded);
}
