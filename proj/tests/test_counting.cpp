#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stw/counting.hpp"
#include "stw/error.hpp"

using namespace stw;

namespace {

BigInt big_pow(std::uint64_t b, std::size_t e) {
  BigInt r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

Rational factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
  return Rational(f);
}

}  // namespace

TEST(Partitions, CountsMatchRecursion) {
  for (std::size_t n = 1; n <= 40; ++n) {
    EXPECT_EQ(partition_count(n), BigInt(static_cast<unsigned long>(oracle::partitions_brute(n, n)))) << n;
    if (n <= 20) EXPECT_EQ(partitions(n).size(), oracle::partitions_brute(n, n));
  }
  EXPECT_EQ(partition_count(100).get_str(), "190569292");
  EXPECT_EQ(partition_count(200).get_str(), "3972999029388");
}

TEST(Partitions, ReverseLexOrderAndFormatting) {
  std::vector<std::string> names;
  for (const auto& p : partitions(4)) names.push_back(p.to_string());
  EXPECT_EQ(names, (std::vector<std::string>{"(4)", "(3,1)", "(2^2)", "(2,1^2)", "(1^4)"}));
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto all = partitions(n);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) EXPECT_GT(all[i].expanded(), all[i + 1].expanded());
    for (const auto& p : all) EXPECT_EQ(p.size(), n);
  }
  EXPECT_THROW(partitions(0), DomainError);
  EXPECT_THROW(for_each_partition(201, [](const Partition&) {}), DomainError);
}

TEST(SymplecticOrder, MatchesExhaustiveCount) {
  EXPECT_EQ(sp_order(1, 2), BigInt(static_cast<unsigned long>(oracle::brute_sp_order(1, 2))));
  EXPECT_EQ(sp_order(1, 3), BigInt(static_cast<unsigned long>(oracle::brute_sp_order(1, 3))));
  EXPECT_EQ(sp_order(1, 5), BigInt(static_cast<unsigned long>(oracle::brute_sp_order(1, 5))));
  EXPECT_EQ(sp_order(2, 2), BigInt(static_cast<unsigned long>(oracle::brute_sp_order(2, 2))));
  EXPECT_EQ(sp_order(2, 2), 720);
  EXPECT_EQ(sp_order(3, 2).get_str(), "1451520");
}

TEST(Theta, EqualsLambdaAcrossPrimes) {
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    const auto th = theta_sequence(10, p);
    for (std::size_t g = 1; g <= 10; ++g) {
      EXPECT_EQ(th[g - 1], lambda(g, p)) << g << "," << p;
      EXPECT_EQ(lambda(g, p), Rational(1) / Rational(BigInt(static_cast<unsigned long>(g)) * (big_pow(p, 2 * g) - 1)));
    }
  }
  EXPECT_THROW(theta_sequence(51, 2), DomainError);
}

TEST(ExponentialFormula, PartitionSumAndSeriesAgreeWithRatio) {
  for (std::uint32_t p : {2u, 3u, 5u}) {
    std::vector<Rational> lam;
    for (std::size_t g = 1; g <= 10; ++g) lam.push_back(lambda(g, p));
    const auto series = exp_series(lam, 10);
    EXPECT_EQ(series[0], 1);
    for (std::size_t g = 1; g <= 10; ++g) {
      const Rational ratio = Rational(big_pow(p, g * (2 * g - 1))) / Rational(sp_order(g, p));
      EXPECT_EQ(solomon_tits_ratio(g, p), ratio);
      EXPECT_EQ(partition_exponential_sum(g, lam), ratio) << g;
      EXPECT_EQ(series[g], ratio) << g;
    }
  }
}

TEST(ExponentialFormula, HandExpandedLowDegrees) {
  const std::vector<Rational> s{Rational(2), Rational(3), Rational(5)};
  // exp(2x + 3x^2 + 5x^3): 1 + 2x + (3 + 2)x^2 + (5 + 6 + 4/3)x^3
  EXPECT_EQ(partition_exponential_sum(2, s), Rational(5));
  EXPECT_EQ(partition_exponential_sum(3, s), Rational(37, 3));
  EXPECT_EQ(exp_series(s, 3)[3], Rational(37, 3));
  EXPECT_EQ(factorial(3), Rational(6));
}

TEST(Euler, TruncationsMatchBothWays) {
  for (std::size_t g = 1; g <= 10; ++g) {
    for (std::size_t H : {g, g + 3}) {
      for (std::uint32_t p : {2u, 3u, 5u}) {
        const EulerCheck e = euler_product_check(g, H, p);
        EXPECT_TRUE(e.series_agree) << g << " " << H;
        EXPECT_GE(e.valuation, e.required) << g << " " << H << " " << p;
      }
    }
  }
  EXPECT_THROW(euler_product_check(5, 3, 2), DomainError);
}

TEST(Euler, SmallProductsByHand) {
  // prod_{h=0}^{1} (1 - Q^h x) = 1 - (1 + Q) x + Q x^2
  EXPECT_EQ(truncated_product_coeff(1, 1), (IntPolynomial{-1, -1}));
  EXPECT_EQ(truncated_product_coeff(2, 1), (IntPolynomial{0, 1}));
  // Q / ((1 - Q)(1 - Q^2)) = Q + Q^2 + 2Q^3 + 2Q^4 + ...
  EXPECT_EQ(euler_series(2, 5), (IntPolynomial{0, 1, 1, 2, 2}));
  EXPECT_EQ(padic_valuation(Rational(12, 5), 2), 2);
  EXPECT_EQ(padic_valuation(Rational(3, 40), 2), -3);
  EXPECT_THROW(padic_valuation(Rational(0), 2), DomainError);
}

TEST(SplittingCounts, ClosedFormValues) {
  EXPECT_EQ(splitting_count(Partition::from_parts({1, 1}), 2, 2, false), 10);
  EXPECT_EQ(splitting_count(Partition::from_parts({1, 1}), 2, 3, false), 45);
  EXPECT_EQ(splitting_count(Partition::from_parts({2, 1}), 3, 2, false), 336);
  EXPECT_EQ(splitting_count(Partition::from_parts({1, 1, 1}), 3, 2, false), 1120);
  EXPECT_EQ(splitting_count(Partition::from_parts({1, 1}), 2, 2, true), 20);
  EXPECT_THROW(splitting_count(Partition::from_parts({2, 1}), 2, 2, false), DomainError);
}

TEST(SplittingCounts, SumOfStnsOverSplittingsIsSteinbergDimension) {
  // The decomposition predicts p^(2g choose 2) = sum over types of count * prod bounds.
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    for (std::size_t g = 1; g <= 8; ++g) {
      BigInt total = 0;
      for_each_partition(g, [&](const Partition& t) {
        BigInt term = splitting_count(t, g, p, false);
        for (auto a : t.expanded()) term *= main_bound(a, p).bound;
        total += term;
      });
      EXPECT_EQ(total, big_pow(p, g * (2 * g - 1))) << g << "," << p;
    }
  }
}

TEST(Bound, ValuesIntegralityAndTable) {
  EXPECT_EQ(main_bound(2, 2).bound, 24);
  EXPECT_EQ(main_bound(2, 3).bound, 324);
  EXPECT_EQ(main_bound(3, 2).bound, 7680);
  EXPECT_EQ(main_bound(3, 3).bound, 4199040);
  EXPECT_EQ(main_bound(4, 2).bound.get_str(), "46448640");
  EXPECT_EQ(main_bound(1, 5).bound, 5);
  for (std::size_t g = 1; g <= 10; ++g)
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
      const auto b = main_bound(g, p);
      EXPECT_EQ(b.bound * BigInt(static_cast<unsigned long>(g)) * (big_pow(p, 2 * g) - 1), sp_order(g, p));
      EXPECT_EQ(b.stns_dim + b.stsep_dim, b.st_dim);
      EXPECT_EQ(b.theta, b.lambda);
    }
  std::vector<std::pair<std::size_t, std::uint32_t>> flagged;
  for (const auto& [g, p] : remark_table_cells())
    if (main_bound(g, p).discrepant()) flagged.emplace_back(g, p);
  EXPECT_EQ(flagged, (std::vector<std::pair<std::size_t, std::uint32_t>>{{2, 3}, {3, 2}, {4, 2}, {4, 3}}));
  EXPECT_EQ(remark_table_value(2, 3), BigInt(216));
  EXPECT_FALSE(remark_table_value(5, 2).has_value());
}

TEST(Bound, CsvRowsHaveTheHeaderShape) {
  const auto header = bound_csv_header();
  const auto row = bound_csv_row(main_bound(4, 2));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_NE(row.find("92897280"), std::string::npos);
}
