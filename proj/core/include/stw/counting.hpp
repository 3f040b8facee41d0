#pragma once

// Exact combinatorics: partitions, |Sp_2g(F_p)|, the theta/lambda sequences,
// Euler's product, the exponential formula, splitting counts and the bound
// |Sp_2g(F_p)| / (g (p^2g - 1)).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stw/sparse.hpp"

namespace stw {

/// (a_1^r_1, ..., a_l^r_l) with a_1 > a_2 > ... and every r_i >= 1.
struct Partition {
  std::vector<std::pair<std::size_t, std::size_t>> parts;  // (a_i, r_i)

  std::size_t size() const noexcept;  // sum a_i r_i
  /// Part sizes with multiplicity, largest first.
  std::vector<std::size_t> expanded() const;
  static Partition from_parts(std::vector<std::size_t> sizes);
  std::string to_string() const;  // "(2,1^2)"

  friend bool operator==(const Partition&, const Partition&) = default;
};

inline constexpr std::size_t kMaxPartitionN = 200;

/// Visits the partitions of n in reverse lexicographic order of the expanded
/// parts: (n), (n-1,1), ..., (1^n). Throws DomainError unless 1 <= n <= 200.
void for_each_partition(std::size_t n, const std::function<void(const Partition&)>& visit);
/// All partitions of n in the same order. Materializing is only sensible for
/// modest n; p(200) is about 4e12.
std::vector<Partition> partitions(std::size_t n);
/// p(n) by Euler's pentagonal recurrence.
BigInt partition_count(std::size_t n);

/// p^(g^2) prod_{i=1}^{g} (p^(2i) - 1).
BigInt sp_order(std::size_t g, std::uint32_t p);
/// 1 / (g (p^(2g) - 1)).
Rational lambda(std::size_t g, std::uint32_t p);
/// p^binom(2g,2) / |Sp_2g(F_p)|.
Rational solomon_tits_ratio(std::size_t g, std::uint32_t p);
/// p^(g(g-1)) / prod_{i=1}^{g} (p^(2i) - 1).
Rational euler_coeff(std::size_t g, std::uint32_t p);

/// theta_1 .. theta_max_g solved from
///   p^binom(2g,2) / |Sp_2g| = sum over partitions of g of prod theta_a^r / r!,
/// each equation contributing theta_g through the one-part partition (g).
/// Throws DomainError unless 1 <= max_g <= 50, CheckFailure on an inconsistent recurrence.
std::vector<Rational> theta_sequence(std::size_t max_g, std::uint32_t p);
Rational theta(std::size_t g, std::uint32_t p);

/// sum over partitions of g of prod seq[a-1]^r / r!.
Rational partition_exponential_sum(std::size_t g, const std::vector<Rational>& seq);
/// Coefficients 1, c_1, ..., c_max_degree of exp(sum_k seq[k-1] x^k), by n c_n = sum_k k s_k c_{n-k}.
std::vector<Rational> exp_series(const std::vector<Rational>& seq, std::size_t max_degree);

/// Integer polynomial in one variable, coefficient i at index i.
using IntPolynomial = std::vector<BigInt>;

/// Coefficient of x^g in prod_{h=0}^{H} (1 - Q^h x), as a polynomial in Q.
IntPolynomial truncated_product_coeff(std::size_t g, std::size_t H);
/// Power series in Q of Q^binom(g,2) / prod_{i=1}^{g} (1 - Q^i), truncated below Q^terms.
IntPolynomial euler_series(std::size_t g, std::size_t terms);
/// The truncated product coefficient at Q = p^2, as an integer.
BigInt truncated_product_value(std::size_t g, std::size_t H, std::uint32_t p);
/// p-adic valuation of a nonzero rational; throws DomainError for zero.
long padic_valuation(const Rational& q, std::uint32_t p);

struct EulerCheck {
  std::size_t g = 0;
  std::size_t H = 0;
  bool series_agree = false;  // Q-series agree below Q^(H+1), with sign (-1)^g
  long valuation = 0;         // nu_p(truncated value - euler_coeff)
  long required = 0;          // g(g-1) + 2(H+2-g)
  bool ok() const noexcept { return series_agree && valuation >= required; }
};

/// Euler's identity prod_{h>=0}(1 - Q^h x) = sum_g (-1)^g Q^binom(g,2) x^g / prod (1 - Q^i),
/// checked both as Q-series and p-adically at Q = p^2 for truncation depth H >= g.
EulerCheck euler_product_check(std::size_t g, std::size_t H, std::uint32_t p);

/// Splittings of F_p^2g of the given type: |Sp_2g| / prod |Sp_2a|^r, further
/// divided by prod r! when unordered. Throws DomainError unless type is a
/// partition of g, CheckFailure when a division is inexact.
BigInt splitting_count(const Partition& type, std::size_t g, std::uint32_t p, bool ordered);

/// Printed special cases of the bound, keyed by (g, p).
std::optional<BigInt> remark_table_value(std::size_t g, std::uint32_t p);
/// Every (g, p) that has a printed value, in table order.
std::vector<std::pair<std::size_t, std::uint32_t>> remark_table_cells();

struct BoundReport {
  std::size_t g = 0;
  std::uint32_t p = 0;
  BigInt sp_order;
  Rational lambda;
  Rational theta;
  BigInt st_dim;     // p^binom(2g,2)
  BigInt stns_dim;   // the bound itself
  BigInt stsep_dim;  // st_dim - stns_dim
  BigInt bound;      // |Sp| / (g (p^2g - 1))
  std::optional<BigInt> remark;

  bool discrepant() const noexcept { return remark && *remark != bound; }
};

/// Throws CheckFailure if the bound is not an integer or theta != lambda.
BoundReport main_bound(std::size_t g, std::uint32_t p);

/// g,p,sp_order,lambda,theta,st_dim,stsep_dim,stns_dim,bound,remark,discrepant
std::string bound_csv_header();
std::string bound_csv_row(const BoundReport& r);

}  // namespace stw
