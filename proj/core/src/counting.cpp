#include "stw/counting.hpp"

#include <algorithm>
#include <map>

#include "stw/error.hpp"

namespace stw {

namespace {

BigInt pow_big(std::uint32_t base, std::size_t e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

BigInt factorial(std::size_t n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

void require_prime_base(std::uint32_t p) {
  if (p < 2) throw DomainError("p must be at least 2");
}

void require_genus(std::size_t g, std::size_t max_g) {
  if (g < 1 || g > max_g) throw DomainError("g must lie in [1, " + std::to_string(max_g) + "]");
}

Rational power(const Rational& q, std::size_t e) {
  Rational r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= q;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- partitions

std::size_t Partition::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [a, r] : parts) n += a * r;
  return n;
}

std::vector<std::size_t> Partition::expanded() const {
  std::vector<std::size_t> out;
  for (const auto& [a, r] : parts) out.insert(out.end(), r, a);
  return out;
}

Partition Partition::from_parts(std::vector<std::size_t> sizes) {
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  Partition out;
  for (std::size_t a : sizes) {
    if (a == 0) throw DomainError("partition parts must be positive");
    if (!out.parts.empty() && out.parts.back().first == a)
      ++out.parts.back().second;
    else
      out.parts.emplace_back(a, 1);
  }
  return out;
}

std::string Partition::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts[i].first);
    if (parts[i].second > 1) s += "^" + std::to_string(parts[i].second);
  }
  return s + ")";
}

void for_each_partition(std::size_t n, const std::function<void(const Partition&)>& visit) {
  if (n < 1 || n > kMaxPartitionN) throw DomainError("partitions need 1 <= n <= 200");
  Partition cur;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t remaining, std::size_t max_part) {
    if (remaining == 0) {
      visit(cur);
      return;
    }
    for (std::size_t a = std::min(remaining, max_part); a >= 1; --a) {
      // Take r copies of a at once so parts stay strictly decreasing.
      for (std::size_t r = remaining / a; r >= 1; --r) {
        cur.parts.emplace_back(a, r);
        rec(remaining - a * r, a - 1);
        cur.parts.pop_back();
      }
    }
  };
  rec(n, n);
}

std::vector<Partition> partitions(std::size_t n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](const Partition& q) { out.push_back(q); });
  return out;
}

BigInt partition_count(std::size_t n) {
  if (n > kMaxPartitionN) throw DomainError("partition_count needs n <= 200");
  std::vector<BigInt> p(n + 1);
  p[0] = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    BigInt s = 0;
    for (long k = 1;; ++k) {
      const long a = k * (3 * k - 1) / 2, b = k * (3 * k + 1) / 2;
      if (static_cast<std::size_t>(a) > m) break;
      const BigInt term = p[m - a] + (static_cast<std::size_t>(b) <= m ? p[m - b] : BigInt(0));
      if (k % 2)
        s += term;
      else
        s -= term;
    }
    p[m] = s;
  }
  return p[n];
}

// ---------------------------------------------------------------- closed forms

BigInt sp_order(std::size_t g, std::uint32_t p) {
  require_prime_base(p);
  if (g < 1) throw DomainError("g must be at least 1");
  BigInt r = pow_big(p, g * g);
  for (std::size_t i = 1; i <= g; ++i) r *= pow_big(p, 2 * i) - 1;
  return r;
}

Rational lambda(std::size_t g, std::uint32_t p) {
  require_prime_base(p);
  if (g < 1) throw DomainError("g must be at least 1");
  Rational r(BigInt(1), BigInt(static_cast<unsigned long>(g)) * (pow_big(p, 2 * g) - 1));
  r.canonicalize();
  return r;
}

Rational solomon_tits_ratio(std::size_t g, std::uint32_t p) {
  Rational r(pow_big(p, g * (2 * g - 1)), sp_order(g, p));
  r.canonicalize();
  return r;
}

Rational euler_coeff(std::size_t g, std::uint32_t p) {
  require_prime_base(p);
  BigInt den = 1;
  for (std::size_t i = 1; i <= g; ++i) den *= pow_big(p, 2 * i) - 1;
  Rational r(pow_big(p, g * (g - 1)), den);
  r.canonicalize();
  return r;
}

Rational partition_exponential_sum(std::size_t g, const std::vector<Rational>& seq) {
  if (g == 0) return 1;
  if (seq.size() < g) throw DomainError("sequence too short for the partition sum");
  Rational sum = 0;
  for_each_partition(g, [&](const Partition& q) {
    Rational term = 1;
    for (const auto& [a, r] : q.parts) term *= power(seq[a - 1], r) / Rational(factorial(r));
    sum += term;
  });
  return sum;
}

std::vector<Rational> theta_sequence(std::size_t max_g, std::uint32_t p) {
  require_genus(max_g, 50);
  require_prime_base(p);
  std::vector<Rational> theta;
  theta.reserve(max_g);
  for (std::size_t g = 1; g <= max_g; ++g) {
    // Every partition other than (g) only involves theta_1 .. theta_{g-1}.
    Rational rest = 0;
    for_each_partition(g, [&](const Partition& q) {
      if (q.parts.size() == 1 && q.parts[0].second == 1) return;
      Rational term = 1;
      for (const auto& [a, r] : q.parts) term *= power(theta[a - 1], r) / Rational(factorial(r));
      rest += term;
    });
    Rational t = solomon_tits_ratio(g, p) - rest;
    if (sgn(t) <= 0) throw CheckFailure("theta recurrence produced a non-positive value at g = " + std::to_string(g));
    theta.push_back(t);
  }
  return theta;
}

Rational theta(std::size_t g, std::uint32_t p) { return theta_sequence(g, p).back(); }

std::vector<Rational> exp_series(const std::vector<Rational>& seq, std::size_t max_degree) {
  std::vector<Rational> c(max_degree + 1);
  c[0] = 1;
  for (std::size_t n = 1; n <= max_degree; ++n) {
    Rational s = 0;
    for (std::size_t k = 1; k <= n && k <= seq.size(); ++k) s += Rational(static_cast<unsigned long>(k)) * seq[k - 1] * c[n - k];
    c[n] = s / Rational(static_cast<unsigned long>(n));
  }
  return c;
}

// ---------------------------------------------------------------- Euler's product

IntPolynomial truncated_product_coeff(std::size_t g, std::size_t H) {
  // coeff[j] is the Q-polynomial multiplying x^j; only j <= g is kept.
  std::vector<IntPolynomial> coeff(g + 1);
  coeff[0] = {BigInt(1)};
  for (std::size_t h = 0; h <= H; ++h) {
    for (std::size_t j = std::min(g, h + 1); j >= 1; --j) {
      const IntPolynomial& lower = coeff[j - 1];
      IntPolynomial& cur = coeff[j];
      if (cur.size() < lower.size() + h) cur.resize(lower.size() + h);
      for (std::size_t d = 0; d < lower.size(); ++d) cur[d + h] -= lower[d];
    }
  }
  IntPolynomial out = coeff[g];
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

IntPolynomial euler_series(std::size_t g, std::size_t terms) {
  IntPolynomial s(terms, 0);
  const std::size_t shift = g * (g - 1) / 2;
  if (shift >= terms) return s;
  s[shift] = 1;
  for (std::size_t i = 1; i <= g; ++i) {
    // multiply by 1/(1 - Q^i): s[d] += s[d - i], ascending
    for (std::size_t d = i; d < terms; ++d) s[d] += s[d - i];
  }
  return s;
}

BigInt truncated_product_value(std::size_t g, std::size_t H, std::uint32_t p) {
  const BigInt q = pow_big(p, 2);
  BigInt v = 0;
  const IntPolynomial poly = truncated_product_coeff(g, H);
  for (std::size_t d = poly.size(); d-- > 0;) v = v * q + poly[d];
  return v;
}

long padic_valuation(const Rational& q, std::uint32_t p) {
  if (q == 0) throw DomainError("valuation of zero");
  const BigInt P = p;
  long v = 0;
  BigInt num = abs(q.get_num()), den = q.get_den();
  while (mpz_divisible_p(num.get_mpz_t(), P.get_mpz_t())) num /= P, ++v;
  while (mpz_divisible_p(den.get_mpz_t(), P.get_mpz_t())) den /= P, --v;
  return v;
}

EulerCheck euler_product_check(std::size_t g, std::size_t H, std::uint32_t p) {
  if (g < 1) throw DomainError("g must be at least 1");
  if (H + 1 < g) throw DomainError("truncation depth must satisfy H >= g - 1");
  EulerCheck c;
  c.g = g;
  c.H = H;
  // c_H = limit * prod_{i=0}^{g-1} (1 - Q^{H+1-i}), so they agree below Q^(binom(g,2) + H + 2 - g).
  const std::size_t terms = g * (g - 1) / 2 + H + 2 - g;
  IntPolynomial prod = truncated_product_coeff(g, H);
  IntPolynomial limit = euler_series(g, terms);
  prod.resize(std::max(prod.size(), terms));
  c.series_agree = true;
  for (std::size_t d = 0; d < terms; ++d) {
    const BigInt expected = g % 2 ? BigInt(-limit[d]) : limit[d];
    if (prod[d] != expected) c.series_agree = false;
  }
  const Rational diff = Rational(truncated_product_value(g, H, p)) - euler_coeff(g, p);
  c.valuation = padic_valuation(diff, p);
  c.required = static_cast<long>(g * (g - 1) + 2 * (H + 2 - g));
  return c;
}

// ---------------------------------------------------------------- splittings and the bound

BigInt splitting_count(const Partition& type, std::size_t g, std::uint32_t p, bool ordered) {
  if (type.parts.empty() || type.size() != g) throw DomainError("splitting type must be a partition of g");
  for (std::size_t i = 0; i < type.parts.size(); ++i) {
    if (type.parts[i].second == 0 || type.parts[i].first == 0) throw DomainError("malformed partition");
    if (i && type.parts[i].first >= type.parts[i - 1].first) throw DomainError("partition parts must be decreasing");
  }
  BigInt den = 1;
  for (const auto& [a, r] : type.parts)
    for (std::size_t i = 0; i < r; ++i) den *= sp_order(a, p);
  if (!ordered)
    for (const auto& [a, r] : type.parts) den *= factorial(r);
  const BigInt num = sp_order(g, p);
  if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()))
    throw CheckFailure("splitting count " + type.to_string() + " is not an integer");
  return num / den;
}

namespace {

const std::vector<std::pair<std::pair<std::size_t, std::uint32_t>, const char*>>& remark_table() {
  static const std::vector<std::pair<std::pair<std::size_t, std::uint32_t>, const char*>> table = {
      {{2, 2}, "24"},       {{2, 3}, "216"},      {{3, 2}, "11520"},
      {{3, 3}, "4199040"},  {{4, 2}, "92897280"}, {{4, 3}, "6685442749440"},
  };
  return table;
}

}  // namespace

std::optional<BigInt> remark_table_value(std::size_t g, std::uint32_t p) {
  for (const auto& [key, value] : remark_table())
    if (key.first == g && key.second == p) return BigInt(value);
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::uint32_t>> remark_table_cells() {
  std::vector<std::pair<std::size_t, std::uint32_t>> out;
  for (const auto& [key, value] : remark_table()) out.push_back(key);
  return out;
}

BoundReport main_bound(std::size_t g, std::uint32_t p) {
  require_prime_base(p);
  if (g < 1) throw DomainError("g must be at least 1");
  BoundReport r;
  r.g = g;
  r.p = p;
  r.sp_order = sp_order(g, p);
  r.lambda = lambda(g, p);
  r.theta = theta(g, p);
  if (r.theta != r.lambda) throw CheckFailure("theta differs from lambda at g = " + std::to_string(g));
  const BigInt den = BigInt(static_cast<unsigned long>(g)) * (pow_big(p, 2 * g) - 1);
  if (!mpz_divisible_p(r.sp_order.get_mpz_t(), den.get_mpz_t()))
    throw CheckFailure("bound is not an integer at g = " + std::to_string(g));
  r.bound = r.sp_order / den;
  r.st_dim = pow_big(p, g * (2 * g - 1));
  r.stns_dim = r.bound;
  r.stsep_dim = r.st_dim - r.stns_dim;
  r.remark = remark_table_value(g, p);
  return r;
}

std::string bound_csv_header() { return "g,p,sp_order,lambda,theta,st_dim,stsep_dim,stns_dim,bound,remark,discrepant"; }

std::string bound_csv_row(const BoundReport& r) {
  std::string s = std::to_string(r.g) + "," + std::to_string(r.p) + "," + r.sp_order.get_str() + "," +
                  rational_string(r.lambda) + "," + rational_string(r.theta) + "," + r.st_dim.get_str() + "," +
                  r.stsep_dim.get_str() + "," + r.stns_dim.get_str() + "," + r.bound.get_str() + ",";
  s += r.remark ? r.remark->get_str() : "";
  s += r.discrepant() ? ",true" : ",false";
  return s;
}

}  // namespace stw
