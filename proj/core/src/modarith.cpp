#include "stw/modarith.hpp"

#include <algorithm>
#include <random>

#include "stw/error.hpp"

namespace stw {

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
  a %= m;
  if (a == 0) throw DomainError("invmod: zero has no inverse");
  return powmod(a, m - 2, m);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These witnesses are sufficient for n < 3.3e24.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> random_primes(unsigned bits, std::size_t count, std::uint64_t seed) {
  if (bits < 3 || bits > 63) throw DomainError("random_primes: bits must be in [3, 63]");
  std::mt19937_64 rng(seed);
  const std::uint64_t lo = 1ULL << (bits - 1);
  std::uniform_int_distribution<std::uint64_t> dist(lo, (lo << 1) - 1);
  std::vector<std::uint64_t> out;
  while (out.size() < count) {
    std::uint64_t candidate = dist(rng) | 1ULL;
    if (is_prime_u64(candidate) && std::find(out.begin(), out.end(), candidate) == out.end()) {
      out.push_back(candidate);
    }
  }
  return out;
}

}  // namespace stw
