#pragma once

#include <cstdint>
#include <vector>

namespace stw {

__extension__ typedef unsigned __int128 u128;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  std::uint64_t s = a + b;
  return (s >= m || s < a) ? s - m : s;
}

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return a >= b ? a - b : a + (m - b);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Inverse of a modulo a prime m; a must be nonzero mod m.
std::uint64_t invmod(std::uint64_t a, std::uint64_t m);

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

/// `count` distinct primes in [2^(bits-1), 2^bits), drawn from a seeded generator so runs are reproducible.
std::vector<std::uint64_t> random_primes(unsigned bits, std::size_t count, std::uint64_t seed);

}  // namespace stw
