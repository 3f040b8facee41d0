#pragma once

// Brute-force separatedness: a basis is separated iff some 2-part splitting
// has every basis vector inside one of its parts. Part membership is decided
// on exhaustive closures of the part bases, independently of the graph test.

#include <algorithm>
#include <array>
#include <string>

#include "oracles.hpp"
#include "stw/symplectic.hpp"

namespace separation_oracle {

struct Comparison {
  std::size_t chain_bases = 0;
  std::size_t random_bases = 0;
  std::size_t adapted_bases = 0;  // drawn inside a random 2-part splitting, so separated
  std::size_t separated_seen = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

class Searcher {
 public:
  Searcher(std::size_t g, std::uint32_t p) : n_(2 * g), p_(p) {
    for (const auto& s : stw::enumerate_splittings(stw::SymplecticSpace(g, stw::PrimeModulus(p)))) {
      if (s.size() != 2) continue;
      std::array<std::set<std::uint64_t>, 2> parts;
      for (std::size_t i = 0; i < 2; ++i) {
        std::vector<oracle::Vec> rows;
        for (const auto& b : s.part(i).basis_vectors()) rows.emplace_back(b.entries().begin(), b.entries().end());
        parts[i] = oracle::span_set(rows, n_, p_);
      }
      two_part_.push_back(std::move(parts));
    }
  }

  bool separated(std::span<const stw::FpVector> basis) const {
    for (const auto& parts : two_part_) {
      bool all_in = true;
      for (const auto& v : basis) {
        const std::uint64_t c = v.code();
        if (!parts[0].count(c) && !parts[1].count(c)) {
          all_in = false;
          break;
        }
      }
      if (all_in) return true;
    }
    return false;
  }

  std::size_t two_part_count() const { return two_part_.size(); }

 private:
  std::size_t n_;
  std::uint32_t p_;
  std::vector<std::array<std::set<std::uint64_t>, 2>> two_part_;
};

/// Compares the graph test with the search on every chain basis and on
/// `random_count` random bases of F_p^2g.
inline Comparison compare(std::size_t g, std::uint32_t p, std::size_t random_count, std::uint64_t seed) {
  const stw::SymplecticSpace space(g, stw::PrimeModulus(p));
  const Searcher search(g, p);
  Comparison out;
  auto test = [&](std::span<const stw::FpVector> b) {
    const bool graph = stw::separation_components(space, b).separated;
    out.separated_seen += graph;
    if (graph != search.separated(b)) {
      if (out.mismatches++ == 0) {
        for (const auto& v : b) out.first_mismatch += v.to_string() + " ";
      }
    }
  };
  stw::for_each_chain_basis(space, [&](std::span<const stw::FpVector> b) {
    ++out.chain_bases;
    test(b);
  });
  gen::Rng rng(seed);
  const std::size_t n = 2 * g;
  while (out.random_bases < random_count) {
    std::vector<oracle::Vec> raw;
    for (std::size_t i = 0; i < n; ++i) raw.push_back(rng.vec(n, p));
    if (oracle::dim_of(raw, n, p) != n) continue;
    std::vector<stw::FpVector> b;
    for (auto& v : raw) b.emplace_back(stw::PrimeModulus(p), v);
    ++out.random_bases;
    test(b);
  }
  // Separated examples are rare among random bases; draw some inside splittings too.
  std::vector<stw::SymplecticSplitting> two;
  for (const auto& s : stw::enumerate_splittings(space))
    if (s.size() == 2) two.push_back(s);
  while (out.adapted_bases < random_count / 4) {
    const auto& s = two[rng.below(two.size())];
    std::vector<oracle::Vec> raw;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto basis = s.part(i).basis_vectors();
      for (std::size_t k = 0; k < basis.size(); ++k) {
        oracle::Vec v(n, 0);
        for (const auto& b : basis) {
          const auto c = static_cast<std::uint32_t>(rng.below(p));
          for (std::size_t j = 0; j < n; ++j) v[j] = (v[j] + c * b[j]) % p;
        }
        raw.push_back(v);
      }
    }
    if (oracle::dim_of(raw, n, p) != n) continue;
    std::shuffle(raw.begin(), raw.end(), rng.eng);
    std::vector<stw::FpVector> b;
    for (auto& v : raw) b.emplace_back(stw::PrimeModulus(p), v);
    ++out.adapted_bases;
    test(b);
  }
  return out;
}

}  // namespace separation_oracle
