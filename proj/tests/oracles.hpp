#pragma once

// Test-side reference computations. Nothing here calls into the library's
// linear algebra: vectors are plain integer codes and every answer comes from
// exhaustive enumeration or schoolbook formulas.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Vec = std::vector<std::uint32_t>;

inline std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

inline Vec decode(std::uint64_t code, std::size_t n, std::uint32_t p) {
  Vec v(n);
  for (std::size_t i = n; i-- > 0;) {
    v[i] = static_cast<std::uint32_t>(code % p);
    code /= p;
  }
  return v;
}

inline std::uint64_t encode(const Vec& v, std::uint32_t p) {
  std::uint64_t c = 0;
  for (auto x : v) c = c * p + x;
  return c;
}

/// Every vector of the span of `gens`, as a sorted set of codes, by closure.
inline std::set<std::uint64_t> span_set(const std::vector<Vec>& gens, std::size_t n, std::uint32_t p) {
  std::set<std::uint64_t> out{0};
  for (const auto& g : gens) {
    std::set<std::uint64_t> next;
    for (auto c : out) {
      Vec base = decode(c, n, p);
      for (std::uint32_t a = 0; a < p; ++a) {
        Vec w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = (base[i] + a * g[i]) % p;
        next.insert(encode(w, p));
      }
    }
    out.swap(next);
  }
  return out;
}

inline std::size_t dim_of(const std::vector<Vec>& gens, std::size_t n, std::uint32_t p) {
  const std::size_t size = span_set(gens, n, p).size();
  std::size_t d = 0;
  for (std::size_t s = 1; s < size; s *= p) ++d;
  return d;
}

/// Number of k-dimensional subspaces: ordered independent k-tuples / |GL_k|, both counted exhaustively.
inline std::uint64_t count_subspaces(std::size_t n, std::size_t k, std::uint32_t p) {
  const std::uint64_t total = ipow(p, n);
  std::uint64_t tuples = 0;
  std::vector<Vec> cur;
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == k) {
      ++tuples;
      return;
    }
    const auto have = span_set(cur, n, p);
    for (std::uint64_t c = 1; c < total; ++c) {
      if (have.count(c)) continue;
      cur.push_back(decode(c, n, p));
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  std::uint64_t gl = 1;
  for (std::size_t i = 0; i < k; ++i) gl *= ipow(p, k) - ipow(p, i);
  return tuples / gl;
}

/// Every k-dimensional subspace as its set of vector codes, grown one vector at a time.
inline std::vector<std::set<std::uint64_t>> subspace_sets(std::size_t n, std::size_t k, std::uint32_t p) {
  std::set<std::set<std::uint64_t>> layer{{0}};
  const std::uint64_t total = ipow(p, n);
  for (std::size_t d = 0; d < k; ++d) {
    std::set<std::set<std::uint64_t>> next;
    for (const auto& s : layer) {
      for (std::uint64_t c = 1; c < total; ++c) {
        if (s.count(c)) continue;
        const Vec g = decode(c, n, p);
        std::set<std::uint64_t> grown;
        for (auto a : s) {
          const Vec base = decode(a, n, p);
          for (std::uint32_t t = 0; t < p; ++t) {
            Vec w(n);
            for (std::size_t i = 0; i < n; ++i) w[i] = (base[i] + t * g[i]) % p;
            grown.insert(encode(w, p));
          }
        }
        next.insert(std::move(grown));
      }
    }
    layer.swap(next);
  }
  return {layer.begin(), layer.end()};
}

/// Complete flags counted as chains of nested subspace sets.
inline std::uint64_t count_complete_flags(std::size_t n, std::uint32_t p) {
  std::vector<std::vector<std::set<std::uint64_t>>> by_dim;
  for (std::size_t k = 1; k < n; ++k) by_dim.push_back(subspace_sets(n, k, p));
  std::vector<std::uint64_t> ways(by_dim[0].size(), 1);
  for (std::size_t k = 1; k < by_dim.size(); ++k) {
    std::vector<std::uint64_t> next(by_dim[k].size(), 0);
    for (std::size_t j = 0; j < by_dim[k].size(); ++j)
      for (std::size_t i = 0; i < by_dim[k - 1].size(); ++i)
        if (std::includes(by_dim[k][j].begin(), by_dim[k][j].end(), by_dim[k - 1][i].begin(), by_dim[k - 1][i].end()))
          next[j] += ways[i];
    ways.swap(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total += w;
  return total;
}

/// Standard symplectic form with interleaved hyperbolic pairs.
inline std::uint32_t omega(const Vec& u, const Vec& v, std::uint32_t p) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i + 1 < u.size(); i += 2)
    s += static_cast<std::int64_t>(u[i]) * v[i + 1] - static_cast<std::int64_t>(u[i + 1]) * v[i];
  s %= static_cast<std::int64_t>(p);
  if (s < 0) s += p;
  return static_cast<std::uint32_t>(s);
}

/// |Sp_2g(F_p)| by testing every 2g x 2g matrix (tiny cases only).
inline std::uint64_t brute_sp_order(std::size_t g, std::uint32_t p) {
  const std::size_t n = 2 * g;
  const std::uint64_t vectors = ipow(p, n);
  // Count ordered bases whose Gram matrix is the standard one, row by row.
  std::uint64_t count = 0;
  std::vector<Vec> rows;
  auto rec = [&](auto&& self) -> void {
    if (rows.size() == n) {
      ++count;
      return;
    }
    const std::size_t i = rows.size();
    for (std::uint64_t c = 0; c < vectors; ++c) {
      Vec v = decode(c, n, p);
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        Vec ej(n, 0), ei(n, 0);
        ej[j] = 1;
        ei[i] = 1;
        ok = omega(rows[j], v, p) == omega(ej, ei, p);
      }
      if (!ok) continue;
      rows.push_back(v);
      self(self);
      rows.pop_back();
    }
  };
  rec(rec);
  return count;
}

/// Rank over Q of an integer matrix by fraction-keeping Gaussian elimination.
inline std::size_t rational_rank(std::vector<std::vector<mpq_class>> m) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

/// Rank over Z/q by schoolbook elimination.
inline std::size_t modular_rank(std::vector<std::vector<std::uint64_t>> m, std::uint64_t q) {
  auto inv = [q](std::uint64_t a) {
    std::uint64_t r = 1, e = q - 2;
    while (e) {
      if (e & 1) r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * a % q);
      a = static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * a % q);
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] % q == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    const std::uint64_t iv = inv(m[rank][c] % q);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] % q == 0) continue;
      const std::uint64_t f = static_cast<std::uint64_t>(static_cast<unsigned __int128>(m[r][c] % q) * iv % q);
      for (std::size_t k = c; k < cols; ++k)
        m[r][k] = (m[r][k] % q + q - static_cast<std::uint64_t>(static_cast<unsigned __int128>(f) * (m[rank][k] % q) % q)) % q;
    }
    ++rank;
  }
  return rank;
}

/// Number of partitions of n by the recursion over the largest part.
inline std::uint64_t partitions_brute(std::size_t n, std::size_t max_part) {
  if (n == 0) return 1;
  std::uint64_t s = 0;
  for (std::size_t a = std::min(n, max_part); a >= 1; --a) s += partitions_brute(n - a, a);
  return s;
}

}  // namespace oracle

namespace gen {

/// Hand-rolled generators driven by a fixed seed per test.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng); }
  oracle::Vec vec(std::size_t n, std::uint32_t p) {
    oracle::Vec v(n);
    for (auto& x : v) x = static_cast<std::uint32_t>(below(p));
    return v;
  }
  oracle::Vec nonzero_vec(std::size_t n, std::uint32_t p) {
    for (;;) {
      auto v = vec(n, p);
      if (std::any_of(v.begin(), v.end(), [](auto x) { return x != 0; })) return v;
    }
  }
};

}  // namespace gen
