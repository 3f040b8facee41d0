#pragma once

// Sparse coordinate vectors over the integers, the rationals, or Z/q.
// Entries are kept sorted by index with no stored zeros.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stw {

using Rational = mpq_class;
using BigInt = mpz_class;

template <typename T>
struct SparseVector {
  std::vector<std::pair<std::uint32_t, T>> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t nnz() const noexcept { return entries.size(); }

  /// Sorts by index, merges duplicates and drops zeros.
  void canonicalize() {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries.size();) {
      std::uint32_t idx = entries[i].first;
      T sum = entries[i].second;
      for (++i; i < entries.size() && entries[i].first == idx; ++i) sum += entries[i].second;
      if (sum != 0) entries[out++] = {idx, std::move(sum)};
    }
    entries.resize(out);
  }

  T at(std::uint32_t idx) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), idx,
                               [](const auto& e, std::uint32_t i) { return e.first < i; });
    return (it != entries.end() && it->first == idx) ? it->second : T(0);
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

using IntVector = SparseVector<std::int64_t>;
using RatVector = SparseVector<Rational>;

template <typename T>
SparseVector<T> negated(SparseVector<T> v) {
  for (auto& e : v.entries) e.second = -e.second;
  return v;
}

/// a + c*b, both canonical; result canonical.
template <typename T>
SparseVector<T> add_scaled(const SparseVector<T>& a, const SparseVector<T>& b, const T& c) {
  SparseVector<T> out;
  out.entries.reserve(a.entries.size() + b.entries.size());
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j == b.entries.size() || (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      out.entries.push_back(a.entries[i++]);
    } else if (i == a.entries.size() || b.entries[j].first < a.entries[i].first) {
      T v = c * b.entries[j].second;
      if (v != 0) out.entries.emplace_back(b.entries[j].first, std::move(v));
      ++j;
    } else {
      T v = a.entries[i].second + c * b.entries[j].second;
      if (v != 0) out.entries.emplace_back(a.entries[i].first, std::move(v));
      ++i, ++j;
    }
  }
  return out;
}

inline RatVector to_rational(const IntVector& v) {
  RatVector out;
  out.entries.reserve(v.entries.size());
  for (const auto& [i, x] : v.entries) out.entries.emplace_back(i, Rational(static_cast<long>(x)));
  return out;
}

/// "num/den" for non-integers, plain integer otherwise.
inline std::string rational_string(const Rational& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace stw
