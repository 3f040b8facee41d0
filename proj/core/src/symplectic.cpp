#include "stw/symplectic.hpp"

#include <algorithm>
#include <numeric>

#include "stw/error.hpp"

namespace stw {

SymplecticSpace::SymplecticSpace(std::size_t genus, PrimeModulus p) : genus_(genus), p_(p), gram_(p, 2 * genus, 2 * genus) {
  if (genus == 0) throw DomainError("genus must be at least 1");
  for (std::size_t i = 0; i < genus; ++i) {
    gram_.set(2 * i, 2 * i + 1, 1);
    gram_.set(2 * i + 1, 2 * i, -1);
  }
}

std::uint32_t SymplecticSpace::omega_raw(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v) const noexcept {
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < genus_; ++i) {
    s = p_.add(s, p_.mul(u[2 * i], v[2 * i + 1]));
    s = p_.sub(s, p_.mul(u[2 * i + 1], v[2 * i]));
  }
  return s;
}

std::uint32_t SymplecticSpace::omega(const FpVector& u, const FpVector& v) const {
  if (u.size() != dim() || v.size() != dim()) throw DomainError("omega: vectors must have length 2g");
  if (!(u.modulus() == p_) || !(v.modulus() == p_)) throw DomainError("omega: modulus mismatch");
  return omega_raw(u.entries(), v.entries());
}

void SymplecticSpace::require_ambient(const Subspace& w) const {
  if (w.ambient_dim() != dim() || !(w.modulus() == p_)) throw DomainError("subspace is not inside F_p^{2g}");
}

bool SymplecticSpace::is_symplectic_subspace(const Subspace& w) const {
  require_ambient(w);
  const std::size_t k = w.dim();
  if (k == 0 || k % 2 == 1) return false;
  FpMatrix g(p_, k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g.set(i, j, omega_raw(w.basis().row_span(i), w.basis().row_span(j)));
  return rref(g).rank == k;
}

bool SymplecticSpace::orthogonal(const Subspace& a, const Subspace& b) const {
  require_ambient(a);
  require_ambient(b);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      if (omega_raw(a.basis().row_span(i), b.basis().row_span(j)) != 0) return false;
  return true;
}

Subspace SymplecticSpace::orthogonal_complement(const Subspace& w) const {
  require_ambient(w);
  const std::size_t n = dim();
  // Rows of A are the functionals x -> omega(b_i, x); the complement is ker A.
  FpMatrix a(p_, w.dim(), n);
  for (std::size_t i = 0; i < w.dim(); ++i) {
    auto b = w.basis().row_span(i);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::uint32_t> unit(n, 0);
      unit[j] = 1;
      a.set(i, j, omega_raw(b, unit));
    }
  }
  RrefResult r = rref(a);
  std::vector<FpVector> kernel;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : r.pivots) is_pivot[c] = true;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    FpVector v(p_, n);
    v.set(free, 1);
    for (std::size_t row = 0; row < r.rank; ++row) v.set(r.pivots[row], p_.neg(r.echelon.at(row, free)));
    kernel.push_back(std::move(v));
  }
  return span(p_, n, kernel);
}

// ---------------------------------------------------------------- splittings

std::vector<std::size_t> SymplecticSplitting::type() const {
  std::vector<std::size_t> t;
  for (const auto& s : parts_) t.push_back(s.dim() / 2);
  std::sort(t.rbegin(), t.rend());
  return t;
}

std::size_t SymplecticSplitting::part_containing(const FpVector& x) const {
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].contains(x)) return i;
  return parts_.size();
}

std::size_t SymplecticSplitting::hash() const noexcept {
  std::size_t h = parts_.size();
  for (const auto& s : parts_) h = h * 1000003ULL ^ s.hash();
  return h;
}

SymplecticSplitting validate_splitting(const SymplecticSpace& space, std::vector<Subspace> parts) {
  if (parts.empty()) throw DomainError("not a splitting: no parts");
  for (const auto& s : parts) {
    if (s.ambient_dim() != space.dim() || !(s.modulus() == space.modulus()))
      throw DomainError("not a splitting: part lies outside F_p^{2g}");
    if (s.dim() == 0) throw DomainError("not a splitting: zero part");
  }
  std::sort(parts.begin(), parts.end());
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (parts[i] == parts[j]) throw DomainError("not a splitting: repeated part " + parts[i].to_string());
      if (!space.orthogonal(parts[i], parts[j]))
        throw DomainError("not a splitting: parts " + parts[i].to_string() + " and " + parts[j].to_string() +
                          " are not orthogonal");
    }
  std::size_t total = 0;
  std::vector<FpVector> all;
  for (const auto& s : parts) {
    total += s.dim();
    auto b = s.basis_vectors();
    all.insert(all.end(), b.begin(), b.end());
  }
  if (total != space.dim() || span(space.modulus(), space.dim(), all).dim() != space.dim())
    throw DomainError("not a splitting: parts do not form a direct sum of the whole space");
  for (const auto& s : parts)
    if (!space.is_symplectic_subspace(s))
      throw CheckFailure("orthogonal direct summand " + s.to_string() + " is degenerate; arithmetic is broken");
  return SymplecticSplitting(std::move(parts));
}

OrderedSplitting::OrderedSplitting(SymplecticSplitting splitting, std::vector<std::size_t> order)
    : splitting_(std::move(splitting)), order_(std::move(order)) {
  std::vector<std::size_t> check = order_;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i)
    if (check[i] != i || check.size() != splitting_.size()) throw DomainError("ordering is not a permutation of the parts");
  Subspace t = Subspace::zero(splitting_.modulus(), splitting_.ambient_dim());
  partial_sums_.push_back(t);
  for (std::size_t i : order_) {
    t = subspace_sum(t, splitting_.part(i));
    partial_sums_.push_back(t);
  }
}

std::vector<OrderedSplitting> orderings(const SymplecticSplitting& s) {
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<OrderedSplitting> out;
  do {
    out.emplace_back(s, perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

SplittingCoordinates::SplittingCoordinates(const SymplecticSplitting& s) : splitting_(s) {
  const PrimeModulus p = s.modulus();
  const std::size_t n = s.ambient_dim();
  FpMatrix m(p, n, n);
  std::size_t row = 0;
  for (const auto& part : s.parts()) {
    offsets_.push_back(row);
    for (std::size_t r = 0; r < part.dim(); ++r, ++row)
      for (std::size_t j = 0; j < n; ++j) m.set(row, j, part.basis().at(r, j));
  }
  offsets_.push_back(row);
  // Invert via [M | I] -> [I | M^-1].
  FpMatrix aug(p, n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.set(i, j, m.at(i, j));
    aug.set(i, n + i, 1);
  }
  const std::size_t rank = rref_in_place(p, aug.mutable_data().data(), n, 2 * n);
  if (rank != n) throw CheckFailure("splitting bases are not independent");
  inverse_ = FpMatrix(p, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inverse_.set(i, j, aug.at(i, n + j));
}

void SplittingCoordinates::part_coordinates_raw(std::span<const std::uint32_t> x, std::size_t part_index,
                                                std::uint32_t* out) const {
  const PrimeModulus p = inverse_.modulus();
  const std::size_t n = inverse_.rows();
  for (std::size_t c = offsets_[part_index]; c < offsets_[part_index + 1]; ++c) {
    std::uint32_t acc = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i]) acc = p.add(acc, p.mul(x[i], inverse_.at(i, c)));
    *out++ = acc;
  }
}

FpVector SplittingCoordinates::part_coordinates(const FpVector& x, std::size_t part_index) const {
  if (x.size() != inverse_.rows()) throw DomainError("part_coordinates: length mismatch");
  if (part_index >= splitting_.size()) throw DomainError("part_coordinates: part index out of range");
  std::vector<std::uint32_t> c(offsets_[part_index + 1] - offsets_[part_index]);
  part_coordinates_raw(x.entries(), part_index, c.data());
  return FpVector(x.modulus(), std::move(c));
}

FpVector SplittingCoordinates::component(const FpVector& x, std::size_t part_index) const {
  return splitting_.part(part_index).embed(part_coordinates(x, part_index));
}

FpVector component_projection(const FpVector& x, const SymplecticSplitting& s, std::size_t part_index) {
  return SplittingCoordinates(s).component(x, part_index);
}

bool refinement_leq(const SymplecticSplitting& s1, const SymplecticSplitting& s2) {
  if (s1.ambient_dim() != s2.ambient_dim() || !(s1.modulus() == s2.modulus()))
    throw DomainError("refinement_leq: ambient mismatch");
  for (const auto& big : s2.parts()) {
    std::size_t covered = 0;
    for (const auto& small : s1.parts())
      if (big.contains(small)) covered += small.dim();
    if (covered != big.dim()) return false;
  }
  return true;
}

std::vector<Subspace> symplectic_subspaces(const SymplecticSpace& space, std::size_t dim) {
  std::vector<Subspace> out;
  for (auto& s : enumerate_subspaces(space.dim(), space.modulus(), dim))
    if (space.is_symplectic_subspace(s)) out.push_back(std::move(s));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void assemble(const SymplecticSpace& space, const std::vector<Subspace>& candidates, std::size_t start,
              const Subspace& remaining, std::vector<Subspace>& chosen, std::vector<SymplecticSplitting>& out) {
  if (remaining.dim() == 0) {
    out.push_back(validate_splitting(space, chosen));
    return;
  }
  for (std::size_t i = start; i < candidates.size(); ++i) {
    const Subspace& c = candidates[i];
    if (c.dim() > remaining.dim()) continue;
    if (!remaining.contains(c)) continue;
    chosen.push_back(c);
    if (c.dim() == remaining.dim()) {
      out.push_back(validate_splitting(space, chosen));
    } else {
      // Remaining parts live in the orthogonal complement of c inside `remaining`.
      assemble(space, candidates, i + 1, intersect(remaining, space.orthogonal_complement(c)), chosen, out);
    }
    chosen.pop_back();
  }
}

}  // namespace

void check_splitting_budget(const SymplecticSpace& space, SplittingEnumerationOptions options) {
  const std::size_t g = space.genus();
  const std::uint32_t p = space.modulus().value();
  const bool default_ok = g <= 2 && checked_power(p, 2 * g, kDefaultEnumerationBudget) <= 4096;
  const bool extended_ok = options.extended && g == 3 && checked_power(p, 6, kDefaultEnumerationBudget) <= 1000;
  if (!default_ok && !extended_ok) {
    throw BudgetExceeded("splitting enumeration at g=" + std::to_string(g) + ", p=" + std::to_string(p) +
                         (g == 3 ? " requires extended mode" : " is outside the enumeration budget"));
  }
}

std::vector<SymplecticSplitting> enumerate_splittings(const SymplecticSpace& space, SplittingEnumerationOptions options) {
  check_splitting_budget(space, options);

  // Proper parts, in canonical order (dimension first), then the whole space.
  std::vector<Subspace> candidates;
  for (std::size_t d = 2; d < space.dim(); d += 2) {
    auto s = symplectic_subspaces(space, d);
    candidates.insert(candidates.end(), s.begin(), s.end());
  }
  candidates.push_back(Subspace::full(space.modulus(), space.dim()));

  std::vector<SymplecticSplitting> out;
  std::vector<Subspace> chosen;
  assemble(space, candidates, 0, Subspace::full(space.modulus(), space.dim()), chosen, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- separation

SeparationResult separation_components(const SymplecticSpace& space, std::span<const FpVector> basis) {
  const std::size_t n = space.dim();
  if (basis.size() != n) throw DomainError("separation_components: need exactly 2g vectors");
  for (const auto& v : basis)
    if (v.size() != n || !(v.modulus() == space.modulus())) throw DomainError("separation_components: bad vector");
  if (span(space.modulus(), n, basis).dim() != n) throw DomainError("separation_components: vectors are not a basis");

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (space.omega(basis[i], basis[j]) != 0) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> root_to_comp(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    if (root_to_comp[r] == n) {
      root_to_comp[r] = comps.size();
      comps.emplace_back();
    }
    comps[root_to_comp[r]].push_back(i);
  }
  std::vector<Subspace> parts;
  for (const auto& c : comps) {
    std::vector<FpVector> vs;
    for (std::size_t i : c) vs.push_back(basis[i]);
    parts.push_back(span(space.modulus(), n, vs));
  }
  const bool separated = comps.size() > 1;
  return SeparationResult{std::move(comps), validate_splitting(space, std::move(parts)), separated};
}

void for_each_chain_basis(const SymplecticSpace& space, const std::function<void(std::span<const FpVector>)>& visit,
                          std::uint64_t budget) {
  const std::size_t n = space.dim();
  const PrimeModulus p = space.modulus();
  const auto vectors = all_vectors(n, p, budget);

  std::vector<FpVector> tuple;
  tuple.reserve(n);
  // Echelon rows of the prefix for incremental independence checks.
  std::vector<std::vector<std::uint32_t>> echelon;
  std::vector<std::size_t> pivots;

  auto reduce = [&](std::vector<std::uint32_t> v) {
    for (std::size_t r = 0; r < echelon.size(); ++r) {
      const std::uint32_t f = v[pivots[r]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) v[j] = p.sub(v[j], p.mul(f, echelon[r][j]));
    }
    return v;
  };

  std::function<void()> extend = [&]() {
    const std::size_t depth = tuple.size();
    if (depth == n) {
      visit(tuple);
      return;
    }
    for (std::size_t c = 1; c < vectors.size(); ++c) {
      const FpVector& v = vectors[c];
      if (depth > 0) {
        if (space.omega(tuple[depth - 1], v) != 1) continue;
        bool ok = true;
        for (std::size_t j = 0; j + 1 < depth && ok; ++j) ok = space.omega(tuple[j], v) == 0;
        if (!ok) continue;
      }
      auto rem = reduce(std::vector<std::uint32_t>(v.entries().begin(), v.entries().end()));
      auto lead = std::find_if(rem.begin(), rem.end(), [](auto x) { return x != 0; });
      if (lead == rem.end()) continue;  // dependent on the prefix
      const std::size_t piv = static_cast<std::size_t>(lead - rem.begin());
      const std::uint32_t inv = p.inv(rem[piv]);
      for (auto& x : rem) x = p.mul(x, inv);
      echelon.push_back(std::move(rem));
      pivots.push_back(piv);
      tuple.push_back(v);
      extend();
      tuple.pop_back();
      pivots.pop_back();
      echelon.pop_back();
    }
  };
  extend();
}

std::vector<std::vector<FpVector>> chain_bases(const SymplecticSpace& space, std::uint64_t budget) {
  std::vector<std::vector<FpVector>> out;
  for_each_chain_basis(
      space,
      [&](std::span<const FpVector> b) {
        if (out.size() >= budget) throw BudgetExceeded("chain basis count exceeds the enumeration budget");
        out.emplace_back(b.begin(), b.end());
      },
      budget);
  return out;
}

}  // namespace stw
