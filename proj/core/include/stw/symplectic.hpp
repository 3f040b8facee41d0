#pragma once

// The standard symplectic form on F_p^{2g}, symplectic splittings and their
// refinement order, component projections, and separatedness of bases.
//
// Basis convention: coordinates are interleaved hyperbolic pairs
// (e1, f1, e2, f2, ..., eg, fg) with omega(e_i, f_i) = 1 and every other
// pairing of basis vectors zero.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stw/ffspace.hpp"

namespace stw {

class SymplecticSpace {
 public:
  SymplecticSpace(std::size_t genus, PrimeModulus p);

  std::size_t genus() const noexcept { return genus_; }
  std::size_t dim() const noexcept { return 2 * genus_; }
  PrimeModulus modulus() const noexcept { return p_; }
  const FpMatrix& gram() const noexcept { return gram_; }

  /// e_i and f_i, 0-based.
  FpVector e(std::size_t i) const { return FpVector::unit(p_, dim(), 2 * i); }
  FpVector f(std::size_t i) const { return FpVector::unit(p_, dim(), 2 * i + 1); }

  std::uint32_t omega(const FpVector& u, const FpVector& v) const;
  /// Raw form on entry spans of length 2g; no validation.
  std::uint32_t omega_raw(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v) const noexcept;

  bool is_symplectic_subspace(const Subspace& w) const;
  bool orthogonal(const Subspace& a, const Subspace& b) const;
  Subspace orthogonal_complement(const Subspace& w) const;

  friend bool operator==(const SymplecticSpace& a, const SymplecticSpace& b) {
    return a.genus_ == b.genus_ && a.p_ == b.p_;
  }

 private:
  void require_ambient(const Subspace& w) const;

  std::size_t genus_;
  PrimeModulus p_;
  FpMatrix gram_;
};

/// Unordered set of pairwise orthogonal nonzero subspaces whose internal direct
/// sum is the whole space. Parts are kept in canonical Subspace order.
class SymplecticSplitting {
 public:
  const std::vector<Subspace>& parts() const noexcept { return parts_; }
  std::size_t size() const noexcept { return parts_.size(); }
  const Subspace& part(std::size_t i) const { return parts_[i]; }
  std::size_t ambient_dim() const noexcept { return parts_.front().ambient_dim(); }
  PrimeModulus modulus() const noexcept { return parts_.front().modulus(); }
  bool is_trivial() const noexcept { return parts_.size() == 1; }

  /// Half-dimensions of the parts, largest first: a partition of the genus.
  std::vector<std::size_t> type() const;
  /// Index of the part containing x, or size() if none does.
  std::size_t part_containing(const FpVector& x) const;

  friend bool operator==(const SymplecticSplitting&, const SymplecticSplitting&) = default;
  friend std::strong_ordering operator<=>(const SymplecticSplitting& a, const SymplecticSplitting& b) {
    return a.parts_ <=> b.parts_;
  }
  std::size_t hash() const noexcept;

 private:
  friend SymplecticSplitting validate_splitting(const SymplecticSpace&, std::vector<Subspace>);
  explicit SymplecticSplitting(std::vector<Subspace> parts) : parts_(std::move(parts)) {}
  std::vector<Subspace> parts_;
};

/// Sorts `parts` canonically and checks that they form a splitting. Throws
/// DomainError naming the first violated condition (zero part, non-orthogonal
/// pair, not a direct sum of the whole space). Throws CheckFailure if a valid
/// splitting has a part on which the form degenerates, which cannot happen
/// without an arithmetic bug.
SymplecticSplitting validate_splitting(const SymplecticSpace& space, std::vector<Subspace> parts);

/// Splitting with a chosen order of its parts, and the partial sums
/// T_0 = 0 ⊂ T_1 ⊂ ... ⊂ T_k = F_p^{2g}.
class OrderedSplitting {
 public:
  /// `order[i]` is the canonical index of the i-th part; must be a permutation.
  OrderedSplitting(SymplecticSplitting splitting, std::vector<std::size_t> order);

  const SymplecticSplitting& unordered() const noexcept { return splitting_; }
  std::size_t size() const noexcept { return order_.size(); }
  const Subspace& part(std::size_t i) const { return splitting_.part(order_[i]); }
  std::size_t canonical_index(std::size_t i) const { return order_[i]; }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  /// T_0 .. T_k.
  const std::vector<Subspace>& partial_sums() const noexcept { return partial_sums_; }

 private:
  SymplecticSplitting splitting_;
  std::vector<std::size_t> order_;
  std::vector<Subspace> partial_sums_;
};

/// All k! orderings, in lexicographic order of the permutation.
std::vector<OrderedSplitting> orderings(const SymplecticSplitting& s);

/// Decomposes vectors along a splitting. Coordinates are relative to the
/// concatenated echelon bases of the parts in canonical order, so the block for
/// part i is exactly Subspace::coordinates of the component in that part.
class SplittingCoordinates {
 public:
  explicit SplittingCoordinates(const SymplecticSplitting& s);

  const SymplecticSplitting& splitting() const noexcept { return splitting_; }
  /// Coordinates of the part-i component of x in part i's echelon basis.
  FpVector part_coordinates(const FpVector& x, std::size_t part_index) const;
  /// The same, on raw entries; writes dim(part) values to `out`.
  void part_coordinates_raw(std::span<const std::uint32_t> x, std::size_t part_index, std::uint32_t* out) const;
  FpVector component(const FpVector& x, std::size_t part_index) const;

 private:
  SymplecticSplitting splitting_;
  std::vector<std::size_t> offsets_;
  FpMatrix inverse_;  // x * inverse_ = coordinates in the concatenated basis
};

/// The unique component of x in the chosen part of the direct sum.
FpVector component_projection(const FpVector& x, const SymplecticSplitting& s, std::size_t part_index);

/// s1 ⪯ s2: every part of s2 is the direct sum of some parts of s1.
bool refinement_leq(const SymplecticSplitting& s1, const SymplecticSplitting& s2);

struct SplittingEnumerationOptions {
  bool extended = false;  // admits genus 3 with p^6 <= 1000
};

/// Throws BudgetExceeded when enumerate_splittings would refuse (g, p).
void check_splitting_budget(const SymplecticSpace& space, SplittingEnumerationOptions options = {});

/// Every symplectic splitting of F_p^{2g}, including the one-part splitting,
/// deduplicated and sorted. Throws BudgetExceeded outside the desk-scale range.
std::vector<SymplecticSplitting> enumerate_splittings(const SymplecticSpace& space,
                                                      SplittingEnumerationOptions options = {});

/// All nonzero symplectic subspaces of the given even dimension, in canonical order.
std::vector<Subspace> symplectic_subspaces(const SymplecticSpace& space, std::size_t dim);

struct SeparationResult {
  std::vector<std::vector<std::size_t>> components;  // each sorted; ordered by smallest index
  SymplecticSplitting splitting;                       // spans of the components
  bool separated = false;
};

/// Connected components of the graph on indices with an edge where omega(v_i, v_j) != 0.
/// Throws DomainError when B is not a basis.
SeparationResult separation_components(const SymplecticSpace& space, std::span<const FpVector> basis);

/// Ordered bases (v_1..v_2g) with omega(v_i, v_{i+1}) = 1 and omega(v_i, v_j) = 0 for |i-j| > 1,
/// visited in lexicographic order of the tuple. Tuples that satisfy the form conditions but are
/// linearly dependent are skipped.
void for_each_chain_basis(const SymplecticSpace& space, const std::function<void(std::span<const FpVector>)>& visit,
                          std::uint64_t budget = kDefaultEnumerationBudget);
std::vector<std::vector<FpVector>> chain_bases(const SymplecticSpace& space,
                                               std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace stw

template <>
struct std::hash<stw::SymplecticSplitting> {
  std::size_t operator()(const stw::SymplecticSplitting& s) const noexcept { return s.hash(); }
};
