#pragma once

// The separated/non-separated decomposition of St_{2g}(F_p).
//
// For a splitting S = {S_1, ..., S_k} (canonical part order), St(S) is realized
// as the ordered tensor product St(S_1) ⊗ ... ⊗ St(S_k) in flag coordinates:
// each part carries a chart (coordinates at the pivots of its echelon basis)
// that identifies it with F_p^{m_i}, a complete flag of S_i is indexed through
// the chart in the building of F_p^{m_i}, and the tensor index is the mixed
// radix number of the part flag indices with the first part most significant.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stw/building.hpp"
#include "stw/rank.hpp"
#include "stw/sparse.hpp"
#include "stw/steinberg.hpp"
#include "stw/symplectic.hpp"

namespace stw {

/// Normalized bases of F_p^m whose apartments form a basis of St_m(F_p): the
/// apartments that raised the rank during saturation, in stream order.
/// Computed once per (m, p) and shared.
const std::vector<std::vector<FpVector>>& steinberg_basis_tuples(std::size_t m, PrimeModulus p);

/// Per-part tuples of ambient vectors B_1, ..., B_k (B_i inside part i).
using PartTuples = std::vector<std::vector<FpVector>>;

class TensorFlagBasis {
 public:
  explicit TensorFlagBasis(const SymplecticSplitting& s);

  const SymplecticSplitting& splitting() const noexcept { return splitting_; }
  std::size_t parts() const noexcept { return splitting_.size(); }
  const BuildingContext& ambient() const noexcept { return *ambient_; }
  const BuildingContext& part_context(std::size_t i) const { return *part_ctx_.at(i); }
  /// Number of tensor coordinates, the product of the part flag counts.
  std::uint64_t size() const noexcept { return size_; }
  /// dim St(S) = product of p^(m_i choose 2).
  std::uint64_t steinberg_dim() const;

  FpVector to_chart(const FpVector& x, std::size_t part) const;
  FpVector from_chart(const FpVector& c, std::size_t part) const;

  std::uint64_t tensor_index(std::span<const std::uint64_t> part_flags) const;

  /// Sym(A_{B_1}, ..., A_{B_k}) in tensor coordinates. Throws DomainError if a
  /// vector of B_i lies outside part i.
  IntVector tensor_generator(const PartTuples& b) const;
  /// inc_S: the ambient apartment of the concatenation B_1 ... B_k.
  IntVector inc(const PartTuples& b) const;

  /// Chain-level projection for one ordering of the parts: flags containing
  /// every partial sum T_i are sent to the tuple of projected part flags with
  /// the same coefficient, all others to zero.
  IntVector chainproj_ordered(const IntVector& v, const OrderedSplitting& order) const;
  RatVector chainproj_ordered(const RatVector& v, const OrderedSplitting& order) const;
  /// Average of chainproj_ordered over all k! orderings.
  RatVector pi(const IntVector& v) const;
  RatVector pi(const RatVector& v) const;

  /// Tensor products of Steinberg basis apartments of the parts (each basis
  /// tuple embedded through its part's chart), in mixed radix order.
  std::vector<PartTuples> basis_products() const;

  /// Generators of StSep(S) in tensor coordinates, built from the maximal
  /// proper refinements of S found in `all` (one part split in two).
  std::vector<IntVector> stsep_generators(std::span<const SymplecticSplitting> all) const;
  /// The same generators, streamed.
  void for_each_stsep_generator(std::span<const SymplecticSplitting> all,
                                const std::function<void(const IntVector&)>& visit) const;

 private:
  template <typename T>
  SparseVector<T> chainproj_impl(const SparseVector<T>& v, const OrderedSplitting& order) const;

  SymplecticSplitting splitting_;
  SplittingCoordinates coords_;
  std::shared_ptr<const BuildingContext> ambient_;
  std::vector<std::shared_ptr<const BuildingContext>> part_ctx_;
  std::vector<std::uint64_t> radix_;  // radix_[i] = product of flag counts of parts after i
  std::uint64_t size_ = 1;
  // (part, dimension, ambient subspace index) -> index of its projection in the part's chart.
  mutable std::unordered_map<std::uint64_t, std::uint32_t> chart_cache_;
};

struct DecompositionOptions {
  RankEngineConfig engine = RankEngineConfig::modular();
  bool extended = false;  // admits g = 3, p = 2
  unsigned workers = 1;
  std::uint64_t seed = 2024;
  std::size_t inc_samples_per_splitting = 200;
  std::size_t cross_pairs_sample = 50;  // used when the full pair set is large
  /// Ambient (one-part) spans in the coordinates of the flags opposite a fixed
  /// flag, eliminated densely modulo 26-bit primes, one pass per configured
  /// prime. Always used for g >= 3.
  bool restricted_ambient = false;
  /// When set, restricted runs store the ambient StSep echelon here and reuse it.
  std::string snapshot_dir;
};

/// Separated apartments span, computed from products over 2-part splittings.
std::size_t stsep_dim(std::size_t g, PrimeModulus p, const DecompositionOptions& options = {});
/// dim St - dim StSep.
std::size_t stns_dim(std::size_t g, PrimeModulus p, const DecompositionOptions& options = {});

struct SplittingTypeRow {
  std::vector<std::size_t> type;  // half-dimensions of the parts, largest first
  std::size_t count = 0;
  std::uint64_t st_dim = 0;      // per splitting
  std::size_t stsep_dim = 0;     // per splitting (identical across the type)
  std::size_t stns_dim = 0;      // per splitting
  bool uniform = true;           // every splitting of the type gave the same StSep dimension
};

struct HypothesisCheck {
  std::string name;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::string counterexample;

  bool ok() const noexcept { return passed == instances; }
};

struct DecompositionReport {
  std::size_t g = 0;
  std::uint32_t p = 0;
  std::uint64_t st_dim = 0;           // p^(2g choose 2)
  std::size_t st_rank = 0;            // saturated apartment span
  std::size_t stsep_rank = 0;         // ambient separated span
  std::size_t stns_rank = 0;          // st_rank - stsep_rank
  std::size_t splitting_count = 0;
  std::vector<SplittingTypeRow> rows;
  std::uint64_t stns_sum = 0;         // sum over all splittings of dim StNS(S)
  std::vector<HypothesisCheck> checks;
  std::size_t step1_quotient_rank = 0;
  std::size_t chain_bases_used = 0;
  bool restricted_ambient = false;
  std::vector<std::uint64_t> dense_primes;  // primes of the restricted passes

  bool audit_ok() const noexcept { return stns_sum == st_dim && st_rank == st_dim; }
  bool ok() const noexcept;
};

struct AuditSelection {
  bool inc_identity = true;         // pi_S(inc_S(x)) = x on random generators
  bool cross_projection = true;     // pi_S(V(S')) inside StSep(S) for S not refining S'
  bool all_cross_pairs = false;     // every ordered pair instead of a sample
  bool vdec_equals_stsep = true;    // span of pi_S(V(S')) over proper refinements = StSep(S)
  bool product_isomorphism = false; // the map St -> prod StNS(S) is injective (exact ranks)
  bool step1 = true;                // chain-basis apartments span St modulo StSep
  bool chain_bases_vanish = false;  // pi_S kills chain-basis apartments for nontrivial S
};

DecompositionReport poset_rep_audit(std::size_t g, PrimeModulus p, const DecompositionOptions& options = {},
                                    const AuditSelection& selection = {});

/// pi_S(V(S')) inside StSep(S), as a rank containment test. Throws DomainError when S refines S'.
bool cross_projection_check(const SymplecticSplitting& s, const SymplecticSplitting& s_prime,
                            std::span<const SymplecticSplitting> all, const RankEngineConfig& engine);

/// Tensor product of part vectors in mixed radix (first factor most significant).
IntVector tensor_product(std::span<const IntVector> factors, std::span<const std::uint64_t> sizes);

}  // namespace stw
