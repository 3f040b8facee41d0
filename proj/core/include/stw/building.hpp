#pragma once

// Complete flags of F_p^n with a dense index, and the full chain complex of
// the Tits building used as an independent homology oracle.
//
// Flag index: writing a flag as V_1 ⊂ ... ⊂ V_{n-1} with V_0 = 0, step k+1
// chooses V_{k+1} among the [n-k]_p superspaces of V_k (sorted canonically),
// and the choices are combined in mixed radix with the first step most
// significant.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "stw/ffspace.hpp"
#include "stw/rank.hpp"
#include "stw/sparse.hpp"

namespace stw {

inline constexpr std::uint64_t kDefaultFlagBudget = 1'000'000;
inline constexpr std::size_t kMaxAmbient = 8;

/// Gaussian binomial [n choose k]_p by the product formula; throws BudgetExceeded on overflow.
std::uint64_t gaussian_binomial(std::size_t n, std::size_t k, std::uint64_t p);
/// Number of complete flags of F_p^n, prod_{k=1}^{n} [k]_p.
std::uint64_t complete_flag_count(std::size_t n, std::uint64_t p);

struct CompleteFlag {
  std::vector<Subspace> spaces;  // dimensions 1 .. n-1

  friend bool operator==(const CompleteFlag&, const CompleteFlag&) = default;
};

/// Packed echelon row codes; identifies a subspace within a fixed ambient space.
struct SubspaceKey {
  std::array<std::uint64_t, kMaxAmbient> rows{};
  std::uint8_t dim = 0;

  friend bool operator==(const SubspaceKey&, const SubspaceKey&) = default;
};

struct SubspaceKeyHash {
  std::size_t operator()(const SubspaceKey& k) const noexcept;
};

class BuildingContext {
 public:
  /// Throws BudgetExceeded when the flag count exceeds `flag_budget`.
  BuildingContext(std::size_t n, PrimeModulus p, std::uint64_t flag_budget = kDefaultFlagBudget);

  /// Shared, lazily built context; contexts are immutable once constructed.
  static std::shared_ptr<const BuildingContext> get(std::size_t n, PrimeModulus p,
                                                    std::uint64_t flag_budget = kDefaultFlagBudget);

  std::size_t n() const noexcept { return n_; }
  PrimeModulus modulus() const noexcept { return p_; }
  std::uint64_t flag_count() const noexcept { return flag_count_; }

  /// Subspaces of dimension k in canonical order (k = 0 .. n).
  const std::vector<Subspace>& subspaces(std::size_t k) const { return tables_.at(k); }
  /// Index of s inside subspaces(s.dim()); throws DomainError for a foreign subspace.
  std::uint32_t subspace_index(const Subspace& s) const;
  std::uint32_t subspace_index(const SubspaceKey& key) const;
  static SubspaceKey key_of(const Subspace& s);
  /// Key of the span of the given echelon rows (already reduced, `dim` rows of length n).
  SubspaceKey key_of_echelon(const std::uint32_t* rows, std::size_t dim) const;

  /// Sorted indices (into subspaces(k+1)) of the superspaces of subspaces(k)[i].
  const std::vector<std::uint32_t>& superspaces(std::size_t k, std::uint32_t i) const { return supers_.at(k).at(i); }
  /// Position of subspace j of dimension k+1 among the superspaces of subspace i of dimension k.
  std::uint32_t step_digit(std::size_t k, std::uint32_t i, std::uint32_t j) const;
  /// Radix weight of step k+1 (k = 0 .. n-2).
  std::uint64_t step_weight(std::size_t k) const { return weights_.at(k); }

  std::uint64_t flag_index(const CompleteFlag& f) const;
  /// Index from subspace indices of V_1 .. V_{n-1}.
  std::uint64_t flag_index_from_chain(std::span<const std::uint32_t> chain) const;
  CompleteFlag decode(std::uint64_t index) const;
  /// Subspace indices of V_1 .. V_{n-1}.
  std::vector<std::uint32_t> decode_chain(std::uint64_t index) const;

 private:
  std::size_t n_;
  PrimeModulus p_;
  std::uint64_t flag_count_;
  std::vector<std::vector<Subspace>> tables_;
  std::vector<std::unordered_map<SubspaceKey, std::uint32_t, SubspaceKeyHash>> lookup_;
  std::vector<std::vector<std::vector<std::uint32_t>>> supers_;
  std::vector<std::uint64_t> weights_;
};

enum class BuildingMode { kDefault, kExtended };

/// Reduced chain complex of the building: degree r holds flags of r+1 nonzero
/// proper subspaces (ordered by increasing dimension), degree -1 the empty flag.
class BuildingChainComplex {
 public:
  /// Throws BudgetExceeded when the simplex count is over budget for the mode:
  /// default mode admits at most 1000 complete flags, extended at most 10^5.
  BuildingChainComplex(std::shared_ptr<const BuildingContext> ctx, BuildingMode mode = BuildingMode::kDefault);

  const BuildingContext& context() const noexcept { return *ctx_; }
  /// Top degree n-2.
  int top_degree() const noexcept { return static_cast<int>(ctx_->n()) - 2; }
  /// Number of simplices in degree r, for r = -1 .. n-2.
  std::size_t simplex_count(int r) const;
  /// Simplices in degree r as bitmasks of dimensions used plus subspace indices.
  const std::vector<std::vector<std::uint32_t>>& simplices(int r) const;
  /// Columns of the boundary map from degree r to r-1, r = 0 .. n-2.
  const std::vector<IntVector>& boundary(int r) const;

 private:
  std::shared_ptr<const BuildingContext> ctx_;
  // Per degree r+1: each simplex is stored as (dimension mask, subspace indices in increasing dimension).
  std::vector<std::vector<std::vector<std::uint32_t>>> simplices_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> index_;
  std::vector<std::vector<IntVector>> boundaries_;
};

struct HomologyReport {
  std::vector<std::size_t> chain_ranks;     // dim C_r, r = -1 .. n-2
  std::vector<std::size_t> boundary_ranks;  // rank of boundary out of degree r, r = 0 .. n-2
  std::vector<std::int64_t> betti;          // reduced Betti numbers, r = -1 .. n-2
  std::int64_t euler_chains = 0;            // sum (-1)^r dim C_r
  std::int64_t euler_betti = 0;             // sum (-1)^r betti_r
  bool exact = false;
};

/// Reduced Betti numbers over Q by rank-nullity on the boundary matrices.
HomologyReport homology_ranks(const BuildingChainComplex& complex, const RankEngineConfig& config);

/// Columns for the complete flags opposite the reference flag C_k = span(e_{n-k+1}, ..., e_n)
/// (F opposite C iff F_k meets C_{n-k} trivially for every k): out[index] is the
/// column of that flag, numbered in increasing flag index, or -1. There are
/// p^(n choose 2) such flags, and restricting apartment vectors to them is
/// injective on the Steinberg module.
std::vector<std::int32_t> opposite_flag_columns(const BuildingContext& ctx);

/// Keeps the entries whose column map is non-negative, renumbered.
IntVector restrict_columns(const IntVector& v, std::span<const std::int32_t> columns);

/// Whether v (indexed by complete flags of ctx) has zero boundary.
bool is_cycle(const IntVector& v, const BuildingContext& ctx);
bool is_cycle(const RatVector& v, const BuildingContext& ctx);

}  // namespace stw
