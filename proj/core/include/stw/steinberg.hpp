#pragma once

// Apartment classes over the complete-flag basis, the four defining
// relations between them, and St_n(F_p) realized as the span of apartments.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stw/building.hpp"
#include "stw/ffspace.hpp"
#include "stw/rank.hpp"
#include "stw/sparse.hpp"

namespace stw {

struct ApartmentClass {
  std::shared_ptr<const BuildingContext> context;
  IntVector coefficients;  // indexed by flag index

  bool is_zero() const noexcept { return coefficients.empty(); }
};

/// Sum over orderings of B of sgn * [flag of partial spans]. Zero when B is not a
/// basis. Throws DomainError for a zero vector or a length/modulus mismatch.
IntVector apartment_vector(std::span<const FpVector> b, const BuildingContext& ctx);
ApartmentClass apartment(std::span<const FpVector> b, std::shared_ptr<const BuildingContext> ctx);

/// Sorted tuple of vectors scaled to leading coefficient 1 with the sign of the
/// sorting permutation, so that A_B = sign * A_{vectors}. sign is 0 when two
/// entries are proportional (then A_B = 0).
struct NormalizedTuple {
  int sign = 0;
  std::vector<FpVector> vectors;
};
NormalizedTuple normalize(std::span<const FpVector> b);

/// Visits every normalized basis of F_p^n once: strictly increasing tuples of
/// projective points (in code order) that are linearly independent, in
/// lexicographic order. The visitor returns false to stop.
void for_each_normalized_basis(std::size_t n, PrimeModulus p,
                               const std::function<bool(std::span<const FpVector>)>& visit);

/// p^(n choose 2), the dimension of St_n(F_p).
std::uint64_t steinberg_dimension(std::size_t n, std::uint64_t p);

struct SpanResult {
  std::size_t rank = 0;
  std::size_t generators_used = 0;
  bool reached_ceiling = false;
};

/// Rank of the span of a generator stream. The stream calls `emit` for each
/// vector; emit returns false once the ceiling has been reached.
SpanResult span_dim(std::size_t ncols, const std::function<void(const std::function<bool(const IntVector&)>&)>& stream,
                    const RankEngineConfig& config, std::optional<std::size_t> ceiling = std::nullopt);

struct StDimOptions {
  RankEngineConfig engine = RankEngineConfig::modular();
  std::uint64_t flag_budget = kDefaultFlagBudget;
  /// Consulted every `checkpoint_every` insertions; a stored snapshot resumes the run.
  std::string snapshot_path;
  std::size_t checkpoint_every = 0;
};

/// dim St_n(F_p) by saturating the span of normalized apartments, stopping at
/// p^(n choose 2). Throws CheckFailure if all apartments are exhausted first.
SpanResult st_dim(std::size_t n, PrimeModulus p, const StDimOptions& options = {});

struct RelationOutcome {
  std::string name;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::string counterexample;  // empty when all passed

  bool ok() const noexcept { return passed == instances; }
};

struct RelationReport {
  std::size_t n = 0;
  std::uint32_t p = 0;
  std::vector<RelationOutcome> relations;  // nonzero-iff-basis, permutation-sign, scalar-invariance, alternating-sum

  bool ok() const noexcept;
};

/// Checks the four apartment relations on `samples` random instances each.
RelationReport relation_checks(std::shared_ptr<const BuildingContext> ctx, std::size_t samples, std::uint64_t seed);

/// Tuple as "(v1; v2; ...)" for counterexample dumps.
std::string tuple_string(std::span<const FpVector> b);

}  // namespace stw
