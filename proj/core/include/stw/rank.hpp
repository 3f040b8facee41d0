#pragma once

// Incremental span/rank engine over flag coordinates.
//
// Vectors are kept in semi-echelon form: every stored row has a distinct
// pivot (its smallest nonzero column) normalized to 1. Reducing a vector
// eliminates pivot columns in increasing order, which only ever introduces
// entries to the right of the column being cleared.
//
// Modular mode runs one echelon per configured prime; all must report the
// same rank after every insertion. Modular rank never exceeds rational rank,
// so reaching a known upper bound certifies the rational value. Exact mode
// eliminates over Q with GMP rationals instead.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "stw/sparse.hpp"

namespace stw {

struct RankEngineConfig {
  std::vector<std::uint64_t> primes;  // machine-word primes for modular mode
  bool exact = false;
  unsigned workers = 1;  // threads used to pre-reduce insertion batches

  /// Two reproducible random 61-bit primes.
  static RankEngineConfig modular(std::size_t prime_count = 2, std::uint64_t seed = 0x5eed);
  static RankEngineConfig exact_mode();
};

using ModVector = SparseVector<std::uint64_t>;

/// Semi-echelon basis over Z/q for a single prime q.
class ModularEchelon {
 public:
  ModularEchelon(std::uint64_t q, std::size_t ncols);

  std::uint64_t prime() const noexcept { return q_; }
  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t stored_entries() const noexcept { return stored_; }

  ModVector reduce_int(const IntVector& v) const;
  /// Throws RankDisagreement when a denominator vanishes mod q.
  ModVector reduce_rational(const RatVector& v) const;

  /// Full reduction: the result is zero at every pivot column. Linear and
  /// independent of insertion history given the same span and pivots.
  ModVector normal_form(const ModVector& v) const;
  /// Inserts an already reduced vector (output of normal_form); returns whether the rank grew.
  bool insert_reduced(ModVector v);
  bool insert(const ModVector& v) { return insert_reduced(normal_form(v)); }

  void save(std::ostream& out) const;
  static ModularEchelon load(std::istream& in);

 private:
  std::uint64_t q_;
  std::size_t ncols_;
  std::vector<ModVector> rows_;
  std::vector<std::int32_t> pivot_row_;  // column -> row or -1
  std::size_t stored_ = 0;
  // Scratch space for normal_form; mutable because reduction is logically const.
  mutable std::vector<std::uint64_t> acc_;
};

/// Semi-echelon basis over Q.
class ExactEchelon {
 public:
  explicit ExactEchelon(std::size_t ncols);

  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t rank() const noexcept { return rows_.size(); }

  RatVector normal_form(const RatVector& v) const;
  bool insert_reduced(RatVector v);
  bool insert(const RatVector& v) { return insert_reduced(normal_form(v)); }

  void save(std::ostream& out) const;
  static ExactEchelon load(std::istream& in);

 private:
  std::size_t ncols_;
  std::vector<RatVector> rows_;
  std::vector<std::int32_t> pivot_row_;
};

/// The span of inserted vectors, with rank agreement enforced across engines.
class SpanBasis {
 public:
  SpanBasis(std::size_t ncols, RankEngineConfig config);

  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t rank() const noexcept { return rank_; }
  const RankEngineConfig& config() const noexcept { return config_; }
  bool exact() const noexcept { return config_.exact; }

  /// Returns whether the rank grew. Throws RankDisagreement if the engines disagree.
  bool insert(const IntVector& v);
  bool insert(const RatVector& v);
  /// Inserts a batch in order; with workers > 1, candidates are first reduced in
  /// parallel against the current state. Stops early once `ceiling` is reached.
  /// Returns the number of candidates consumed.
  std::size_t insert_batch(std::span<const IntVector> batch, std::size_t ceiling = SIZE_MAX);

  bool contains(const IntVector& v) const;
  bool contains(const RatVector& v) const;

  /// Exact normal form modulo the span. Exact mode only.
  RatVector normal_form(const RatVector& v) const;
  /// Normal form modulo the span over Z/q for the i-th configured prime. Modular mode only.
  ModVector normal_form_mod(const RatVector& v, std::size_t prime_index = 0) const;

  const std::vector<ModularEchelon>& modular_engines() const noexcept { return modular_; }

  /// Binary snapshot (format version, config, echelon rows); load(save(x)) reproduces x bit for bit.
  void save(std::ostream& out) const;
  static SpanBasis load(std::istream& in);

 private:
  bool record(std::span<const bool> grew);

  std::size_t ncols_;
  RankEngineConfig config_;
  std::size_t rank_ = 0;
  std::vector<ModularEchelon> modular_;
  std::optional<ExactEchelon> exact_;
};

/// Dense semi-echelon basis over Z/q for a prime q < 2^26, for spans whose
/// echelon form fills in. Rows are stored from their pivot onward. Products
/// stay below 2^52, so thousands of row operations accumulate in 64 bits
/// before a reduction is needed. Not safe for concurrent use.
class DenseModularEchelon {
 public:
  static constexpr std::uint64_t kMaxPrime = 1ULL << 26;

  DenseModularEchelon(std::uint64_t q, std::size_t ncols);

  std::uint64_t prime() const noexcept { return q_; }
  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  /// Stored residues, for memory accounting.
  std::size_t stored_entries() const noexcept { return stored_; }

  bool insert(const IntVector& v);
  bool contains(const IntVector& v) const;

  void save(std::ostream& out) const;
  static DenseModularEchelon load(std::istream& in);

 private:
  // Reduces scratch_ against the stored rows; returns the first column left
  // nonzero (now without a pivot), or ncols when the vector lies in the span.
  std::size_t reduce() const;
  void load_scratch(const IntVector& v) const;

  std::uint64_t q_;
  std::size_t ncols_;
  std::size_t stored_ = 0;
  std::vector<std::int32_t> pivot_row_;
  std::vector<std::uint32_t> pivot_col_;
  std::vector<std::vector<std::uint32_t>> rows_;  // entries after the pivot; the pivot entry is 1
  mutable std::vector<std::uint64_t> scratch_;
};

/// Reduces an integer vector mod q.
ModVector to_modular(const IntVector& v, std::uint64_t q);
/// Throws RankDisagreement when a denominator vanishes mod q.
ModVector to_modular(const RatVector& v, std::uint64_t q);

/// Rank of a list of vectors through a fresh SpanBasis.
std::size_t rank_of(std::span<const IntVector> vectors, std::size_t ncols, const RankEngineConfig& config);
std::size_t rank_of(std::span<const RatVector> vectors, std::size_t ncols, const RankEngineConfig& config);

}  // namespace stw
