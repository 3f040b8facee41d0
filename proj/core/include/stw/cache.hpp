#pragma once

// Versioned on-disk caches for subspace tables, splitting lists, flag indices,
// boundary matrices and span snapshots. Files are plain text with a one-line
// header naming the kind, the format version and the parameters; a header that
// does not match is treated as a miss. Writing the same value always produces
// the same bytes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stw/building.hpp"
#include "stw/ffspace.hpp"
#include "stw/sparse.hpp"
#include "stw/symplectic.hpp"

namespace stw {

/// Bump on any change to a cached representation.
inline constexpr std::uint32_t kCacheFormatVersion = 1;

void write_subspace_table(std::ostream& out, std::size_t n, PrimeModulus p, std::size_t k,
                          const std::vector<Subspace>& table);
std::optional<std::vector<Subspace>> read_subspace_table(std::istream& in, std::size_t n, PrimeModulus p, std::size_t k);

void write_splittings(std::ostream& out, std::size_t g, PrimeModulus p, const std::vector<SymplecticSplitting>& list);
std::optional<std::vector<SymplecticSplitting>> read_splittings(std::istream& in, std::size_t g, PrimeModulus p);

/// The chain of subspace indices for every complete flag, in index order.
void write_flag_index(std::ostream& out, const BuildingContext& ctx);
std::optional<std::vector<std::vector<std::uint32_t>>> read_flag_index(std::istream& in, std::size_t n, PrimeModulus p);

/// Boundary columns of every degree r = 0 .. n-2.
void write_boundaries(std::ostream& out, const BuildingChainComplex& complex);
std::optional<std::vector<std::vector<IntVector>>> read_boundaries(std::istream& in, std::size_t n, PrimeModulus p);

class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path subspace_path(std::size_t n, PrimeModulus p, std::size_t k) const;
  std::filesystem::path splitting_path(std::size_t g, PrimeModulus p) const;
  std::filesystem::path flag_index_path(std::size_t n, PrimeModulus p) const;
  std::filesystem::path boundary_path(std::size_t n, PrimeModulus p) const;
  std::filesystem::path snapshot_path(const std::string& name) const;

  /// Loads the table or enumerates and stores it. `hit` reports which happened.
  std::vector<Subspace> subspaces(std::size_t n, PrimeModulus p, std::size_t k, bool* hit = nullptr) const;
  std::vector<SymplecticSplitting> splittings(std::size_t g, PrimeModulus p, bool extended, bool* hit = nullptr) const;

  void store_flag_index(const BuildingContext& ctx) const;
  void store_boundaries(const BuildingChainComplex& complex) const;

  /// Removes every cache file under the root; returns how many were deleted.
  std::size_t clear() const;

 private:
  void write_atomic(const std::filesystem::path& path, const std::string& bytes) const;
  std::filesystem::path root_;
};

/// Process-wide cache consulted by BuildingContext and the splitting enumeration
/// used by the decomposition; unset by default.
void set_default_cache(std::optional<std::filesystem::path> root);
std::optional<DiskCache> default_cache();

/// Subspace table through the default cache when one is set.
std::vector<Subspace> load_or_enumerate_subspaces(std::size_t n, PrimeModulus p, std::size_t k);

}  // namespace stw
