#pragma once

// Exact linear algebra over a prime field F_p: vectors, matrices, canonical
// subspaces and subspace enumeration.
//
// A subspace is identified by its reduced row echelon basis; two Subspace
// values compare equal iff those bases agree entry for entry.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace stw {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1ULL << 24;

class PrimeModulus {
 public:
  PrimeModulus() = default;  // F_2
  /// Throws DomainError unless 2 <= p < 2^16 and p is prime.
  explicit PrimeModulus(std::uint32_t p);

  std::uint32_t value() const noexcept { return p_; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
    std::uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept { return a * b % p_; }
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t reduce(std::int64_t x) const noexcept {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    return static_cast<std::uint32_t>(r < 0 ? r + p_ : r);
  }

  friend bool operator==(const PrimeModulus&, const PrimeModulus&) = default;

 private:
  std::uint32_t p_ = 2;
};

class FpVector {
 public:
  FpVector() = default;
  FpVector(PrimeModulus p, std::size_t n) : p_(p), entries_(n, 0) {}
  /// Entries are reduced mod p.
  FpVector(PrimeModulus p, std::initializer_list<std::int64_t> entries);
  FpVector(PrimeModulus p, std::span<const std::int64_t> entries);
  FpVector(PrimeModulus p, std::vector<std::uint32_t> reduced_entries);

  static FpVector unit(PrimeModulus p, std::size_t n, std::size_t i);
  /// Inverse of code(): base-p digits, most significant first.
  static FpVector from_code(PrimeModulus p, std::size_t n, std::uint64_t code);

  PrimeModulus modulus() const noexcept { return p_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::uint32_t operator[](std::size_t i) const { return entries_[i]; }
  std::span<const std::uint32_t> entries() const noexcept { return entries_; }
  void set(std::size_t i, std::int64_t value) { entries_[i] = p_.reduce(value); }

  bool is_zero() const noexcept;
  /// Position of the first nonzero entry, or size() for the zero vector.
  std::size_t leading_index() const noexcept;
  /// Base-p integer with entry 0 most significant; numeric order equals lexicographic order.
  std::uint64_t code() const noexcept;

  FpVector scaled(std::uint32_t c) const;
  /// Scales so the leading nonzero entry is 1. Zero stays zero.
  FpVector normalized() const;

  FpVector& operator+=(const FpVector& rhs);
  FpVector& operator-=(const FpVector& rhs);
  friend FpVector operator+(FpVector a, const FpVector& b) { return a += b; }
  friend FpVector operator-(FpVector a, const FpVector& b) { return a -= b; }

  friend bool operator==(const FpVector& a, const FpVector& b) {
    return a.p_ == b.p_ && a.entries_ == b.entries_;
  }
  friend std::strong_ordering operator<=>(const FpVector& a, const FpVector& b) {
    return a.entries_ <=> b.entries_;
  }

  std::string to_string() const;

 private:
  PrimeModulus p_;
  std::vector<std::uint32_t> entries_;
};

/// Plain dot product sum_i u_i v_i.
std::uint32_t dot(const FpVector& u, const FpVector& v);

class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(PrimeModulus p, std::size_t rows, std::size_t cols) : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  FpMatrix(PrimeModulus p, std::size_t rows, std::size_t cols, std::initializer_list<std::int64_t> row_major);
  static FpMatrix from_rows(PrimeModulus p, std::size_t cols, std::span<const FpVector> rows);
  static FpMatrix identity(PrimeModulus p, std::size_t n);

  PrimeModulus modulus() const noexcept { return p_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint32_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::int64_t value) { data_[r * cols_ + c] = p_.reduce(value); }
  std::span<const std::uint32_t> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  FpVector row(std::size_t r) const;
  std::span<const std::uint32_t> data() const noexcept { return data_; }
  std::span<std::uint32_t> mutable_data() noexcept { return data_; }

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

 private:
  PrimeModulus p_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> data_;
};

struct RrefResult {
  FpMatrix echelon;  // same shape as the input, zero rows last
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

RrefResult rref(const FpMatrix& m);

/// In-place reduced row echelon form of a row-major rows x cols block; returns the rank.
/// Pivot columns are written to `pivots` when non-null.
std::size_t rref_in_place(PrimeModulus p, std::uint32_t* data, std::size_t rows, std::size_t cols,
                          std::size_t* pivots = nullptr);

class Subspace {
 public:
  Subspace() = default;
  static Subspace zero(PrimeModulus p, std::size_t n);
  static Subspace full(PrimeModulus p, std::size_t n);
  /// Takes an already reduced row echelon basis with no zero rows. Not validated beyond shape.
  static Subspace from_echelon(FpMatrix basis);

  PrimeModulus modulus() const noexcept { return basis_.modulus(); }
  std::size_t ambient_dim() const noexcept { return basis_.cols(); }
  std::size_t dim() const noexcept { return basis_.rows(); }
  const FpMatrix& basis() const noexcept { return basis_; }
  FpVector basis_vector(std::size_t i) const { return basis_.row(i); }
  std::vector<FpVector> basis_vectors() const;
  std::vector<std::size_t> pivots() const;

  bool contains(const FpVector& x) const;
  bool contains(const Subspace& other) const;

  /// Coordinates of x (which must lie in this subspace) in the echelon basis.
  FpVector coordinates(const FpVector& x) const;
  /// Inverse of coordinates().
  FpVector embed(const FpVector& coords) const;

  friend bool operator==(const Subspace&, const Subspace&) = default;
  /// Canonical order: ambient dimension, then dimension, then echelon entries lexicographically.
  friend std::strong_ordering operator<=>(const Subspace& a, const Subspace& b);

  std::size_t hash() const noexcept;
  std::string to_string() const;

 private:
  explicit Subspace(FpMatrix basis) : basis_(std::move(basis)) {}
  FpMatrix basis_;
};

/// Span of the given vectors inside F_p^n; the empty list gives the zero subspace.
Subspace span(PrimeModulus p, std::size_t n, std::span<const FpVector> vectors);
/// Span of a nonempty list; modulus and length taken from the first vector.
Subspace span(std::span<const FpVector> vectors);
Subspace span(std::initializer_list<FpVector> vectors);

struct SubspaceOps {
  Subspace sum;
  Subspace intersection;
  bool contains = false;  // a contains b
  bool is_direct_sum = false;
};

SubspaceOps subspace_ops(const Subspace& a, const Subspace& b);
Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace intersect(const Subspace& a, const Subspace& b);

/// All k-dimensional subspaces of F_p^n in lexicographic order of their echelon matrices.
/// Throws BudgetExceeded when p^n exceeds `budget`.
std::vector<Subspace> enumerate_subspaces(std::size_t n, PrimeModulus p, std::size_t k,
                                          std::uint64_t budget = kDefaultEnumerationBudget);

/// Every vector of F_p^n in code order. Throws BudgetExceeded when p^n exceeds `budget`.
std::vector<FpVector> all_vectors(std::size_t n, PrimeModulus p, std::uint64_t budget = kDefaultEnumerationBudget);

/// Nonzero vectors with leading entry 1 (one per line), in code order.
std::vector<FpVector> projective_points(std::size_t n, PrimeModulus p,
                                        std::uint64_t budget = kDefaultEnumerationBudget);

/// p^n with overflow and budget check.
std::uint64_t checked_power(std::uint64_t p, std::size_t n, std::uint64_t budget);

}  // namespace stw

template <>
struct std::hash<stw::Subspace> {
  std::size_t operator()(const stw::Subspace& s) const noexcept { return s.hash(); }
};
