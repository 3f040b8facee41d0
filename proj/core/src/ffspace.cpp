#include "stw/ffspace.hpp"

#include <algorithm>
#include <sstream>

#include "stw/error.hpp"
#include "stw/modarith.hpp"

namespace stw {

PrimeModulus::PrimeModulus(std::uint32_t p) : p_(p) {
  if (p < 2 || p >= (1u << 16)) throw DomainError("modulus must lie in [2, 2^16): " + std::to_string(p));
  if (!is_prime_u64(p)) throw DomainError("modulus is not prime: " + std::to_string(p));
}

std::uint32_t PrimeModulus::inv(std::uint32_t a) const {
  if (a % p_ == 0) throw DomainError("zero has no inverse mod " + std::to_string(p_));
  return static_cast<std::uint32_t>(invmod(a, p_));
}

// ---------------------------------------------------------------- FpVector

FpVector::FpVector(PrimeModulus p, std::initializer_list<std::int64_t> entries)
    : FpVector(p, std::span<const std::int64_t>(entries.begin(), entries.size())) {}

FpVector::FpVector(PrimeModulus p, std::span<const std::int64_t> entries) : p_(p) {
  entries_.reserve(entries.size());
  for (std::int64_t x : entries) entries_.push_back(p.reduce(x));
}

FpVector::FpVector(PrimeModulus p, std::vector<std::uint32_t> reduced_entries)
    : p_(p), entries_(std::move(reduced_entries)) {
  for (auto& x : entries_) x %= p.value();
}

FpVector FpVector::unit(PrimeModulus p, std::size_t n, std::size_t i) {
  if (i >= n) throw DomainError("unit vector index out of range");
  FpVector v(p, n);
  v.entries_[i] = 1;
  return v;
}

FpVector FpVector::from_code(PrimeModulus p, std::size_t n, std::uint64_t code) {
  FpVector v(p, n);
  for (std::size_t i = n; i-- > 0;) {
    v.entries_[i] = static_cast<std::uint32_t>(code % p.value());
    code /= p.value();
  }
  return v;
}

bool FpVector::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](std::uint32_t x) { return x == 0; });
}

std::size_t FpVector::leading_index() const noexcept {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i] != 0) return i;
  return entries_.size();
}

std::uint64_t FpVector::code() const noexcept {
  std::uint64_t c = 0;
  for (std::uint32_t x : entries_) c = c * p_.value() + x;
  return c;
}

FpVector FpVector::scaled(std::uint32_t c) const {
  FpVector out(*this);
  c %= p_.value();
  for (auto& x : out.entries_) x = p_.mul(x, c);
  return out;
}

FpVector FpVector::normalized() const {
  std::size_t lead = leading_index();
  if (lead == entries_.size()) return *this;
  return scaled(p_.inv(entries_[lead]));
}

FpVector& FpVector::operator+=(const FpVector& rhs) {
  if (rhs.size() != size() || !(rhs.p_ == p_)) throw DomainError("vector addition: shape or modulus mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = p_.add(entries_[i], rhs.entries_[i]);
  return *this;
}

FpVector& FpVector::operator-=(const FpVector& rhs) {
  if (rhs.size() != size() || !(rhs.p_ == p_)) throw DomainError("vector subtraction: shape or modulus mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = p_.sub(entries_[i], rhs.entries_[i]);
  return *this;
}

std::string FpVector::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < entries_.size(); ++i) os << (i ? "," : "") << entries_[i];
  os << ')';
  return os.str();
}

std::uint32_t dot(const FpVector& u, const FpVector& v) {
  if (u.size() != v.size() || !(u.modulus() == v.modulus())) throw DomainError("dot: shape or modulus mismatch");
  const PrimeModulus p = u.modulus();
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s = p.add(s, p.mul(u[i], v[i]));
  return s;
}

// ---------------------------------------------------------------- FpMatrix

FpMatrix::FpMatrix(PrimeModulus p, std::size_t rows, std::size_t cols, std::initializer_list<std::int64_t> row_major)
    : FpMatrix(p, rows, cols) {
  if (row_major.size() != rows * cols) throw DomainError("matrix literal has the wrong number of entries");
  std::size_t i = 0;
  for (std::int64_t x : row_major) data_[i++] = p.reduce(x);
}

FpMatrix FpMatrix::from_rows(PrimeModulus p, std::size_t cols, std::span<const FpVector> rows) {
  FpMatrix m(p, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DomainError("from_rows: row length mismatch");
    if (!(rows[r].modulus() == p)) throw DomainError("from_rows: mixed moduli");
    std::copy(rows[r].entries().begin(), rows[r].entries().end(), m.data_.begin() + r * cols);
  }
  return m;
}

FpMatrix FpMatrix::identity(PrimeModulus p, std::size_t n) {
  FpMatrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

FpVector FpMatrix::row(std::size_t r) const {
  auto s = row_span(r);
  return FpVector(p_, std::vector<std::uint32_t>(s.begin(), s.end()));
}

std::size_t rref_in_place(PrimeModulus p, std::uint32_t* data, std::size_t rows, std::size_t cols,
                          std::size_t* pivots) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t sel = rank;
    while (sel < rows && data[sel * cols + c] == 0) ++sel;
    if (sel == rows) continue;
    if (sel != rank) std::swap_ranges(data + sel * cols, data + sel * cols + cols, data + rank * cols);
    std::uint32_t* prow = data + rank * cols;
    const std::uint32_t inv = p.inv(prow[c]);
    for (std::size_t j = c; j < cols; ++j) prow[j] = p.mul(prow[j], inv);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      std::uint32_t* row = data + r * cols;
      const std::uint32_t f = row[c];
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) row[j] = p.sub(row[j], p.mul(f, prow[j]));
    }
    if (pivots) pivots[rank] = c;
    ++rank;
  }
  return rank;
}

RrefResult rref(const FpMatrix& m) {
  RrefResult out{m, 0, {}};
  std::vector<std::size_t> piv(std::min(m.rows(), m.cols()));
  out.rank = rref_in_place(m.modulus(), out.echelon.mutable_data().data(), m.rows(), m.cols(), piv.data());
  piv.resize(out.rank);
  out.pivots = std::move(piv);
  return out;
}

// ---------------------------------------------------------------- Subspace

Subspace Subspace::zero(PrimeModulus p, std::size_t n) { return Subspace(FpMatrix(p, 0, n)); }

Subspace Subspace::full(PrimeModulus p, std::size_t n) { return Subspace(FpMatrix::identity(p, n)); }

Subspace Subspace::from_echelon(FpMatrix basis) { return Subspace(std::move(basis)); }

std::vector<FpVector> Subspace::basis_vectors() const {
  std::vector<FpVector> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) out.push_back(basis_.row(i));
  return out;
}

std::vector<std::size_t> Subspace::pivots() const {
  std::vector<std::size_t> out;
  out.reserve(dim());
  for (std::size_t r = 0; r < dim(); ++r) {
    auto row = basis_.row_span(r);
    out.push_back(static_cast<std::size_t>(std::find_if(row.begin(), row.end(), [](auto x) { return x != 0; }) -
                                           row.begin()));
  }
  return out;
}

bool Subspace::contains(const FpVector& x) const {
  if (x.size() != ambient_dim() || !(x.modulus() == modulus())) throw DomainError("contains: ambient mismatch");
  // Reduce x by the echelon rows; x is inside iff the remainder vanishes.
  const PrimeModulus p = modulus();
  std::vector<std::uint32_t> rem(x.entries().begin(), x.entries().end());
  const auto piv = pivots();
  for (std::size_t r = 0; r < dim(); ++r) {
    const std::uint32_t f = rem[piv[r]];
    if (f == 0) continue;
    auto row = basis_.row_span(r);
    for (std::size_t j = piv[r]; j < rem.size(); ++j) rem[j] = p.sub(rem[j], p.mul(f, row[j]));
  }
  return std::all_of(rem.begin(), rem.end(), [](std::uint32_t v) { return v == 0; });
}

bool Subspace::contains(const Subspace& other) const {
  if (other.ambient_dim() != ambient_dim() || !(other.modulus() == modulus()))
    throw DomainError("contains: ambient mismatch");
  for (std::size_t r = 0; r < other.dim(); ++r)
    if (!contains(other.basis_vector(r))) return false;
  return true;
}

FpVector Subspace::coordinates(const FpVector& x) const {
  if (!contains(x)) throw DomainError("coordinates: vector " + x.to_string() + " is not in the subspace");
  const auto piv = pivots();
  FpVector c(modulus(), dim());
  for (std::size_t r = 0; r < dim(); ++r) c.set(r, x[piv[r]]);
  return c;
}

FpVector Subspace::embed(const FpVector& coords) const {
  if (coords.size() != dim()) throw DomainError("embed: coordinate length mismatch");
  const PrimeModulus p = modulus();
  FpVector out(p, ambient_dim());
  std::vector<std::uint32_t> acc(ambient_dim(), 0);
  for (std::size_t r = 0; r < dim(); ++r) {
    if (coords[r] == 0) continue;
    auto row = basis_.row_span(r);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] = p.add(acc[j], p.mul(coords[r], row[j]));
  }
  return FpVector(p, std::move(acc));
}

std::strong_ordering operator<=>(const Subspace& a, const Subspace& b) {
  if (auto c = a.ambient_dim() <=> b.ambient_dim(); c != 0) return c;
  if (auto c = a.dim() <=> b.dim(); c != 0) return c;
  auto da = a.basis_.data();
  auto db = b.basis_.data();
  return std::lexicographical_compare_three_way(da.begin(), da.end(), db.begin(), db.end());
}

std::size_t Subspace::hash() const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL ^ (ambient_dim() * 131 + dim());
  for (std::uint32_t x : basis_.data()) h = (h ^ x) * 0x100000001b3ULL;
  return h;
}

std::string Subspace::to_string() const {
  std::ostringstream os;
  os << '<';
  for (std::size_t r = 0; r < dim(); ++r) os << (r ? ", " : "") << basis_vector(r).to_string();
  os << '>';
  return os.str();
}

Subspace span(PrimeModulus p, std::size_t n, std::span<const FpVector> vectors) {
  FpMatrix m = FpMatrix::from_rows(p, n, vectors);
  const std::size_t rank = rref_in_place(p, m.mutable_data().data(), m.rows(), n);
  FpMatrix basis(p, rank, n);
  std::copy_n(m.data().begin(), rank * n, basis.mutable_data().begin());
  return Subspace::from_echelon(std::move(basis));
}

Subspace span(std::span<const FpVector> vectors) {
  if (vectors.empty()) throw DomainError("span: empty list has no ambient space; pass modulus and dimension");
  return span(vectors.front().modulus(), vectors.front().size(), vectors);
}

Subspace span(std::initializer_list<FpVector> vectors) {
  return span(std::span<const FpVector>(vectors.begin(), vectors.size()));
}

namespace {

void require_same_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || !(a.modulus() == b.modulus()))
    throw DomainError("subspace operation: ambient mismatch");
}

}  // namespace

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  auto rows = a.basis_vectors();
  auto more = b.basis_vectors();
  rows.insert(rows.end(), more.begin(), more.end());
  return span(a.modulus(), a.ambient_dim(), rows);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  // Zassenhaus: reduce [a | a ; b | 0]; rows whose left half vanishes span a ∩ b.
  const PrimeModulus p = a.modulus();
  const std::size_t n = a.ambient_dim();
  FpMatrix m(p, a.dim() + b.dim(), 2 * n);
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t j = 0; j < n; ++j) {
      m.set(r, j, a.basis().at(r, j));
      m.set(r, n + j, a.basis().at(r, j));
    }
  for (std::size_t r = 0; r < b.dim(); ++r)
    for (std::size_t j = 0; j < n; ++j) m.set(a.dim() + r, j, b.basis().at(r, j));
  const std::size_t rank = rref_in_place(p, m.mutable_data().data(), m.rows(), m.cols());
  std::vector<FpVector> rows;
  for (std::size_t r = 0; r < rank; ++r) {
    auto row = m.row_span(r);
    if (std::all_of(row.begin(), row.begin() + n, [](auto x) { return x == 0; }))
      rows.emplace_back(p, std::vector<std::uint32_t>(row.begin() + n, row.end()));
  }
  return span(p, n, rows);
}

SubspaceOps subspace_ops(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  SubspaceOps ops{subspace_sum(a, b), intersect(a, b), a.contains(b), false};
  ops.is_direct_sum = ops.sum.dim() == a.dim() + b.dim();
  return ops;
}

std::uint64_t checked_power(std::uint64_t p, std::size_t n, std::uint64_t budget) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (v > budget / p) {
      throw BudgetExceeded("p^n = " + std::to_string(p) + "^" + std::to_string(n) + " exceeds the enumeration budget " +
                           std::to_string(budget));
    }
    v *= p;
  }
  return v;
}

std::vector<FpVector> all_vectors(std::size_t n, PrimeModulus p, std::uint64_t budget) {
  const std::uint64_t total = checked_power(p.value(), n, budget);
  std::vector<FpVector> out;
  out.reserve(total);
  for (std::uint64_t c = 0; c < total; ++c) out.push_back(FpVector::from_code(p, n, c));
  return out;
}

std::vector<FpVector> projective_points(std::size_t n, PrimeModulus p, std::uint64_t budget) {
  std::vector<FpVector> out;
  for (auto& v : all_vectors(n, p, budget)) {
    const std::size_t lead = v.leading_index();
    if (lead < n && v[lead] == 1) out.push_back(std::move(v));
  }
  return out;
}

std::vector<Subspace> enumerate_subspaces(std::size_t n, PrimeModulus p, std::size_t k, std::uint64_t budget) {
  if (k > n) throw DomainError("enumerate_subspaces: k exceeds n");
  checked_power(p.value(), n, budget);
  std::vector<Subspace> out;
  if (k == 0) {
    out.push_back(Subspace::zero(p, n));
    return out;
  }

  // Walk every pivot pattern, then every filling of its free positions.
  std::vector<std::size_t> piv(k);
  for (std::size_t i = 0; i < k; ++i) piv[i] = i;
  while (true) {
    std::vector<std::pair<std::size_t, std::size_t>> free_slots;
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = piv[r] + 1; c < n; ++c)
        if (std::find(piv.begin(), piv.end(), c) == piv.end()) free_slots.emplace_back(r, c);

    std::vector<std::uint32_t> digits(free_slots.size(), 0);
    while (true) {
      FpMatrix m(p, k, n);
      for (std::size_t r = 0; r < k; ++r) m.set(r, piv[r], 1);
      for (std::size_t s = 0; s < free_slots.size(); ++s) m.set(free_slots[s].first, free_slots[s].second, digits[s]);
      out.push_back(Subspace::from_echelon(std::move(m)));
      std::size_t s = 0;
      while (s < digits.size() && ++digits[s] == p.value()) digits[s++] = 0;
      if (s == digits.size()) break;
    }

    std::size_t i = k;
    while (i > 0 && piv[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++piv[i - 1];
    for (std::size_t j = i; j < k; ++j) piv[j] = piv[j - 1] + 1;
  }
  std::sort(out.begin(), out.end(), [](const Subspace& a, const Subspace& b) {
    auto da = a.basis().data();
    auto db = b.basis().data();
    return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
  });
  return out;
}

}  // namespace stw
