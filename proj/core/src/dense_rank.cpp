#include <algorithm>
#include <istream>
#include <ostream>

#include "stw/error.hpp"
#include "stw/modarith.hpp"
#include "stw/rank.hpp"

namespace stw {

namespace {

// Row operations allowed between reductions: each adds less than 2^52.
constexpr unsigned kLazyAdds = 4000;

constexpr char kDenseMagic[8] = {'S', 'T', 'W', 'D', 'N', 'S', 'E', '1'};

void axpy(std::uint64_t* __restrict acc, const std::uint32_t* __restrict row, std::uint64_t c, std::size_t len) {
  for (std::size_t t = 0; t < len; ++t) acc[t] += c * row[t];
}

void reduce_range(std::uint64_t* acc, std::size_t len, std::uint64_t q) {
  for (std::size_t t = 0; t < len; ++t) acc[t] %= q;
}

void put_u64(std::ostream& out, std::uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DomainError("truncated dense echelon snapshot");
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
  return x;
}

}  // namespace

DenseModularEchelon::DenseModularEchelon(std::uint64_t q, std::size_t ncols)
    : q_(q), ncols_(ncols), pivot_row_(ncols, -1), scratch_(ncols, 0) {
  if (q < 2 || q >= kMaxPrime || !is_prime_u64(q)) throw DomainError("dense echelon needs a prime below 2^26");
}

void DenseModularEchelon::load_scratch(const IntVector& v) const {
  std::fill(scratch_.begin(), scratch_.end(), 0);
  const auto qs = static_cast<std::int64_t>(q_);
  for (const auto& [i, x] : v.entries) {
    if (i >= ncols_) throw DomainError("dense echelon: column out of range");
    const std::int64_t r = x % qs;
    scratch_[i] = static_cast<std::uint64_t>(r < 0 ? r + qs : r);
  }
}

std::size_t DenseModularEchelon::reduce() const {
  std::uint64_t* acc = scratch_.data();
  unsigned adds = 0;
  for (std::size_t j = 0; j < ncols_; ++j) {
    if (acc[j] == 0) continue;
    const std::uint64_t x = acc[j] % q_;
    acc[j] = 0;
    if (x == 0) continue;
    const std::int32_t r = pivot_row_[j];
    if (r < 0) {
      acc[j] = x;
      return j;
    }
    axpy(acc + j + 1, rows_[r].data(), q_ - x, rows_[r].size());
    if (++adds == kLazyAdds) {
      reduce_range(acc + j + 1, ncols_ - j - 1, q_);
      adds = 0;
    }
  }
  return ncols_;
}

bool DenseModularEchelon::insert(const IntVector& v) {
  load_scratch(v);
  const std::size_t j = reduce();
  if (j == ncols_) return false;
  std::uint64_t* acc = scratch_.data();
  reduce_range(acc + j, ncols_ - j, q_);
  const std::uint64_t inv = invmod(acc[j], q_);
  std::size_t end = ncols_;
  while (end > j + 1 && acc[end - 1] == 0) --end;  // trailing zeros are not stored
  std::vector<std::uint32_t> row(end - j - 1);
  for (std::size_t t = 0; t < row.size(); ++t) row[t] = static_cast<std::uint32_t>(acc[j + 1 + t] * inv % q_);
  pivot_row_[j] = static_cast<std::int32_t>(rows_.size());
  pivot_col_.push_back(static_cast<std::uint32_t>(j));
  stored_ += row.size();
  rows_.push_back(std::move(row));
  return true;
}

bool DenseModularEchelon::contains(const IntVector& v) const {
  load_scratch(v);
  return reduce() == ncols_;
}

void DenseModularEchelon::save(std::ostream& out) const {
  out.write(kDenseMagic, sizeof kDenseMagic);
  put_u64(out, q_);
  put_u64(out, ncols_);
  put_u64(out, rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    put_u64(out, pivot_col_[r]);
    put_u64(out, rows_[r].size());
    out.write(reinterpret_cast<const char*>(rows_[r].data()),
              static_cast<std::streamsize>(rows_[r].size() * sizeof(std::uint32_t)));
  }
}

DenseModularEchelon DenseModularEchelon::load(std::istream& in) {
  char magic[sizeof kDenseMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kDenseMagic))
    throw DomainError("not a dense echelon snapshot");
  const std::uint64_t q = get_u64(in);
  const std::uint64_t ncols = get_u64(in);
  DenseModularEchelon e(q, ncols);
  const std::uint64_t rows = get_u64(in);
  if (rows > ncols) throw DomainError("corrupt dense echelon snapshot");
  for (std::uint64_t r = 0; r < rows; ++r) {
    const std::uint64_t j = get_u64(in);
    if (j >= ncols || e.pivot_row_[j] >= 0) throw DomainError("corrupt dense echelon snapshot");
    const std::uint64_t len = get_u64(in);
    if (len > ncols - j - 1) throw DomainError("corrupt dense echelon snapshot");
    std::vector<std::uint32_t> row(len);
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t))))
      throw DomainError("truncated dense echelon snapshot");
    e.pivot_row_[j] = static_cast<std::int32_t>(e.rows_.size());
    e.pivot_col_.push_back(static_cast<std::uint32_t>(j));
    e.stored_ += row.size();
    e.rows_.push_back(std::move(row));
  }
  return e;
}

}  // namespace stw
