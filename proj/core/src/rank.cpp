#include "stw/rank.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <string>
#include <thread>

#include "stw/error.hpp"
#include "stw/modarith.hpp"

namespace stw {

namespace {

constexpr char kSnapshotMagic[8] = {'S', 'T', 'W', 'S', 'P', 'A', 'N', '1'};

void put_u64(std::ostream& out, std::uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DomainError("truncated span snapshot");
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
  return x;
}

void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  if (n > (1ULL << 32)) throw DomainError("corrupt span snapshot");
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) throw DomainError("truncated span snapshot");
  return s;
}

constexpr std::size_t kMaxPrimes = 16;

using MinHeap = std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>>;

}  // namespace

RankEngineConfig RankEngineConfig::modular(std::size_t prime_count, std::uint64_t seed) {
  RankEngineConfig c;
  c.primes = random_primes(61, prime_count, seed);
  return c;
}

RankEngineConfig RankEngineConfig::exact_mode() {
  RankEngineConfig c;
  c.exact = true;
  return c;
}

ModVector to_modular(const IntVector& v, std::uint64_t q) {
  ModVector out;
  out.entries.reserve(v.entries.size());
  for (const auto& [i, x] : v.entries) {
    std::int64_t r = x % static_cast<std::int64_t>(q);
    std::uint64_t u = r < 0 ? static_cast<std::uint64_t>(r + static_cast<std::int64_t>(q)) : static_cast<std::uint64_t>(r);
    if (u) out.entries.emplace_back(i, u);
  }
  return out;
}

ModVector to_modular(const RatVector& v, std::uint64_t q) {
  ModVector out;
  out.entries.reserve(v.entries.size());
  for (const auto& [i, x] : v.entries) {
    const std::uint64_t num = mpz_fdiv_ui(x.get_num_mpz_t(), q);
    const std::uint64_t den = mpz_fdiv_ui(x.get_den_mpz_t(), q);
    if (den == 0) throw RankDisagreement("denominator vanishes modulo " + std::to_string(q) + "; use exact mode");
    const std::uint64_t u = mulmod(num, invmod(den, q), q);
    if (u) out.entries.emplace_back(i, u);
  }
  return out;
}

// ---------------------------------------------------------------- modular

ModularEchelon::ModularEchelon(std::uint64_t q, std::size_t ncols) : q_(q), ncols_(ncols), pivot_row_(ncols, -1) {
  if (!is_prime_u64(q)) throw DomainError("rank engine modulus is not prime: " + std::to_string(q));
}

ModVector ModularEchelon::reduce_int(const IntVector& v) const { return normal_form(to_modular(v, q_)); }
ModVector ModularEchelon::reduce_rational(const RatVector& v) const { return normal_form(to_modular(v, q_)); }

ModVector ModularEchelon::normal_form(const ModVector& v) const {
  thread_local std::vector<std::uint64_t> acc;
  if (acc.size() < ncols_) acc.resize(ncols_, 0);
  MinHeap heap;
  for (const auto& [i, x] : v.entries) {
    if (i >= ncols_) throw DomainError("vector index outside the flag range");
    if (acc[i] == 0) heap.push(i);
    acc[i] = addmod(acc[i], x % q_, q_);
  }
  ModVector out;
  while (!heap.empty()) {
    const std::uint32_t c = heap.top();
    heap.pop();
    const std::uint64_t x = acc[c];
    if (x == 0) continue;
    acc[c] = 0;
    const std::int32_t r = pivot_row_[c];
    if (r < 0) {
      out.entries.emplace_back(c, x);
      continue;
    }
    const auto& row = rows_[static_cast<std::size_t>(r)].entries;
    for (std::size_t k = 1; k < row.size(); ++k) {
      const std::uint32_t j = row[k].first;
      const std::uint64_t old = acc[j];
      acc[j] = submod(old, mulmod(x, row[k].second, q_), q_);
      if (old == 0 && acc[j] != 0) heap.push(j);
    }
  }
  return out;
}

bool ModularEchelon::insert_reduced(ModVector v) {
  if (v.entries.empty()) return false;
  const std::uint32_t lead = v.entries.front().first;
  if (pivot_row_[lead] >= 0) throw DomainError("insert_reduced: vector is not reduced");
  const std::uint64_t inv = invmod(v.entries.front().second, q_);
  for (auto& e : v.entries) e.second = mulmod(e.second, inv, q_);
  stored_ += v.entries.size();
  pivot_row_[lead] = static_cast<std::int32_t>(rows_.size());
  rows_.push_back(std::move(v));
  return true;
}

void ModularEchelon::save(std::ostream& out) const {
  put_u64(out, q_);
  put_u64(out, ncols_);
  put_u64(out, rows_.size());
  for (const auto& row : rows_) {
    put_u64(out, row.entries.size());
    for (const auto& [i, x] : row.entries) {
      put_u64(out, i);
      put_u64(out, x);
    }
  }
}

ModularEchelon ModularEchelon::load(std::istream& in) {
  const std::uint64_t q = get_u64(in);
  const std::uint64_t ncols = get_u64(in);
  ModularEchelon e(q, ncols);
  const std::uint64_t nrows = get_u64(in);
  for (std::uint64_t r = 0; r < nrows; ++r) {
    ModVector row;
    const std::uint64_t nnz = get_u64(in);
    row.entries.reserve(nnz);
    for (std::uint64_t k = 0; k < nnz; ++k) {
      const std::uint64_t i = get_u64(in);
      const std::uint64_t x = get_u64(in);
      if (i >= ncols || x == 0 || x >= q) throw DomainError("corrupt span snapshot row");
      row.entries.emplace_back(static_cast<std::uint32_t>(i), x);
    }
    if (row.entries.empty() || row.entries.front().second != 1 || e.pivot_row_[row.entries.front().first] >= 0)
      throw DomainError("corrupt span snapshot pivot");
    e.stored_ += row.entries.size();
    e.pivot_row_[row.entries.front().first] = static_cast<std::int32_t>(e.rows_.size());
    e.rows_.push_back(std::move(row));
  }
  return e;
}

// ---------------------------------------------------------------- exact

ExactEchelon::ExactEchelon(std::size_t ncols) : ncols_(ncols), pivot_row_(ncols, -1) {}

RatVector ExactEchelon::normal_form(const RatVector& v) const {
  std::map<std::uint32_t, Rational> acc;
  for (const auto& [i, x] : v.entries) {
    if (i >= ncols_) throw DomainError("vector index outside the flag range");
    acc[i] += x;
  }
  RatVector out;
  auto it = acc.begin();
  while (it != acc.end()) {
    const std::uint32_t c = it->first;
    if (it->second == 0) {
      it = acc.erase(it);
      continue;
    }
    const std::int32_t r = pivot_row_[c];
    if (r < 0) {
      out.entries.emplace_back(c, it->second);
      ++it;
      continue;
    }
    const Rational x = it->second;
    const auto& row = rows_[static_cast<std::size_t>(r)].entries;
    for (std::size_t k = 1; k < row.size(); ++k) acc[row[k].first] -= x * row[k].second;
    it = acc.erase(it);
  }
  return out;
}

bool ExactEchelon::insert_reduced(RatVector v) {
  if (v.entries.empty()) return false;
  const std::uint32_t lead = v.entries.front().first;
  if (pivot_row_[lead] >= 0) throw DomainError("insert_reduced: vector is not reduced");
  const Rational inv = 1 / v.entries.front().second;
  for (auto& e : v.entries) e.second *= inv;
  pivot_row_[lead] = static_cast<std::int32_t>(rows_.size());
  rows_.push_back(std::move(v));
  return true;
}

void ExactEchelon::save(std::ostream& out) const {
  put_u64(out, ncols_);
  put_u64(out, rows_.size());
  for (const auto& row : rows_) {
    put_u64(out, row.entries.size());
    for (const auto& [i, x] : row.entries) {
      put_u64(out, i);
      put_string(out, x.get_str());
    }
  }
}

ExactEchelon ExactEchelon::load(std::istream& in) {
  ExactEchelon e(get_u64(in));
  const std::uint64_t nrows = get_u64(in);
  for (std::uint64_t r = 0; r < nrows; ++r) {
    RatVector row;
    const std::uint64_t nnz = get_u64(in);
    for (std::uint64_t k = 0; k < nnz; ++k) {
      const std::uint64_t i = get_u64(in);
      Rational x(get_string(in));
      x.canonicalize();
      if (i >= e.ncols_ || x == 0) throw DomainError("corrupt span snapshot row");
      row.entries.emplace_back(static_cast<std::uint32_t>(i), std::move(x));
    }
    if (row.entries.empty() || row.entries.front().second != 1 || e.pivot_row_[row.entries.front().first] >= 0)
      throw DomainError("corrupt span snapshot pivot");
    e.pivot_row_[row.entries.front().first] = static_cast<std::int32_t>(e.rows_.size());
    e.rows_.push_back(std::move(row));
  }
  return e;
}

// ---------------------------------------------------------------- SpanBasis

SpanBasis::SpanBasis(std::size_t ncols, RankEngineConfig config) : ncols_(ncols), config_(std::move(config)) {
  if (ncols > static_cast<std::size_t>(INT32_MAX)) throw BudgetExceeded("too many flag coordinates");
  if (config_.exact) {
    exact_.emplace(ncols);
  } else {
    if (config_.primes.empty() || config_.primes.size() > kMaxPrimes)
      throw DomainError("modular rank engine needs between 1 and 16 primes");
    std::vector<std::uint64_t> sorted = config_.primes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainError("rank engine primes must be distinct");
    for (std::uint64_t q : config_.primes) modular_.emplace_back(q, ncols);
  }
}

bool SpanBasis::record(std::span<const bool> grew) {
  for (bool g : grew)
    if (g != grew[0]) {
      throw RankDisagreement("modular rank engines disagree at rank " + std::to_string(rank_) +
                             "; rerun with exact arithmetic");
    }
  if (grew[0]) ++rank_;
  return grew[0];
}

bool SpanBasis::insert(const IntVector& v) {
  if (exact_) {
    const bool g = exact_->insert(to_rational(v));
    rank_ += g;
    return g;
  }
  bool arr[kMaxPrimes];
  for (std::size_t i = 0; i < modular_.size(); ++i) arr[i] = modular_[i].insert(to_modular(v, modular_[i].prime()));
  return record(std::span<const bool>(arr, modular_.size()));
}

bool SpanBasis::insert(const RatVector& v) {
  if (exact_) {
    const bool g = exact_->insert(v);
    rank_ += g;
    return g;
  }
  bool arr[kMaxPrimes];
  for (std::size_t i = 0; i < modular_.size(); ++i) arr[i] = modular_[i].insert(to_modular(v, modular_[i].prime()));
  return record(std::span<const bool>(arr, modular_.size()));
}

std::size_t SpanBasis::insert_batch(std::span<const IntVector> batch, std::size_t ceiling) {
  const unsigned workers = std::max(1u, config_.workers);
  if (exact_ || workers == 1 || batch.size() < 2 * workers) {
    std::size_t used = 0;
    for (const auto& v : batch) {
      if (rank_ >= ceiling) break;
      insert(v);
      ++used;
    }
    return used;
  }
  // Pre-reduce against the frozen state in parallel, then insert serially in batch order.
  const std::size_t m = modular_.size();
  std::vector<std::vector<ModVector>> reduced(batch.size(), std::vector<ModVector>(m));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < batch.size(); k += workers)
        for (std::size_t e = 0; e < m; ++e) reduced[k][e] = modular_[e].reduce_int(batch[k]);
    });
  }
  for (auto& t : pool) t.join();
  std::size_t used = 0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (rank_ >= ceiling) break;
    bool arr[kMaxPrimes];
    for (std::size_t e = 0; e < m; ++e) arr[e] = modular_[e].insert(reduced[k][e]);
    record(std::span<const bool>(arr, m));
    ++used;
  }
  return used;
}

bool SpanBasis::contains(const RatVector& v) const {
  if (exact_) return exact_->normal_form(v).empty();
  bool answer = modular_[0].reduce_rational(v).empty();
  for (std::size_t i = 1; i < modular_.size(); ++i)
    if (modular_[i].reduce_rational(v).empty() != answer)
      throw RankDisagreement("modular engines disagree on span membership; rerun with exact arithmetic");
  return answer;
}

bool SpanBasis::contains(const IntVector& v) const { return contains(to_rational(v)); }

RatVector SpanBasis::normal_form(const RatVector& v) const {
  if (!exact_) throw DomainError("exact normal form requires exact mode");
  return exact_->normal_form(v);
}

ModVector SpanBasis::normal_form_mod(const RatVector& v, std::size_t prime_index) const {
  if (exact_) throw DomainError("modular normal form requires modular mode");
  return modular_.at(prime_index).reduce_rational(v);
}

void SpanBasis::save(std::ostream& out) const {
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put_u64(out, ncols_);
  put_u64(out, config_.exact ? 1 : 0);
  put_u64(out, config_.primes.size());
  for (std::uint64_t q : config_.primes) put_u64(out, q);
  put_u64(out, rank_);
  if (exact_) {
    exact_->save(out);
  } else {
    for (const auto& e : modular_) e.save(out);
  }
}

SpanBasis SpanBasis::load(std::istream& in) {
  char magic[sizeof kSnapshotMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kSnapshotMagic))
    throw DomainError("not a span snapshot (bad magic or version)");
  const std::uint64_t ncols = get_u64(in);
  RankEngineConfig config;
  config.exact = get_u64(in) != 0;
  const std::uint64_t nprimes = get_u64(in);
  if (nprimes > kMaxPrimes) throw DomainError("corrupt span snapshot");
  for (std::uint64_t i = 0; i < nprimes; ++i) config.primes.push_back(get_u64(in));
  const std::uint64_t rank = get_u64(in);
  SpanBasis s(ncols, config);
  if (config.exact) {
    s.exact_.emplace(ExactEchelon::load(in));
    if (s.exact_->rank() != rank || s.exact_->ncols() != ncols) throw DomainError("corrupt span snapshot");
  } else {
    for (std::size_t i = 0; i < s.modular_.size(); ++i) {
      s.modular_[i] = ModularEchelon::load(in);
      if (s.modular_[i].rank() != rank || s.modular_[i].prime() != config.primes[i] || s.modular_[i].ncols() != ncols)
        throw DomainError("corrupt span snapshot");
    }
  }
  s.rank_ = rank;
  return s;
}

std::size_t rank_of(std::span<const IntVector> vectors, std::size_t ncols, const RankEngineConfig& config) {
  SpanBasis s(ncols, config);
  for (const auto& v : vectors) s.insert(v);
  return s.rank();
}

std::size_t rank_of(std::span<const RatVector> vectors, std::size_t ncols, const RankEngineConfig& config) {
  SpanBasis s(ncols, config);
  for (const auto& v : vectors) s.insert(v);
  return s.rank();
}

}  // namespace stw
