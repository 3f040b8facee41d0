#include "stw/building.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <set>

#include "stw/cache.hpp"
#include "stw/error.hpp"

namespace stw {

namespace {

std::uint64_t mul_checked(std::uint64_t a, std::uint64_t b, const char* what) {
  if (b != 0 && a > UINT64_MAX / b) throw BudgetExceeded(std::string(what) + " overflows 64 bits");
  return a * b;
}

std::uint64_t pow_checked(std::uint64_t p, std::size_t e) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < e; ++i) v = mul_checked(v, p, "power");
  return v;
}

// [k]_p = 1 + p + ... + p^{k-1}
std::uint64_t q_integer(std::size_t k, std::uint64_t p) { return (pow_checked(p, k) - 1) / (p - 1); }

}  // namespace

std::uint64_t gaussian_binomial(std::size_t n, std::size_t k, std::uint64_t p) {
  if (k > n) return 0;
  BigInt num = 1, den = 1;
  for (std::size_t i = 0; i < k; ++i) {
    BigInt a, b;
    mpz_ui_pow_ui(a.get_mpz_t(), p, n - i);
    mpz_ui_pow_ui(b.get_mpz_t(), p, i + 1);
    num *= a - 1;
    den *= b - 1;
  }
  BigInt q = num / den;
  if (!q.fits_ulong_p()) throw BudgetExceeded("Gaussian binomial overflows 64 bits");
  return q.get_ui();
}

std::uint64_t complete_flag_count(std::size_t n, std::uint64_t p) {
  std::uint64_t c = 1;
  for (std::size_t k = 2; k <= n; ++k) c = mul_checked(c, q_integer(k, p), "flag count");
  return c;
}

std::size_t SubspaceKeyHash::operator()(const SubspaceKey& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ k.dim;
  for (std::size_t i = 0; i < k.dim; ++i) {
    h ^= k.rows[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------- context

BuildingContext::BuildingContext(std::size_t n, PrimeModulus p, std::uint64_t flag_budget) : n_(n), p_(p) {
  if (n < 2 || n > kMaxAmbient) throw DomainError("building contexts need 2 <= n <= 8");
  std::uint64_t count = 0;
  try {
    count = complete_flag_count(n, p.value());
  } catch (const BudgetExceeded&) {
    throw BudgetExceeded("complete flag count of F_" + std::to_string(p.value()) + "^" + std::to_string(n) +
                         " overflows");
  }
  if (count > flag_budget) {
    throw BudgetExceeded("F_" + std::to_string(p.value()) + "^" + std::to_string(n) + " has " + std::to_string(count) +
                         " complete flags, over the budget of " + std::to_string(flag_budget));
  }
  flag_count_ = count;

  tables_.resize(n + 1);
  lookup_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    tables_[k] = load_or_enumerate_subspaces(n, p, k);
    for (std::uint32_t i = 0; i < tables_[k].size(); ++i) lookup_[k].emplace(key_of(tables_[k][i]), i);
  }

  const auto points = projective_points(n, p);
  supers_.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    supers_[k].resize(tables_[k].size());
    const std::uint64_t expected = q_integer(n - k, p.value());
    for (std::uint32_t i = 0; i < tables_[k].size(); ++i) {
      const Subspace& v = tables_[k][i];
      auto& list = supers_[k][i];
      for (const auto& x : points) {
        if (v.contains(x)) continue;
        auto rows = v.basis_vectors();
        rows.push_back(x);
        list.push_back(subspace_index(span(p, n, rows)));
      }
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      if (list.size() != expected) throw CheckFailure("superspace count mismatch while indexing flags");
    }
  }

  weights_.assign(n - 1, 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = 2; j + k < n; ++j) weights_[k] *= q_integer(j, p.value());
}

std::shared_ptr<const BuildingContext> BuildingContext::get(std::size_t n, PrimeModulus p, std::uint64_t flag_budget) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::uint32_t>, std::shared_ptr<const BuildingContext>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({n, p.value()});
  if (it != cache.end()) {
    if (it->second->flag_count() > flag_budget) throw BudgetExceeded("flag count over budget");
    return it->second;
  }
  auto ctx = std::make_shared<const BuildingContext>(n, p, flag_budget);
  cache.emplace(std::make_pair(n, p.value()), ctx);
  return ctx;
}

SubspaceKey BuildingContext::key_of(const Subspace& s) {
  if (s.ambient_dim() > kMaxAmbient) throw DomainError("ambient dimension too large for a subspace key");
  SubspaceKey key;
  key.dim = static_cast<std::uint8_t>(s.dim());
  const std::uint64_t p = s.modulus().value();
  for (std::size_t r = 0; r < s.dim(); ++r) {
    std::uint64_t c = 0;
    for (std::uint32_t x : s.basis().row_span(r)) c = c * p + x;
    key.rows[r] = c;
  }
  return key;
}

SubspaceKey BuildingContext::key_of_echelon(const std::uint32_t* rows, std::size_t dim) const {
  SubspaceKey key;
  key.dim = static_cast<std::uint8_t>(dim);
  const std::uint64_t p = p_.value();
  for (std::size_t r = 0; r < dim; ++r) {
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < n_; ++j) c = c * p + rows[r * n_ + j];
    key.rows[r] = c;
  }
  return key;
}

std::uint32_t BuildingContext::subspace_index(const SubspaceKey& key) const {
  if (key.dim > n_) throw DomainError("subspace dimension exceeds the ambient dimension");
  auto it = lookup_[key.dim].find(key);
  if (it == lookup_[key.dim].end()) throw DomainError("subspace is not in this building's tables");
  return it->second;
}

std::uint32_t BuildingContext::subspace_index(const Subspace& s) const {
  if (s.ambient_dim() != n_ || !(s.modulus() == p_)) throw DomainError("subspace lies in a different ambient space");
  return subspace_index(key_of(s));
}

std::uint32_t BuildingContext::step_digit(std::size_t k, std::uint32_t i, std::uint32_t j) const {
  const auto& list = supers_[k][i];
  auto it = std::lower_bound(list.begin(), list.end(), j);
  if (it == list.end() || *it != j) throw DomainError("flag step is not a containment");
  return static_cast<std::uint32_t>(it - list.begin());
}

std::uint64_t BuildingContext::flag_index_from_chain(std::span<const std::uint32_t> chain) const {
  if (chain.size() + 1 != n_) throw DomainError("complete flag must have n-1 subspaces");
  std::uint64_t idx = 0;
  std::uint32_t prev = 0;
  for (std::size_t k = 0; k + 1 < n_; ++k) {
    idx += step_digit(k, prev, chain[k]) * weights_[k];
    prev = chain[k];
  }
  return idx;
}

std::uint64_t BuildingContext::flag_index(const CompleteFlag& f) const {
  if (f.spaces.size() + 1 != n_) throw DomainError("complete flag must have n-1 subspaces");
  std::vector<std::uint32_t> chain;
  for (std::size_t k = 0; k < f.spaces.size(); ++k) {
    if (f.spaces[k].dim() != k + 1) throw DomainError("complete flag has a step of the wrong dimension");
    chain.push_back(subspace_index(f.spaces[k]));
  }
  return flag_index_from_chain(chain);
}

std::vector<std::uint32_t> BuildingContext::decode_chain(std::uint64_t index) const {
  if (index >= flag_count_) throw DomainError("flag index out of range");
  std::vector<std::uint32_t> chain;
  std::uint32_t cur = 0;
  for (std::size_t k = 0; k + 1 < n_; ++k) {
    const std::uint64_t digit = index / weights_[k];
    index %= weights_[k];
    cur = supers_[k][cur].at(digit);
    chain.push_back(cur);
  }
  return chain;
}

CompleteFlag BuildingContext::decode(std::uint64_t index) const {
  CompleteFlag f;
  auto chain = decode_chain(index);
  for (std::size_t k = 0; k < chain.size(); ++k) f.spaces.push_back(tables_[k + 1][chain[k]]);
  return f;
}

// ---------------------------------------------------------------- chain complex

namespace {

// Key of a partial flag: dimension mask in the low byte, then subspace indices in mixed radix.
std::uint64_t simplex_key(const std::vector<std::uint32_t>& s, std::uint64_t radix) {
  std::uint64_t key = 0;
  for (std::size_t i = s.size(); i-- > 1;) key = key * radix + s[i];
  return key * 256 + s[0];
}

}  // namespace

BuildingChainComplex::BuildingChainComplex(std::shared_ptr<const BuildingContext> ctx, BuildingMode mode)
    : ctx_(std::move(ctx)) {
  const std::size_t n = ctx_->n();
  const std::uint64_t limit = mode == BuildingMode::kDefault ? 1000 : 100000;
  if (ctx_->flag_count() > limit) {
    throw BudgetExceeded("homology oracle at n=" + std::to_string(n) + ", p=" + std::to_string(ctx_->modulus().value()) +
                         (mode == BuildingMode::kDefault ? " requires extended mode" : " is over the extended budget"));
  }
  std::uint64_t radix = 1;
  for (std::size_t k = 1; k < n; ++k) radix = std::max<std::uint64_t>(radix, ctx_->subspaces(k).size());
  {
    // Key must fit: 8 bits of mask plus (n-1) digits.
    long double cap = 256.0L;
    for (std::size_t k = 1; k < n; ++k) cap *= static_cast<long double>(radix);
    if (cap > 1.8e19L) throw BudgetExceeded("building too large for the homology oracle");
  }

  // Containment between arbitrary dimensions, from the one-step superspace lists.
  auto supers_in = [&](std::size_t a, std::uint32_t i, std::size_t b) {
    std::set<std::uint32_t> cur{i};
    for (std::size_t k = a; k < b; ++k) {
      std::set<std::uint32_t> next;
      for (std::uint32_t x : cur)
        for (std::uint32_t y : ctx_->superspaces(k, x)) next.insert(y);
      cur = std::move(next);
    }
    return std::vector<std::uint32_t>(cur.begin(), cur.end());
  };

  simplices_.resize(n);  // degrees -1 .. n-2
  index_.resize(n);
  simplices_[0].push_back({0});  // empty flag, mask 0
  index_[0].emplace(simplex_key(simplices_[0][0], radix), 0);
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<std::size_t> dims;
    for (std::size_t d = 1; d < n; ++d)
      if (mask & (1u << (d - 1))) dims.push_back(d);
    const std::size_t deg = dims.size();  // stored at slot deg (degree deg-1)
    std::vector<std::uint32_t> cur{mask};
    std::function<void(std::size_t)> extend = [&](std::size_t pos) {
      if (pos == dims.size()) {
        index_[deg].emplace(simplex_key(cur, radix), static_cast<std::uint32_t>(simplices_[deg].size()));
        simplices_[deg].push_back(cur);
        return;
      }
      std::vector<std::uint32_t> choices;
      if (pos == 0) {
        choices.resize(ctx_->subspaces(dims[0]).size());
        for (std::uint32_t i = 0; i < choices.size(); ++i) choices[i] = i;
      } else {
        choices = supers_in(dims[pos - 1], cur.back(), dims[pos]);
      }
      for (std::uint32_t c : choices) {
        cur.push_back(c);
        extend(pos + 1);
        cur.pop_back();
      }
    };
    extend(0);
  }

  boundaries_.resize(n - 1);  // out of degrees 0 .. n-2
  for (std::size_t deg = 1; deg < n; ++deg) {
    auto& cols = boundaries_[deg - 1];
    cols.reserve(simplices_[deg].size());
    for (const auto& s : simplices_[deg]) {
      IntVector col;
      std::vector<std::size_t> dims;
      for (std::size_t d = 1; d < n; ++d)
        if (s[0] & (1u << (d - 1))) dims.push_back(d);
      for (std::size_t drop = 0; drop < dims.size(); ++drop) {
        std::vector<std::uint32_t> face{static_cast<std::uint32_t>(s[0] & ~(1u << (dims[drop] - 1)))};
        for (std::size_t i = 0; i < dims.size(); ++i)
          if (i != drop) face.push_back(s[i + 1]);
        const std::uint32_t fi = index_[deg - 1].at(simplex_key(face, radix));
        col.entries.emplace_back(fi, drop % 2 == 0 ? 1 : -1);
      }
      col.canonicalize();
      cols.push_back(std::move(col));
    }
  }
}

std::size_t BuildingChainComplex::simplex_count(int r) const { return simplices_.at(static_cast<std::size_t>(r + 1)).size(); }

const std::vector<std::vector<std::uint32_t>>& BuildingChainComplex::simplices(int r) const {
  return simplices_.at(static_cast<std::size_t>(r + 1));
}

const std::vector<IntVector>& BuildingChainComplex::boundary(int r) const {
  return boundaries_.at(static_cast<std::size_t>(r));
}

HomologyReport homology_ranks(const BuildingChainComplex& complex, const RankEngineConfig& config) {
  const int top = complex.top_degree();
  HomologyReport rep;
  // Small buildings get exact ranks regardless of the configured engine.
  RankEngineConfig cfg = complex.context().n() <= 3 ? RankEngineConfig::exact_mode() : config;
  rep.exact = cfg.exact;
  for (int r = -1; r <= top; ++r) rep.chain_ranks.push_back(complex.simplex_count(r));
  for (int r = 0; r <= top; ++r) {
    const auto& cols = complex.boundary(r);
    rep.boundary_ranks.push_back(rank_of(std::span<const IntVector>(cols), complex.simplex_count(r - 1), cfg));
  }
  for (int r = -1; r <= top; ++r) {
    const std::int64_t dim = static_cast<std::int64_t>(rep.chain_ranks[static_cast<std::size_t>(r + 1)]);
    const std::int64_t out = r >= 0 ? static_cast<std::int64_t>(rep.boundary_ranks[static_cast<std::size_t>(r)]) : 0;
    const std::int64_t in = r < top ? static_cast<std::int64_t>(rep.boundary_ranks[static_cast<std::size_t>(r + 1)]) : 0;
    rep.betti.push_back(dim - out - in);
    const std::int64_t sign = (r % 2 == 0) ? 1 : -1;
    rep.euler_chains += sign * dim;
    rep.euler_betti += sign * rep.betti.back();
  }
  return rep;
}

namespace {

template <typename T>
bool is_cycle_impl(const SparseVector<T>& v, const BuildingContext& ctx) {
  std::map<std::vector<std::uint32_t>, T> faces;
  for (const auto& [idx, coeff] : v.entries) {
    if (idx >= ctx.flag_count()) throw DomainError("is_cycle: vector indexed outside the flag range");
    const auto chain = ctx.decode_chain(idx);
    for (std::size_t drop = 0; drop < chain.size(); ++drop) {
      std::vector<std::uint32_t> face = chain;
      face[drop] = UINT32_MAX;
      if (drop % 2 == 0)
        faces[face] += coeff;
      else
        faces[face] -= coeff;
    }
  }
  return std::all_of(faces.begin(), faces.end(), [](const auto& kv) { return kv.second == 0; });
}

}  // namespace

std::vector<std::int32_t> opposite_flag_columns(const BuildingContext& ctx) {
  const std::size_t n = ctx.n();
  const PrimeModulus p = ctx.modulus();
  // generic[k][i]: subspaces(k)[i] meets C_{n-k} trivially.
  std::vector<std::vector<char>> generic(n);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<FpVector> tail;
    for (std::size_t j = k; j < n; ++j) tail.push_back(FpVector::unit(p, n, j));
    const Subspace c = span(p, n, tail);
    const auto& table = ctx.subspaces(k);
    generic[k].resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) generic[k][i] = subspace_sum(table[i], c).dim() == n;
  }
  std::vector<std::int32_t> out(ctx.flag_count(), -1);
  std::int32_t next = 0;
  for (std::uint64_t f = 0; f < ctx.flag_count(); ++f) {
    const auto chain = ctx.decode_chain(f);
    bool opposite = true;
    for (std::size_t k = 1; k < n && opposite; ++k) opposite = generic[k][chain[k - 1]];
    if (opposite) out[f] = next++;
  }
  if (static_cast<std::uint64_t>(next) != checked_power(p.value(), n * (n - 1) / 2, UINT64_MAX))
    throw CheckFailure("opposite flag count differs from p^(n choose 2)");
  return out;
}

IntVector restrict_columns(const IntVector& v, std::span<const std::int32_t> columns) {
  IntVector out;
  for (const auto& [i, x] : v.entries) {
    if (i >= columns.size()) throw DomainError("restrict_columns: index out of range");
    if (columns[i] >= 0) out.entries.emplace_back(static_cast<std::uint32_t>(columns[i]), x);
  }
  return out;
}

bool is_cycle(const IntVector& v, const BuildingContext& ctx) { return is_cycle_impl(v, ctx); }
bool is_cycle(const RatVector& v, const BuildingContext& ctx) { return is_cycle_impl(v, ctx); }

}  // namespace stw
