#include "stw/decomposition.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

#include "stw/cache.hpp"
#include "stw/error.hpp"
#include "stw/modarith.hpp"

namespace stw {

const std::vector<std::vector<FpVector>>& steinberg_basis_tuples(std::size_t m, PrimeModulus p) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::uint32_t>, std::vector<std::vector<FpVector>>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({m, p.value()});
  if (it != cache.end()) return it->second;

  auto ctx = BuildingContext::get(m, p);
  const std::uint64_t ceiling = steinberg_dimension(m, p.value());
  SpanBasis basis(ctx->flag_count(), RankEngineConfig::modular());
  std::vector<std::vector<FpVector>> tuples;
  for_each_normalized_basis(m, p, [&](std::span<const FpVector> b) {
    if (basis.insert(apartment_vector(b, *ctx))) tuples.emplace_back(b.begin(), b.end());
    return basis.rank() < ceiling;
  });
  if (tuples.size() != ceiling) throw CheckFailure("apartments of F_p^m do not reach p^(m choose 2)");
  return cache.emplace(std::make_pair(m, p.value()), std::move(tuples)).first->second;
}

IntVector tensor_product(std::span<const IntVector> factors, std::span<const std::uint64_t> sizes) {
  if (factors.size() != sizes.size() || factors.empty()) throw DomainError("tensor_product: shape mismatch");
  IntVector acc = factors[0];
  for (std::size_t f = 1; f < factors.size(); ++f) {
    IntVector next;
    next.entries.reserve(acc.entries.size() * factors[f].entries.size());
    for (const auto& [i, a] : acc.entries)
      for (const auto& [j, b] : factors[f].entries) {
        const std::uint64_t idx = static_cast<std::uint64_t>(i) * sizes[f] + j;
        if (idx > UINT32_MAX) throw BudgetExceeded("tensor index overflows 32 bits");
        next.entries.emplace_back(static_cast<std::uint32_t>(idx), a * b);
      }
    acc = std::move(next);
  }
  return acc;
}

// ---------------------------------------------------------------- TensorFlagBasis

TensorFlagBasis::TensorFlagBasis(const SymplecticSplitting& s) : splitting_(s), coords_(s) {
  const PrimeModulus p = s.modulus();
  ambient_ = BuildingContext::get(s.ambient_dim(), p);
  for (const auto& part : s.parts()) part_ctx_.push_back(BuildingContext::get(part.dim(), p));
  radix_.assign(s.size(), 1);
  for (std::size_t i = s.size(); i-- > 0;) {
    radix_[i] = size_;
    size_ *= part_ctx_[i]->flag_count();
  }
  if (size_ > UINT32_MAX) throw BudgetExceeded("tensor coordinates overflow 32 bits");
}

std::uint64_t TensorFlagBasis::steinberg_dim() const {
  std::uint64_t d = 1;
  for (const auto& part : splitting_.parts()) d *= steinberg_dimension(part.dim(), splitting_.modulus().value());
  return d;
}

FpVector TensorFlagBasis::to_chart(const FpVector& x, std::size_t part) const {
  const Subspace& s = splitting_.part(part);
  if (!s.contains(x)) throw DomainError("vector " + x.to_string() + " is not in part " + s.to_string());
  return s.coordinates(x);
}

FpVector TensorFlagBasis::from_chart(const FpVector& c, std::size_t part) const { return splitting_.part(part).embed(c); }

std::uint64_t TensorFlagBasis::tensor_index(std::span<const std::uint64_t> part_flags) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < part_flags.size(); ++i) idx += part_flags[i] * radix_[i];
  return idx;
}

IntVector TensorFlagBasis::tensor_generator(const PartTuples& b) const {
  if (b.size() != parts()) throw DomainError("tensor_generator: one tuple per part is required");
  std::vector<IntVector> factors;
  std::vector<std::uint64_t> sizes;
  for (std::size_t i = 0; i < parts(); ++i) {
    std::vector<FpVector> chart;
    for (const auto& x : b[i]) chart.push_back(to_chart(x, i));
    factors.push_back(apartment_vector(chart, *part_ctx_[i]));
    if (factors.back().empty()) return {};
    sizes.push_back(part_ctx_[i]->flag_count());
  }
  return tensor_product(factors, sizes);
}

IntVector TensorFlagBasis::inc(const PartTuples& b) const {
  if (b.size() != parts()) throw DomainError("inc: one tuple per part is required");
  std::vector<FpVector> all;
  for (std::size_t i = 0; i < parts(); ++i) {
    if (b[i].size() != splitting_.part(i).dim()) throw DomainError("inc: tuple length must equal the part dimension");
    for (const auto& x : b[i]) {
      if (!splitting_.part(i).contains(x)) throw DomainError("inc: vector outside its part");
      all.push_back(x);
    }
  }
  return apartment_vector(all, *ambient_);
}

template <typename T>
SparseVector<T> TensorFlagBasis::chainproj_impl(const SparseVector<T>& v, const OrderedSplitting& order) const {
  if (!(order.unordered() == splitting_)) throw DomainError("ordering belongs to a different splitting");
  const std::size_t k = parts();
  const PrimeModulus p = splitting_.modulus();
  std::vector<std::size_t> d(k + 1);
  std::vector<std::uint32_t> t_index(k + 1, 0);
  for (std::size_t i = 0; i <= k; ++i) {
    d[i] = order.partial_sums()[i].dim();
    if (i > 0 && i < k) t_index[i] = ambient_->subspace_index(order.partial_sums()[i]);
  }

  auto chart_index = [&](std::size_t part, std::size_t j, std::uint32_t amb, std::size_t lower) {
    const std::uint64_t key = (static_cast<std::uint64_t>(part) << 40) | (static_cast<std::uint64_t>(j) << 32) | amb;
    auto it = chart_cache_.find(key);
    if (it != chart_cache_.end()) return it->second;
    const Subspace& vj = ambient_->subspaces(j)[amb];
    const std::size_t m = splitting_.part(part).dim();
    std::vector<std::uint32_t> rows(j * m);
    for (std::size_t r = 0; r < j; ++r) coords_.part_coordinates_raw(vj.basis().row_span(r), part, &rows[r * m]);
    const std::size_t rank = rref_in_place(p, rows.data(), j, m);
    if (rank != j - lower) throw CheckFailure("projected flag step has the wrong dimension");
    const std::uint32_t idx = part_ctx_[part]->subspace_index(part_ctx_[part]->key_of_echelon(rows.data(), rank));
    chart_cache_.emplace(key, idx);
    return idx;
  };

  SparseVector<T> out;
  std::vector<std::uint64_t> part_flags(k);
  std::vector<std::uint32_t> wchain;
  for (const auto& [idx, c] : v.entries) {
    const auto chain = ambient_->decode_chain(idx);
    bool keep = true;
    for (std::size_t i = 1; i < k && keep; ++i) keep = chain[d[i] - 1] == t_index[i];
    if (!keep) continue;
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t part = order.canonical_index(t);
      wchain.clear();
      for (std::size_t j = d[t] + 1; j < d[t + 1]; ++j) wchain.push_back(chart_index(part, j, chain[j - 1], d[t]));
      part_flags[part] = part_ctx_[part]->flag_index_from_chain(wchain);
    }
    out.entries.emplace_back(static_cast<std::uint32_t>(tensor_index(part_flags)), c);
  }
  out.canonicalize();
  return out;
}

IntVector TensorFlagBasis::chainproj_ordered(const IntVector& v, const OrderedSplitting& order) const {
  return chainproj_impl(v, order);
}

RatVector TensorFlagBasis::chainproj_ordered(const RatVector& v, const OrderedSplitting& order) const {
  return chainproj_impl(v, order);
}

RatVector TensorFlagBasis::pi(const RatVector& v) const {
  RatVector sum;
  std::size_t count = 0;
  for (const auto& o : orderings(splitting_)) {
    sum = add_scaled(sum, chainproj_ordered(v, o), Rational(1));
    ++count;
  }
  const Rational scale(1, static_cast<unsigned long>(count));
  for (auto& e : sum.entries) e.second *= scale;
  return sum;
}

RatVector TensorFlagBasis::pi(const IntVector& v) const {
  if (parts() == 1) return to_rational(v);
  return pi(to_rational(v));
}

std::vector<PartTuples> TensorFlagBasis::basis_products() const {
  std::vector<std::vector<std::vector<FpVector>>> per_part;
  for (std::size_t i = 0; i < parts(); ++i) {
    std::vector<std::vector<FpVector>> embedded;
    for (const auto& tuple : steinberg_basis_tuples(splitting_.part(i).dim(), splitting_.modulus())) {
      std::vector<FpVector> e;
      for (const auto& c : tuple) e.push_back(from_chart(c, i));
      embedded.push_back(std::move(e));
    }
    per_part.push_back(std::move(embedded));
  }
  std::vector<PartTuples> out;
  std::vector<std::size_t> pick(parts(), 0);
  for (;;) {
    PartTuples b;
    for (std::size_t i = 0; i < parts(); ++i) b.push_back(per_part[i][pick[i]]);
    out.push_back(std::move(b));
    std::size_t i = parts();
    while (i > 0 && ++pick[i - 1] == per_part[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

void TensorFlagBasis::for_each_stsep_generator(std::span<const SymplecticSplitting> all,
                                               const std::function<void(const IntVector&)>& visit) const {
  for (const auto& finer : all) {
    if (finer.size() != parts() + 1 || !refinement_leq(finer, splitting_)) continue;
    // The part of S that got split, and where each part of the finer splitting goes.
    std::vector<std::size_t> owner(finer.size());
    for (std::size_t j = 0; j < finer.size(); ++j)
      for (std::size_t i = 0; i < parts(); ++i)
        if (splitting_.part(i).contains(finer.part(j))) owner[j] = i;
    TensorFlagBasis fine(finer);
    for (const auto& b : fine.basis_products()) {
      PartTuples grouped(parts());
      for (std::size_t j = 0; j < finer.size(); ++j)
        grouped[owner[j]].insert(grouped[owner[j]].end(), b[j].begin(), b[j].end());
      visit(tensor_generator(grouped));
    }
  }
}

std::vector<IntVector> TensorFlagBasis::stsep_generators(std::span<const SymplecticSplitting> all) const {
  std::vector<IntVector> gens;
  for_each_stsep_generator(all, [&](const IntVector& v) { gens.push_back(v); });
  return gens;
}

// ---------------------------------------------------------------- dimensions

namespace {

std::vector<SymplecticSplitting> splittings_for(std::size_t g, PrimeModulus p, bool extended) {
  if (auto cache = default_cache()) return cache->splittings(g, p, extended);
  return enumerate_splittings(SymplecticSpace(g, p), SplittingEnumerationOptions{extended});
}

RankEngineConfig engine_of(const DecompositionOptions& o) {
  RankEngineConfig c = o.engine;
  c.workers = std::max(c.workers, o.workers);
  return c;
}

const SymplecticSplitting& trivial_of(const std::vector<SymplecticSplitting>& all) {
  for (const auto& s : all)
    if (s.is_trivial()) return s;
  throw CheckFailure("splitting enumeration lost the one-part splitting");
}

// Ambient StSep span: products of Steinberg bases over every 2-part splitting.
SpanBasis separated_span(const std::vector<SymplecticSplitting>& all, const RankEngineConfig& engine) {
  TensorFlagBasis whole(trivial_of(all));
  auto gens = whole.stsep_generators(all);
  SpanBasis basis(whole.size(), engine);
  basis.insert_batch(gens);
  return basis;
}

// Continues `basis` with normalized apartments until p^(n choose 2); returns the rank.
std::size_t saturate_with_apartments(SpanBasis& basis, std::size_t n, PrimeModulus p) {
  auto ctx = BuildingContext::get(n, p);
  const std::uint64_t ceiling = steinberg_dimension(n, p.value());
  if (basis.rank() >= ceiling) return basis.rank();
  for_each_normalized_basis(n, p, [&](std::span<const FpVector> b) {
    basis.insert(apartment_vector(b, *ctx));
    return basis.rank() < ceiling;
  });
  return basis.rank();
}

bool use_restricted(std::size_t g, const DecompositionOptions& o) { return o.restricted_ambient || g >= 3; }

std::vector<std::uint64_t> dense_primes_of(const DecompositionOptions& o) {
  const std::size_t count = std::max<std::size_t>(1, o.engine.exact ? 2 : o.engine.primes.size());
  return random_primes(26, count, o.seed ^ 0xd5e5e);
}

struct RestrictedRanks {
  std::size_t stsep = 0;
  std::size_t st = 0;
  std::size_t step1 = 0;  // rank of StSep plus chain-basis apartments
  std::size_t chain_used = 0;
  std::vector<std::uint64_t> primes;
};

// One pass modulo q: ambient StSep, then either saturation with normalized
// apartments or the chain-basis apartments on top of it.
DenseModularEchelon restricted_stsep(const TensorFlagBasis& whole, std::span<const SymplecticSplitting> all,
                                     const std::vector<std::int32_t>& cols, std::uint64_t q,
                                     const std::string& snapshot_dir) {
  const std::size_t ncols = steinberg_dimension(whole.ambient().n(), whole.ambient().modulus().value());
  std::string path;
  if (!snapshot_dir.empty()) {
    path = snapshot_dir + "/stw-stsep-n" + std::to_string(whole.ambient().n()) + "-p" +
           std::to_string(whole.ambient().modulus().value()) + "-q" + std::to_string(q) + ".dense";
    if (std::ifstream in(path, std::ios::binary); in) {
      try {
        auto e = DenseModularEchelon::load(in);
        if (e.prime() == q && e.ncols() == ncols) return e;
      } catch (const DomainError&) {
      }
    }
  }
  DenseModularEchelon e(q, ncols);
  whole.for_each_stsep_generator(all, [&](const IntVector& v) { e.insert(restrict_columns(v, cols)); });
  if (!path.empty()) {
    std::filesystem::create_directories(snapshot_dir);
    {
      std::ofstream out(path + ".tmp", std::ios::binary | std::ios::trunc);
      e.save(out);
    }
    std::filesystem::rename(path + ".tmp", path);
  }
  return e;
}

RestrictedRanks restricted_ranks(const std::vector<SymplecticSplitting>& all, const DecompositionOptions& options,
                                 bool step1) {
  TensorFlagBasis whole(trivial_of(all));
  const BuildingContext& ctx = whole.ambient();
  const std::size_t n = ctx.n();
  const PrimeModulus p = ctx.modulus();
  const std::uint64_t ceiling = steinberg_dimension(n, p.value());
  const auto cols = opposite_flag_columns(ctx);
  const SymplecticSpace space(n / 2, p);

  RestrictedRanks out;
  out.primes = dense_primes_of(options);
  for (std::size_t k = 0; k < out.primes.size(); ++k) {
    const std::uint64_t q = out.primes[k];
    RestrictedRanks r;
    {
      DenseModularEchelon e = restricted_stsep(whole, all, cols, q, options.snapshot_dir);
      r.stsep = e.rank();
      for_each_normalized_basis(n, p, [&](std::span<const FpVector> b) {
        e.insert(restrict_columns(apartment_vector(b, ctx), cols));
        return e.rank() < ceiling;
      });
      r.st = e.rank();
    }
    if (step1) {
      DenseModularEchelon e = restricted_stsep(whole, all, cols, q, options.snapshot_dir);
      try {
        for_each_chain_basis(space, [&](std::span<const FpVector> b) {
          ++r.chain_used;
          e.insert(restrict_columns(apartment_vector(b, ctx), cols));
          if (e.rank() >= ceiling) throw std::out_of_range("saturated");
        });
      } catch (const std::out_of_range&) {
      }
      r.step1 = e.rank();
    }
    if (k == 0) {
      out.stsep = r.stsep;
      out.st = r.st;
      out.step1 = r.step1;
      out.chain_used = r.chain_used;
    } else if (r.stsep != out.stsep || r.st != out.st || r.step1 != out.step1) {
      throw RankDisagreement("restricted passes disagree between primes " + std::to_string(out.primes[0]) + " and " +
                             std::to_string(q));
    }
  }
  return out;
}

}  // namespace

std::size_t stsep_dim(std::size_t g, PrimeModulus p, const DecompositionOptions& options) {
  if (g == 1) return 0;
  const auto all = splittings_for(g, p, options.extended);
  if (use_restricted(g, options)) return restricted_ranks(all, options, false).stsep;
  return separated_span(all, engine_of(options)).rank();
}

std::size_t stns_dim(std::size_t g, PrimeModulus p, const DecompositionOptions& options) {
  if (g == 1) {
    StDimOptions o;
    o.engine = engine_of(options);
    return st_dim(2, p, o).rank;
  }
  const auto all = splittings_for(g, p, options.extended);
  const std::uint64_t ceiling = steinberg_dimension(2 * g, p.value());
  std::size_t sep = 0, full = 0;
  if (use_restricted(g, options)) {
    const RestrictedRanks r = restricted_ranks(all, options, false);
    sep = r.stsep;
    full = r.st;
  } else {
    SpanBasis basis = separated_span(all, engine_of(options));
    sep = basis.rank();
    full = saturate_with_apartments(basis, 2 * g, p);
  }
  if (full != ceiling) throw CheckFailure("apartment span did not saturate");
  return full - sep;
}

bool cross_projection_check(const SymplecticSplitting& s, const SymplecticSplitting& s_prime,
                            std::span<const SymplecticSplitting> all, const RankEngineConfig& engine) {
  if (refinement_leq(s, s_prime)) throw DomainError("cross_projection_check: S refines S'");
  TensorFlagBasis frame(s), other(s_prime);
  SpanBasis sep(frame.size(), engine);
  for (const auto& v : frame.stsep_generators(all)) sep.insert(v);
  for (const auto& b : other.basis_products())
    if (!sep.contains(frame.pi(other.inc(b)))) return false;
  return true;
}

// ---------------------------------------------------------------- audit

bool DecompositionReport::ok() const noexcept {
  if (!audit_ok()) return false;
  for (const auto& r : rows)
    if (!r.uniform) return false;
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok(); });
}

DecompositionReport poset_rep_audit(std::size_t g, PrimeModulus p, const DecompositionOptions& options,
                                    const AuditSelection& selection) {
  const RankEngineConfig engine = engine_of(options);
  const SymplecticSpace space(g, p);
  const auto all = splittings_for(g, p, options.extended);
  const std::size_t n = 2 * g;

  DecompositionReport rep;
  rep.g = g;
  rep.p = p.value();
  rep.st_dim = steinberg_dimension(n, p.value());
  rep.splitting_count = all.size();

  std::vector<std::unique_ptr<TensorFlagBasis>> frames;
  for (const auto& s : all) frames.push_back(std::make_unique<TensorFlagBasis>(s));

  // StSep(S) for every S, in that splitting's tensor coordinates.
  // On the restricted route the trivial splitting keeps an empty span here; its
  // ranks come from the dense passes in coordinates opposite a fixed flag.
  const bool restricted = use_restricted(g, options);
  std::size_t trivial = 0;
  while (!all[trivial].is_trivial()) ++trivial;
  std::vector<SpanBasis> sep;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    SpanBasis b(frames[i]->size(), engine);
    if (!(restricted && i == trivial)) b.insert_batch(frames[i]->stsep_generators(all));
    sep.push_back(std::move(b));
  }
  std::optional<RestrictedRanks> dense;
  if (restricted) {
    dense = restricted_ranks(all, options, selection.step1);
    rep.restricted_ambient = true;
    rep.dense_primes = dense->primes;
    rep.stsep_rank = dense->stsep;
    rep.st_rank = dense->st;
  } else {
    rep.stsep_rank = sep[trivial].rank();
    SpanBasis full = sep[trivial];
    rep.st_rank = saturate_with_apartments(full, n, p);
  }
  rep.stns_rank = rep.st_rank - rep.stsep_rank;
  auto sep_rank = [&](std::size_t i) { return restricted && i == trivial ? rep.stsep_rank : sep[i].rank(); };

  std::map<std::vector<std::size_t>, SplittingTypeRow> rows;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto type = all[i].type();
    const std::uint64_t st = i == trivial ? rep.st_rank : frames[i]->steinberg_dim();
    const std::size_t stns = st - sep_rank(i);
    auto [it, fresh] = rows.try_emplace(type);
    SplittingTypeRow& row = it->second;
    if (fresh) {
      row.type = type;
      row.st_dim = st;
      row.stsep_dim = sep_rank(i);
      row.stns_dim = stns;
    } else if (row.stsep_dim != sep_rank(i)) {
      row.uniform = false;
    }
    ++row.count;
    rep.stns_sum += stns;
  }
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) rep.rows.push_back(it->second);

  std::mt19937_64 rng(options.seed);

  if (selection.inc_identity) {
    HypothesisCheck random_check{"pi-inc-identity", 0, 0, {}};
    HypothesisCheck basis_check{"projection-system", 0, 0, {}};
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
      // The trivial frame's basis would be the whole ambient Steinberg basis.
      if (restricted && fi == trivial) continue;
      const auto& f = frames[fi];
      for (const auto& b : f->basis_products()) {
        ++basis_check.instances;
        if (f->pi(f->inc(b)) == to_rational(f->tensor_generator(b)))
          ++basis_check.passed;
        else if (basis_check.counterexample.empty())
          basis_check.counterexample = f->splitting().parts().front().to_string();
      }
      for (std::size_t s = 0; s < options.inc_samples_per_splitting; ++s) {
        PartTuples b(f->parts());
        for (std::size_t i = 0; i < f->parts(); ++i) {
          const std::size_t m = f->splitting().part(i).dim();
          std::uniform_int_distribution<std::uint32_t> coord(0, p.value() - 1);
          while (b[i].size() < m) {
            std::vector<std::uint32_t> c(m);
            for (auto& x : c) x = coord(rng);
            FpVector chart(p, std::move(c));
            if (!chart.is_zero()) b[i].push_back(f->from_chart(chart, i));
          }
        }
        ++random_check.instances;
        if (f->pi(f->inc(b)) == to_rational(f->tensor_generator(b))) {
          ++random_check.passed;
        } else if (random_check.counterexample.empty()) {
          std::vector<FpVector> flat;
          for (const auto& t : b) flat.insert(flat.end(), t.begin(), t.end());
          random_check.counterexample = tuple_string(flat);
        }
      }
    }
    rep.checks.push_back(basis_check);
    rep.checks.push_back(random_check);
  }

  if (selection.cross_projection) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t b = 0; b < all.size(); ++b)
        if (!refinement_leq(all[a], all[b]) && !(restricted && a == trivial)) pairs.emplace_back(a, b);
    if (!selection.all_cross_pairs && pairs.size() > options.cross_pairs_sample) {
      std::shuffle(pairs.begin(), pairs.end(), rng);
      pairs.resize(options.cross_pairs_sample);
      std::sort(pairs.begin(), pairs.end());
    }
    HypothesisCheck check{selection.all_cross_pairs ? "cross-projection-all-pairs" : "cross-projection-sampled",
                          pairs.size(), 0, {}};
    std::vector<std::optional<std::vector<IntVector>>> vgens(all.size());
    for (const auto& [a, b] : pairs) {
      if (!vgens[b]) {
        vgens[b].emplace();
        for (const auto& t : frames[b]->basis_products()) vgens[b]->push_back(frames[b]->inc(t));
      }
      bool ok = true;
      for (const auto& v : *vgens[b]) {
        if (!sep[a].contains(frames[a]->pi(v))) {
          ok = false;
          break;
        }
      }
      if (ok)
        ++check.passed;
      else if (check.counterexample.empty())
        check.counterexample = "S=" + std::to_string(a) + ", S'=" + std::to_string(b);
    }
    rep.checks.push_back(check);
  }

  if (selection.vdec_equals_stsep) {
    HypothesisCheck check{"vdec-equals-stsep", all.size(), 0, {}};
    for (std::size_t a = 0; a < all.size(); ++a) {
      if (restricted && a == trivial) {
        --check.instances;
        continue;
      }
      SpanBasis vdec(frames[a]->size(), engine);
      for (std::size_t b = 0; b < all.size(); ++b) {
        if (b == a || !refinement_leq(all[b], all[a])) continue;
        for (const auto& t : frames[b]->basis_products()) vdec.insert(frames[a]->pi(frames[b]->inc(t)));
      }
      // Equal spans: same rank, and every StSep generator already lies in vdec.
      bool ok = vdec.rank() == sep[a].rank();
      if (ok) {
        SpanBasis joint = vdec;
        for (const auto& v : frames[a]->stsep_generators(all)) joint.insert(v);
        ok = joint.rank() == vdec.rank();
      }
      if (ok)
        ++check.passed;
      else if (check.counterexample.empty())
        check.counterexample = "S=" + std::to_string(a);
    }
    rep.checks.push_back(check);
  }

  if (selection.product_isomorphism) {
    // St -> prod_S St(S)/StSep(S) via normal forms modulo exact StSep spans.
    if (restricted) throw BudgetExceeded("product-isomorphism needs the full ambient route");
    HypothesisCheck check{"product-isomorphism", 1, 0, {}};
    std::vector<SpanBasis> exact_sep;
    std::vector<std::uint64_t> offset{0};
    for (std::size_t a = 0; a < all.size(); ++a) {
      SpanBasis b(frames[a]->size(), RankEngineConfig::exact_mode());
      for (const auto& v : frames[a]->stsep_generators(all)) b.insert(v);
      exact_sep.push_back(std::move(b));
      offset.push_back(offset.back() + frames[a]->size());
    }
    if (offset.back() > UINT32_MAX) throw BudgetExceeded("product coordinates overflow 32 bits");
    auto ctx = BuildingContext::get(n, p);
    SpanBasis image(offset.back(), RankEngineConfig::exact_mode());
    for (const auto& tuple : steinberg_basis_tuples(n, p)) {
      const IntVector x = apartment_vector(tuple, *ctx);
      RatVector joined;
      for (std::size_t a = 0; a < all.size(); ++a) {
        for (auto& [i, q] : exact_sep[a].normal_form(frames[a]->pi(x)).entries)
          joined.entries.emplace_back(static_cast<std::uint32_t>(i + offset[a]), q);
      }
      image.insert(joined);
    }
    if (image.rank() == rep.st_dim && rep.stns_sum == rep.st_dim)
      check.passed = 1;
    else
      check.counterexample = "image rank " + std::to_string(image.rank());
    rep.checks.push_back(check);
  }

  if (selection.chain_bases_vanish) {
    HypothesisCheck check{"chain-bases-vanish", 0, 0, {}};
    auto ctx = BuildingContext::get(n, p);
    for_each_chain_basis(space, [&](std::span<const FpVector> b) {
      const IntVector a = apartment_vector(b, *ctx);
      for (const auto& f : frames) {
        if (f->splitting().is_trivial()) continue;
        ++check.instances;
        if (f->pi(a).empty())
          ++check.passed;
        else if (check.counterexample.empty())
          check.counterexample = tuple_string(b);
      }
    });
    rep.checks.push_back(check);
  }

  if (selection.step1 && restricted) {
    rep.chain_bases_used = dense->chain_used;
    rep.step1_quotient_rank = dense->step1 - rep.stsep_rank;
    HypothesisCheck check{"step1-spanning", 1, rep.step1_quotient_rank == rep.stns_rank ? 1u : 0u, {}};
    if (!check.ok()) check.counterexample = "quotient rank " + std::to_string(rep.step1_quotient_rank);
    rep.checks.push_back(check);
  } else if (selection.step1) {
    SpanBasis quotient = sep[trivial];
    auto ctx = BuildingContext::get(n, p);
    const std::uint64_t ceiling = rep.st_dim;
    std::size_t used = 0;
    if (quotient.rank() < ceiling) {
      try {
        for_each_chain_basis(space, [&](std::span<const FpVector> b) {
          ++used;
          quotient.insert(apartment_vector(b, *ctx));
          if (quotient.rank() >= ceiling) throw std::out_of_range("saturated");
        });
      } catch (const std::out_of_range&) {
      }
    }
    rep.chain_bases_used = used;
    rep.step1_quotient_rank = quotient.rank() - rep.stsep_rank;
    HypothesisCheck check{"step1-spanning", 1, rep.step1_quotient_rank == rep.stns_rank ? 1u : 0u, {}};
    if (!check.ok()) check.counterexample = "quotient rank " + std::to_string(rep.step1_quotient_rank);
    rep.checks.push_back(check);
  }
  return rep;
}

}  // namespace stw
