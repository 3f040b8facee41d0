#include "stw/steinberg.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "stw/error.hpp"

namespace stw {

namespace {

constexpr std::size_t kMaxMasks = 1u << kMaxAmbient;

void check_tuple(std::span<const FpVector> b, const BuildingContext& ctx) {
  if (b.size() != ctx.n()) throw DomainError("apartment needs exactly n vectors");
  for (const auto& v : b) {
    if (v.size() != ctx.n() || !(v.modulus() == ctx.modulus())) throw DomainError("apartment vector has the wrong shape");
    if (v.is_zero()) throw DomainError("apartment vector is zero");
  }
}

}  // namespace

std::string tuple_string(std::span<const FpVector> b) {
  std::string s = "(";
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "; " : "") + b[i].to_string();
  return s + ")";
}

IntVector apartment_vector(std::span<const FpVector> b, const BuildingContext& ctx) {
  check_tuple(b, ctx);
  const std::size_t n = ctx.n();
  const PrimeModulus p = ctx.modulus();
  const std::uint32_t full = (1u << n) - 1;

  // Echelon form of the span of every subset, built from the subset without its top element.
  std::vector<std::uint32_t> ech(static_cast<std::size_t>(full + 1) * n * n);
  std::array<std::uint32_t, kMaxMasks> sub_index{};
  std::array<std::uint8_t, kMaxMasks> dim{};
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const unsigned top = 31u - static_cast<unsigned>(__builtin_clz(mask));
    const std::uint32_t parent = mask & ~(1u << top);
    std::uint32_t* rows = &ech[static_cast<std::size_t>(mask) * n * n];
    const std::uint32_t* prow = &ech[static_cast<std::size_t>(parent) * n * n];
    const std::size_t d0 = dim[parent];
    std::copy(prow, prow + d0 * n, rows);
    std::copy(b[top].entries().begin(), b[top].entries().end(), rows + d0 * n);
    const std::size_t d = rref_in_place(p, rows, d0 + 1, n);
    if (d != d0 + 1) return {};  // some subset is dependent, so B is not a basis
    dim[mask] = static_cast<std::uint8_t>(d);
    if (mask != full) sub_index[mask] = ctx.subspace_index(ctx.key_of_echelon(rows, d));
  }

  // digit[mask * n + j]: position of span(mask + j) among the superspaces of span(mask).
  std::vector<std::uint32_t> digit(static_cast<std::size_t>(full + 1) * n, 0);
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    const std::size_t k = dim[mask];
    if (k + 1 >= n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (!(mask & (1u << j))) digit[mask * n + j] = ctx.step_digit(k, sub_index[mask], sub_index[mask | (1u << j)]);
  }

  IntVector out;
  std::size_t orderings = 1;
  for (std::size_t i = 2; i <= n; ++i) orderings *= i;
  out.entries.reserve(orderings);
  // DFS over orderings; `inv` counts inversions of the ordering so far.
  struct Frame {
    std::uint32_t mask;
    std::uint64_t index;
    unsigned inv;
  };
  std::vector<Frame> stack{{0, 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const std::size_t k = dim[f.mask];
    if (k + 1 == n) {
      const unsigned last = static_cast<unsigned>(__builtin_ctz(full & ~f.mask));
      const unsigned inv = f.inv + static_cast<unsigned>(__builtin_popcount(f.mask >> (last + 1)));
      out.entries.emplace_back(static_cast<std::uint32_t>(f.index), inv % 2 ? -1 : 1);
      continue;
    }
    for (std::size_t j = n; j-- > 0;) {
      if (f.mask & (1u << j)) continue;
      stack.push_back({f.mask | (1u << j), f.index + digit[f.mask * n + j] * ctx.step_weight(k),
                       f.inv + static_cast<unsigned>(__builtin_popcount(f.mask >> (j + 1)))});
    }
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
  return out;
}

ApartmentClass apartment(std::span<const FpVector> b, std::shared_ptr<const BuildingContext> ctx) {
  ApartmentClass a;
  a.coefficients = apartment_vector(b, *ctx);
  a.context = std::move(ctx);
  return a;
}

NormalizedTuple normalize(std::span<const FpVector> b) {
  NormalizedTuple t;
  t.vectors.reserve(b.size());
  for (const auto& v : b) {
    if (v.is_zero()) throw DomainError("cannot normalize a tuple containing the zero vector");
    t.vectors.push_back(v.normalized());
  }
  // Inversion count of the sorting permutation gives the sign.
  std::size_t inversions = 0;
  for (std::size_t i = 0; i < t.vectors.size(); ++i)
    for (std::size_t j = i + 1; j < t.vectors.size(); ++j) {
      if (t.vectors[i] == t.vectors[j]) {
        t.sign = 0;
        std::sort(t.vectors.begin(), t.vectors.end());
        return t;
      }
      inversions += t.vectors[j] < t.vectors[i];
    }
  std::sort(t.vectors.begin(), t.vectors.end());
  t.sign = inversions % 2 ? -1 : 1;
  return t;
}

void for_each_normalized_basis(std::size_t n, PrimeModulus p,
                               const std::function<bool(std::span<const FpVector>)>& visit) {
  const auto points = projective_points(n, p);
  std::vector<FpVector> tuple;
  std::vector<std::uint32_t> ech;  // echelon rows of the prefix, n columns
  bool stop = false;
  std::function<void(std::size_t)> extend = [&](std::size_t start) {
    const std::size_t depth = tuple.size();
    if (depth == n) {
      if (!visit(tuple)) stop = true;
      return;
    }
    // Leave room for the remaining picks.
    for (std::size_t i = start; i + (n - depth) <= points.size() && !stop; ++i) {
      std::vector<std::uint32_t> rows(ech);
      rows.insert(rows.end(), points[i].entries().begin(), points[i].entries().end());
      if (rref_in_place(p, rows.data(), depth + 1, n) != depth + 1) continue;
      std::swap(ech, rows);
      tuple.push_back(points[i]);
      extend(i + 1);
      tuple.pop_back();
      std::swap(ech, rows);
    }
  };
  extend(0);
}

std::uint64_t steinberg_dimension(std::size_t n, std::uint64_t p) {
  return checked_power(p, n * (n - 1) / 2, UINT64_MAX);
}

SpanResult span_dim(std::size_t ncols, const std::function<void(const std::function<bool(const IntVector&)>&)>& stream,
                    const RankEngineConfig& config, std::optional<std::size_t> ceiling) {
  SpanBasis basis(ncols, config);
  SpanResult r;
  if (ceiling && *ceiling == 0) {
    r.reached_ceiling = true;
    return r;
  }
  stream([&](const IntVector& v) {
    ++r.generators_used;
    basis.insert(v);
    if (ceiling && basis.rank() >= *ceiling) {
      r.reached_ceiling = true;
      return false;
    }
    return true;
  });
  r.rank = basis.rank();
  return r;
}

namespace {

constexpr char kStMagic[8] = {'S', 'T', 'W', 'S', 'T', 'D', 'M', '1'};

void write_checkpoint(const std::string& path, std::size_t n, std::uint32_t p, std::size_t used, const SpanBasis& basis) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write snapshot " + tmp);
    out.write(kStMagic, sizeof kStMagic);
    out << n << ' ' << p << ' ' << used << '\n';
    basis.save(out);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::pair<std::size_t, SpanBasis>> read_checkpoint(const std::string& path, std::size_t n, std::uint32_t p,
                                                                 const RankEngineConfig& engine) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof kStMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kStMagic)) return std::nullopt;
  std::size_t sn = 0, used = 0;
  std::uint32_t sp = 0;
  in >> sn >> sp >> used;
  in.get();
  if (sn != n || sp != p) return std::nullopt;
  SpanBasis basis = SpanBasis::load(in);
  if (basis.config().exact != engine.exact || basis.config().primes != engine.primes) return std::nullopt;
  return std::make_pair(used, std::move(basis));
}

}  // namespace

SpanResult st_dim(std::size_t n, PrimeModulus p, const StDimOptions& options) {
  auto ctx = BuildingContext::get(n, p, options.flag_budget);
  const std::uint64_t ceiling = steinberg_dimension(n, p.value());
  SpanBasis basis(ctx->flag_count(), options.engine);
  std::size_t skip = 0;
  if (!options.snapshot_path.empty()) {
    if (auto cp = read_checkpoint(options.snapshot_path, n, p.value(), options.engine)) {
      skip = cp->first;
      basis = std::move(cp->second);
    }
  }
  SpanResult r;
  r.generators_used = skip;
  std::size_t seen = 0;
  if (basis.rank() < ceiling) {
    for_each_normalized_basis(n, p, [&](std::span<const FpVector> b) {
      if (seen++ < skip) return true;
      ++r.generators_used;
      basis.insert(apartment_vector(b, *ctx));
      if (options.checkpoint_every && !options.snapshot_path.empty() && r.generators_used % options.checkpoint_every == 0)
        write_checkpoint(options.snapshot_path, n, p.value(), r.generators_used, basis);
      return basis.rank() < ceiling;
    });
  }
  r.rank = basis.rank();
  r.reached_ceiling = r.rank >= ceiling;
  if (!options.snapshot_path.empty()) write_checkpoint(options.snapshot_path, n, p.value(), r.generators_used, basis);
  if (r.rank > ceiling) throw CheckFailure("apartment span exceeds p^(n choose 2)");
  if (!r.reached_ceiling) {
    throw CheckFailure("apartments exhausted at rank " + std::to_string(r.rank) + " below " + std::to_string(ceiling));
  }
  return r;
}

// ---------------------------------------------------------------- relations

bool RelationReport::ok() const noexcept {
  return std::all_of(relations.begin(), relations.end(), [](const auto& r) { return r.ok(); });
}

RelationReport relation_checks(std::shared_ptr<const BuildingContext> ctx, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = ctx->n();
  const PrimeModulus p = ctx->modulus();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> coord(0, p.value() - 1), unit(1, p.value() - 1);

  auto random_nonzero = [&] {
    for (;;) {
      std::vector<std::uint32_t> e(n);
      for (auto& x : e) x = coord(rng);
      FpVector v(p, std::move(e));
      if (!v.is_zero()) return v;
    }
  };
  auto random_tuple = [&](std::size_t len) {
    std::vector<FpVector> t;
    for (std::size_t i = 0; i < len; ++i) t.push_back(random_nonzero());
    return t;
  };
  auto random_basis = [&] {
    for (;;) {
      auto t = random_tuple(n);
      if (span(p, n, t).dim() == n) return t;
    }
  };

  RelationReport rep;
  rep.n = n;
  rep.p = p.value();
  RelationOutcome r1{"nonzero-iff-basis", samples, 0, {}};
  RelationOutcome r2{"permutation-sign", samples, 0, {}};
  RelationOutcome r3{"scalar-invariance", samples, 0, {}};
  RelationOutcome r4{"alternating-sum", samples, 0, {}};

  for (std::size_t s = 0; s < samples; ++s) {
    // 1: half the instances are forced dependent so both directions get exercised.
    {
      auto t = random_tuple(n);
      if (s % 2 == 1 && n >= 2) {
        FpVector combo = t[0].scaled(unit(rng));
        for (std::size_t i = 1; i + 1 < n; ++i) combo += t[i].scaled(coord(rng));
        if (!combo.is_zero()) t[n - 1] = combo;
      }
      const bool basis = span(p, n, t).dim() == n;
      const bool nonzero = !apartment_vector(t, *ctx).empty();
      if (basis == nonzero)
        ++r1.passed;
      else if (r1.counterexample.empty())
        r1.counterexample = tuple_string(t);
    }
    // 2
    {
      auto b = random_basis();
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<FpVector> pb;
      std::size_t inv = 0;
      for (std::size_t i = 0; i < n; ++i) {
        pb.push_back(b[perm[i]]);
        for (std::size_t j = i + 1; j < n; ++j) inv += perm[j] < perm[i];
      }
      IntVector lhs = apartment_vector(pb, *ctx);
      IntVector rhs = apartment_vector(b, *ctx);
      if (inv % 2) rhs = negated(std::move(rhs));
      if (lhs == rhs && !lhs.empty())
        ++r2.passed;
      else if (r2.counterexample.empty())
        r2.counterexample = tuple_string(b);
    }
    // 3
    {
      auto b = random_basis();
      std::vector<FpVector> sb;
      for (const auto& v : b) sb.push_back(v.scaled(unit(rng)));
      if (apartment_vector(sb, *ctx) == apartment_vector(b, *ctx))
        ++r3.passed;
      else if (r3.counterexample.empty())
        r3.counterexample = tuple_string(b);
    }
    // 4
    {
      auto c = random_tuple(n + 1);
      IntVector sum;
      for (std::size_t i = 0; i <= n; ++i) {
        std::vector<FpVector> ci;
        for (std::size_t j = 0; j <= n; ++j)
          if (j != i) ci.push_back(c[j]);
        sum = add_scaled(sum, apartment_vector(ci, *ctx), static_cast<std::int64_t>(i % 2 ? -1 : 1));
      }
      if (sum.empty())
        ++r4.passed;
      else if (r4.counterexample.empty())
        r4.counterexample = tuple_string(c);
    }
  }
  rep.relations = {r1, r2, r3, r4};
  return rep;
}

}  // namespace stw
