#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stw/building.hpp"
#include "stw/cache.hpp"
#include "stw/counting.hpp"
#include "stw/decomposition.hpp"
#include "stw/error.hpp"
#include "stw/steinberg.hpp"
#include "stw/symplectic.hpp"
#include "stw_cli/run.hpp"

namespace stw::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string str(std::uint64_t x) { return std::to_string(x); }
std::string str(const BigInt& x) { return x.get_str(); }
std::string str(const Rational& q) { return rational_string(q); }

std::string type_string(const std::vector<std::size_t>& type) {
  return Partition::from_parts(type).to_string();
}

// Runs `body` and appends its record with the elapsed time. A CheckFailure
// inside a check fails that record; config and budget errors propagate.
void check(VerificationReport& rep, const std::string& name, const std::string& anchor,
           const std::function<void(CheckRecord&)>& body) {
  CheckRecord rec;
  rec.name = name;
  rec.anchor = anchor;
  const auto t0 = Clock::now();
  try {
    body(rec);
  } catch (const CheckFailure& e) {
    rec.status = Status::kFail;
    rec.computed = std::string("error: ") + e.what();
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  rep.checks.push_back(std::move(rec));
}

void compare(CheckRecord& rec, std::string expected, std::string computed) {
  rec.expected = std::move(expected);
  rec.computed = std::move(computed);
  rec.status = rec.expected == rec.computed ? Status::kPass : Status::kFail;
}

RankEngineConfig engine_of(const RunConfig& c) {
  RankEngineConfig e = c.exact ? RankEngineConfig::exact_mode() : RankEngineConfig::modular(c.primes);
  e.workers = c.workers;
  return e;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

VerificationReport start(const RunConfig& c) {
  VerificationReport rep;
  rep.config = c;
  rep.timestamp = utc_now();
  return rep;
}

void homology_checks(VerificationReport& rep, std::size_t n, PrimeModulus p, const RunConfig& c) {
  auto ctx = BuildingContext::get(n, p);
  const BuildingChainComplex complex(ctx, c.extended ? BuildingMode::kExtended : BuildingMode::kDefault);
  HomologyReport h;
  check(rep, "homology-top-betti", "reduced homology of the building is concentrated in degree n-2 with rank p^(n choose 2)",
        [&](CheckRecord& r) {
          h = homology_ranks(complex, engine_of(c));
          compare(r, str(steinberg_dimension(n, p.value())), std::to_string(h.betti.back()));
        });
  check(rep, "homology-lower-betti", "reduced Betti numbers below the top degree vanish", [&](CheckRecord& r) {
    std::int64_t lower = 0;
    for (std::size_t i = 0; i + 1 < h.betti.size(); ++i) lower += h.betti[i] < 0 ? -h.betti[i] : h.betti[i];
    compare(r, "0", std::to_string(lower));
  });
  check(rep, "homology-euler-characteristic", "alternating sums of chain ranks and Betti numbers agree",
        [&](CheckRecord& r) { compare(r, std::to_string(h.euler_chains), std::to_string(h.euler_betti)); });
  nlohmann::ordered_json j;
  j["n"] = n;
  j["p"] = p.value();
  j["exact"] = h.exact;
  j["chain_ranks"] = h.chain_ranks;
  j["boundary_ranks"] = h.boundary_ranks;
  j["betti"] = h.betti;
  rep.data["homology"] = j;
}

nlohmann::ordered_json decomposition_json(const DecompositionReport& d) {
  nlohmann::ordered_json j;
  j["g"] = d.g;
  j["p"] = d.p;
  j["st_dim"] = str(d.st_dim);
  j["st_rank"] = str(d.st_rank);
  j["stsep_rank"] = str(d.stsep_rank);
  j["stns_rank"] = str(d.stns_rank);
  j["splitting_count"] = str(d.splitting_count);
  j["stns_sum"] = str(d.stns_sum);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : d.rows) {
    nlohmann::ordered_json r;
    r["type"] = type_string(row.type);
    r["count"] = str(row.count);
    r["st_dim"] = str(row.st_dim);
    r["stsep_dim"] = str(row.stsep_dim);
    r["stns_dim"] = str(row.stns_dim);
    r["uniform"] = row.uniform;
    j["rows"].push_back(r);
  }
  j["step1_quotient_rank"] = str(d.step1_quotient_rank);
  j["chain_bases_used"] = str(d.chain_bases_used);
  j["restricted_ambient"] = d.restricted_ambient;
  j["dense_primes"] = nlohmann::ordered_json::array();
  for (auto q : d.dense_primes) j["dense_primes"].push_back(str(q));
  return j;
}

nlohmann::ordered_json bound_json(const BoundReport& b) {
  nlohmann::ordered_json j;
  j["g"] = b.g;
  j["p"] = b.p;
  j["sp_order"] = str(b.sp_order);
  j["lambda"] = str(b.lambda);
  j["theta"] = str(b.theta);
  j["st_dim"] = str(b.st_dim);
  j["stsep_dim"] = str(b.stsep_dim);
  j["stns_dim"] = str(b.stns_dim);
  j["bound"] = str(b.bound);
  j["remark"] = b.remark ? nlohmann::ordered_json(str(*b.remark)) : nlohmann::ordered_json(nullptr);
  j["discrepant"] = b.discrepant();
  return j;
}

std::string cell_string(std::size_t g, std::uint32_t p) {
  return "(" + std::to_string(g) + "," + std::to_string(p) + ")";
}

}  // namespace

std::string status_string(Status s) {
  switch (s) {
    case Status::kPass: return "pass";
    case Status::kFail: return "fail";
    case Status::kSkipped: return "skipped";
    case Status::kDiscrepant: return "discrepant";
  }
  return "fail";
}

bool VerificationReport::ok() const noexcept {
  return std::none_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.status == Status::kFail; });
}

int exit_code(const VerificationReport& report) { return report.ok() ? kExitPass : kExitCheckFailure; }

unsigned workers_from_env(unsigned fallback) {
  const char* v = std::getenv("STW_WORKERS");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const unsigned long w = std::strtoul(v, &end, 10);
  if (*end != '\0' || w == 0 || w > 1024) throw DomainError(std::string("STW_WORKERS must be 1..1024, got '") + v + "'");
  return static_cast<unsigned>(w);
}

void validate(const RunConfig& c) {
  static const std::set<std::string> known{"solomon-tits", "decompose",  "identities", "bound",
                                           "oracle-homology", "relations", "cache"};
  if (!known.count(c.subcommand)) throw DomainError("unknown subcommand '" + c.subcommand + "'");
  if (c.primes == 0) throw DomainError("--primes must be at least 1");
  if (c.workers == 0) throw DomainError("--workers must be at least 1");
  if (c.p) PrimeModulus(*c.p);  // throws DomainError unless prime
  auto need_n = [&] {
    if (!c.n || !c.p) throw DomainError(c.subcommand + " needs --n and --p");
    if (*c.n < 2 || *c.n > kMaxAmbient) throw DomainError("--n must be in 2.." + std::to_string(kMaxAmbient));
  };
  auto need_g = [&](std::size_t max_g) {
    if (!c.g || !c.p) throw DomainError(c.subcommand + " needs --g and --p");
    if (*c.g < 1 || *c.g > max_g) throw DomainError("--g must be in 1.." + std::to_string(max_g));
  };
  if (c.subcommand == "solomon-tits" || c.subcommand == "oracle-homology" || c.subcommand == "relations") need_n();
  if (c.subcommand == "decompose") need_g(kMaxAmbient / 2);
  if (c.subcommand == "identities") need_g(50);
  if (c.subcommand == "bound") {
    if (c.g.has_value() != c.p.has_value()) throw DomainError("bound takes both --g and --p, or neither");
    if (c.g && *c.g < 1) throw DomainError("--g must be positive");
  }
  if (c.subcommand == "relations" && c.samples == 0) throw DomainError("--samples must be positive");
  if (c.subcommand == "cache") {
    if (c.action != "warm" && c.action != "clear") throw DomainError("cache takes warm or clear");
    if (c.cache_dir.empty()) throw DomainError("cache needs --cache-dir");
    if (c.action == "warm" && !c.p) throw DomainError("cache warm needs --p with --n and/or --g");
    if (c.action == "warm" && !c.n && !c.g) throw DomainError("cache warm needs --n or --g");
  }
}

VerificationReport cmd_solomon_tits(const RunConfig& c) {
  const std::size_t n = *c.n;
  const PrimeModulus p(*c.p);
  const std::uint64_t flags = complete_flag_count(n, p.value());
  if (flags > kDefaultFlagBudget)
    throw BudgetExceeded("n=" + std::to_string(n) + ", p=" + std::to_string(p.value()) + " has " + str(flags) +
                         " complete flags, over the budget of " + str(kDefaultFlagBudget));
  VerificationReport rep = start(c);
  check(rep, "st-dim", "the apartment span has dimension p^(n choose 2)", [&](CheckRecord& r) {
    StDimOptions o;
    o.engine = engine_of(c);
    compare(r, str(steinberg_dimension(n, p.value())), std::to_string(st_dim(n, p, o).rank));
  });
  try {
    homology_checks(rep, n, p, c);
  } catch (const BudgetExceeded& e) {
    CheckRecord r{"homology-oracle", "reduced homology of the building agrees with the apartment span",
                  str(steinberg_dimension(n, p.value())), std::string("not run: ") + e.what(), Status::kSkipped, 0};
    rep.checks.push_back(r);
  }
  return rep;
}

VerificationReport cmd_oracle_homology(const RunConfig& c) {
  VerificationReport rep = start(c);
  homology_checks(rep, *c.n, PrimeModulus(*c.p), c);
  return rep;
}

VerificationReport cmd_relations(const RunConfig& c) {
  VerificationReport rep = start(c);
  auto ctx = BuildingContext::get(*c.n, PrimeModulus(*c.p));
  const RelationReport rel = relation_checks(ctx, c.samples, c.seed);
  for (const auto& o : rel.relations) {
    CheckRecord r{"relation-" + o.name, "apartment classes satisfy the " + o.name + " relation",
                  str(o.instances), str(o.passed), o.ok() ? Status::kPass : Status::kFail, 0};
    if (!o.ok()) r.computed += " (first failure " + o.counterexample + ")";
    rep.checks.push_back(r);
  }
  return rep;
}

VerificationReport cmd_decompose(const RunConfig& c) {
  const std::size_t g = *c.g;
  const PrimeModulus p(*c.p);
  check_splitting_budget(SymplecticSpace(g, p), SplittingEnumerationOptions{c.extended});
  VerificationReport rep = start(c);

  DecompositionOptions o;
  o.engine = engine_of(c);
  o.extended = c.extended;
  o.workers = c.workers;
  o.seed = c.seed;
  o.snapshot_dir = c.snapshot_dir;
  AuditSelection sel;
  sel.all_cross_pairs = g == 2 && p.value() == 2;
  sel.product_isomorphism = g == 2 && p.value() == 2;
  sel.chain_bases_vanish = c.chain_bases_vanish;
  sel.step1 = g >= 2;

  DecompositionReport d;
  check(rep, "st-rank", "the apartment span has dimension p^(2g choose 2)", [&](CheckRecord& r) {
    d = poset_rep_audit(g, p, o, sel);
    compare(r, str(d.st_dim), str(d.st_rank));
  });
  if (d.st_dim == 0) return rep;  // the audit itself failed; nothing below is meaningful
  check(rep, "stns-dim", "dim StNS equals |Sp_2g(F_p)| / (g (p^2g - 1))",
        [&](CheckRecord& r) { compare(r, str(main_bound(g, p.value()).bound), str(d.stns_rank)); });
  check(rep, "decomposition-sum", "dim St equals the sum over all splittings S of dim StNS(S)",
        [&](CheckRecord& r) { compare(r, str(d.st_dim), str(d.stns_sum)); });
  for (const auto& row : d.rows) {
    const std::string t = type_string(row.type);
    if (row.type.size() > 1) {
      check(rep, "splitting-count " + t, "enumerated splittings of each type match the closed-form count",
            [&](CheckRecord& r) {
              compare(r, str(splitting_count(Partition::from_parts(row.type), g, p.value(), false)), str(row.count));
            });
    }
    check(rep, "stns-per-splitting " + t, "dim StNS(S) is the product of the part bounds, uniformly over the type",
          [&](CheckRecord& r) {
            BigInt expected = 1;
            for (auto a : row.type) expected *= main_bound(a, p.value()).bound;
            compare(r, str(expected), str(row.stns_dim));
            if (!row.uniform) {
              r.status = Status::kFail;
              r.computed += " (not uniform across the type)";
            }
          });
  }
  static const std::map<std::string, std::string> anchors{
      {"projection-system", "pi_S inc_S is the identity on the tensor basis of every St(S)"},
      {"pi-inc-identity", "pi_S inc_S is the identity on random generator products"},
      {"cross-projection-all-pairs", "pi_S maps V(S') into StSep(S) whenever S does not refine S'"},
      {"cross-projection-sampled", "pi_S maps V(S') into StSep(S) whenever S does not refine S'"},
      {"vdec-equals-stsep", "projections of proper refinements span exactly StSep(S)"},
      {"product-isomorphism", "St maps isomorphically onto the product of the StNS(S)"},
      {"chain-bases-vanish", "pi_S kills every chain-basis apartment for nontrivial S"},
      {"step1-spanning", "chain-basis apartments span St modulo StSep"}};
  for (const auto& h : d.checks) {
    CheckRecord r{h.name, anchors.count(h.name) ? anchors.at(h.name) : h.name, str(h.instances), str(h.passed),
                  h.ok() ? Status::kPass : Status::kFail, 0};
    if (h.name == "step1-spanning") {
      r.expected = str(d.stns_rank);
      r.computed = str(d.step1_quotient_rank);
    }
    if (!h.ok() && !h.counterexample.empty()) r.computed += " (first failure " + h.counterexample + ")";
    rep.checks.push_back(r);
  }
  rep.data["decomposition"] = decomposition_json(d);
  return rep;
}

VerificationReport cmd_identities(const RunConfig& c) {
  const std::size_t max_g = *c.g;
  const std::uint32_t p = *c.p;
  VerificationReport rep = start(c);
  std::vector<Rational> theta, lam;
  check(rep, "theta-recurrence", "theta_1..theta_g solve the partition recurrence with positive values",
        [&](CheckRecord& r) {
          theta = theta_sequence(max_g, p);
          compare(r, str(max_g), str(theta.size()));
        });
  if (theta.size() != max_g) return rep;
  for (std::size_t g = 1; g <= max_g; ++g) lam.push_back(lambda(g, p));
  const std::size_t series_max = std::min<std::size_t>(max_g, 10);
  const std::vector<Rational> series = exp_series(lam, series_max);
  for (std::size_t g = 1; g <= max_g; ++g) {
    const std::string k = " g=" + std::to_string(g);
    check(rep, "theta-equals-lambda" + k, "theta_g = 1 / (g (p^2g - 1))",
          [&](CheckRecord& r) { compare(r, str(lam[g - 1]), str(theta[g - 1])); });
    check(rep, "exponential-formula" + k,
          "sum over partitions of g of prod lambda_a^r / r! equals p^(2g choose 2) / |Sp_2g|",
          [&](CheckRecord& r) { compare(r, str(solomon_tits_ratio(g, p)), str(partition_exponential_sum(g, lam))); });
    if (g <= series_max) {
      check(rep, "exp-series" + k, "coefficient of x^g in exp(sum lambda_k x^k) equals p^(2g choose 2) / |Sp_2g|",
            [&](CheckRecord& r) { compare(r, str(solomon_tits_ratio(g, p)), str(series[g])); });
      check(rep, "euler-product" + k,
            "truncations of prod (1 - p^2h x) agree with Euler's coefficient as Q-series and p-adically",
            [&](CheckRecord& r) {
              const EulerCheck e = euler_product_check(g, g + 2, p);
              r.expected = "series agree, valuation >= " + std::to_string(e.required);
              r.computed = std::string(e.series_agree ? "series agree" : "series differ") + ", valuation " +
                           std::to_string(e.valuation);
              r.status = e.ok() ? Status::kPass : Status::kFail;
            });
    }
  }
  return rep;
}

VerificationReport cmd_bound(const RunConfig& c) {
  VerificationReport rep = start(c);
  std::vector<std::pair<std::size_t, std::uint32_t>> cells;
  const bool table = !c.g;
  if (table) {
    cells = remark_table_cells();
    for (std::size_t g = 1; g <= 10; ++g)
      for (std::uint32_t p : {2u, 3u, 5u, 7u})
        if (std::find(cells.begin(), cells.end(), std::make_pair(g, p)) == cells.end()) cells.emplace_back(g, p);
  } else {
    cells.emplace_back(*c.g, *c.p);
  }
  rep.data["bounds"] = nlohmann::ordered_json::array();
  rep.csv_rows.push_back(bound_csv_header());
  std::vector<std::string> flagged;
  for (const auto& [g, p] : cells) {
    const std::string k = " " + cell_string(g, p);
    std::optional<BoundReport> b;
    check(rep, "bound-integral" + k, "|Sp_2g(F_p)| / (g (p^2g - 1)) is an integer and theta_g = lambda_g",
          [&](CheckRecord& r) {
            b = main_bound(g, p);
            r.expected = "integer";
            r.computed = str(b->bound);
          });
    if (!b) continue;
    if (b->remark) {
      CheckRecord r{"remark-table" + k, "printed special case against the closed-form bound", str(*b->remark),
                    str(b->bound), b->discrepant() ? Status::kDiscrepant : Status::kPass, 0};
      rep.checks.push_back(r);
      if (b->discrepant()) flagged.push_back(cell_string(g, p));
    }
    rep.data["bounds"].push_back(bound_json(*b));
    rep.csv_rows.push_back(bound_csv_row(*b));
  }
  if (table) {
    check(rep, "discrepant-cells", "the printed table disagrees with the closed form in exactly these cells",
          [&](CheckRecord& r) {
            std::string got;
            for (const auto& f : flagged) got += (got.empty() ? "" : " ") + f;
            compare(r, "(2,3) (3,2) (4,2) (4,3)", got);
          });
  }
  return rep;
}

VerificationReport cmd_cache(const RunConfig& c) {
  VerificationReport rep = start(c);
  const DiskCache cache(c.cache_dir);
  if (c.action == "clear") {
    const std::size_t removed = cache.clear();
    rep.checks.push_back({"cache-clear", "cache files removed", "", str(removed), Status::kPass, 0});
    return rep;
  }
  const PrimeModulus p(*c.p);
  auto hit_string = [](bool hit) { return std::string(hit ? "hit" : "stored"); };
  if (c.n) {
    const std::size_t n = *c.n;
    for (std::size_t k = 0; k <= n; ++k) {
      check(rep, "subspaces k=" + std::to_string(k), "subspace table cached", [&](CheckRecord& r) {
        bool hit = false;
        r.expected = str(gaussian_binomial(n, k, p.value()));
        r.computed = str(cache.subspaces(n, p, k, &hit).size());
        r.status = r.expected == r.computed ? Status::kPass : Status::kFail;
        r.computed += " (" + hit_string(hit) + ")";
      });
    }
    auto ctx = BuildingContext::get(n, p);
    check(rep, "flag-index", "complete-flag index cached", [&](CheckRecord& r) {
      cache.store_flag_index(*ctx);
      r.computed = str(ctx->flag_count());
    });
    try {
      const BuildingChainComplex complex(ctx, c.extended ? BuildingMode::kExtended : BuildingMode::kDefault);
      check(rep, "boundaries", "boundary matrices cached", [&](CheckRecord& r) {
        cache.store_boundaries(complex);
        r.computed = str(static_cast<std::uint64_t>(complex.top_degree() + 1)) + " degrees";
      });
    } catch (const BudgetExceeded& e) {
      rep.checks.push_back({"boundaries", "boundary matrices cached", "", std::string("not run: ") + e.what(),
                            Status::kSkipped, 0});
    }
  }
  if (c.g) {
    check(rep, "splittings", "splitting list cached", [&](CheckRecord& r) {
      bool hit = false;
      r.computed = str(cache.splittings(*c.g, p, c.extended, &hit).size()) + " (" + hit_string(hit) + ")";
    });
  }
  return rep;
}

VerificationReport run(const RunConfig& c) {
  validate(c);
  if (c.subcommand != "cache")
    set_default_cache(c.cache_dir.empty() ? std::nullopt : std::optional(std::filesystem::path(c.cache_dir)));
  if (c.subcommand == "solomon-tits") return cmd_solomon_tits(c);
  if (c.subcommand == "decompose") return cmd_decompose(c);
  if (c.subcommand == "identities") return cmd_identities(c);
  if (c.subcommand == "bound") return cmd_bound(c);
  if (c.subcommand == "oracle-homology") return cmd_oracle_homology(c);
  if (c.subcommand == "relations") return cmd_relations(c);
  return cmd_cache(c);
}

}  // namespace stw::cli
