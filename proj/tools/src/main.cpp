#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "stw/error.hpp"
#include "stw_cli/run.hpp"

using namespace stw::cli;

namespace {

void add_common(CLI::App* sub, RunConfig& c, bool uses_n, bool uses_g) {
  static const std::map<std::string, Format> formats{{"text", Format::kText}, {"json", Format::kJson}, {"csv", Format::kCsv}};
  if (uses_n) sub->add_option("--n", c.n, "ambient dimension");
  if (uses_g) sub->add_option("--g", c.g, "genus (or largest genus for identities)");
  sub->add_option("--p", c.p, "prime");
  sub->add_flag("--extended", c.extended, "admit the larger extended-mode cases");
  sub->add_flag("--exact", c.exact, "exact rational ranks instead of modular");
  sub->add_option("--primes", c.primes, "number of modular primes")->capture_default_str();
  sub->add_option("--workers", c.workers, "worker threads (overrides STW_WORKERS)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--format", c.format, "text, json or csv")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  sub->add_option("--out", c.out, "write the report here instead of stdout");
  sub->add_option("--cache-dir", c.cache_dir, "on-disk cache directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steinberg module verification runs"};
  app.require_subcommand(1);
  RunConfig c;
  try {
    c.workers = workers_from_env(1);
  } catch (const stw::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  auto* st = app.add_subcommand("solomon-tits", "apartment span dimension against p^(n choose 2), with the homology oracle");
  add_common(st, c, true, false);
  auto* dec = app.add_subcommand("decompose", "separated/non-separated decomposition audit");
  add_common(dec, c, false, true);
  dec->add_option("--snapshot-dir", c.snapshot_dir, "store and reuse ambient separated spans (g = 3)");
  dec->add_flag("--chain-bases-vanish", c.chain_bases_vanish, "also test that projections kill chain-basis apartments");
  auto* id = app.add_subcommand("identities", "theta = lambda, the exponential formula and Euler's product");
  add_common(id, c, false, true);
  auto* bd = app.add_subcommand("bound", "the dimension bound, alone or as the full table");
  add_common(bd, c, false, true);
  auto* oh = app.add_subcommand("oracle-homology", "reduced homology of the building");
  add_common(oh, c, true, false);
  auto* rel = app.add_subcommand("relations", "randomized apartment relation checks");
  add_common(rel, c, true, false);
  rel->add_option("--samples", c.samples, "instances per relation")->capture_default_str();
  auto* cache = app.add_subcommand("cache", "manage the on-disk cache");
  cache->require_subcommand(1);
  auto* warm = cache->add_subcommand("warm", "fill the cache for --n and/or --g");
  add_common(warm, c, true, true);
  auto* clear = cache->add_subcommand("clear", "remove cache files");
  add_common(clear, c, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  for (auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
  if (c.subcommand == "cache") c.action = warm->parsed() ? "warm" : "clear";

  try {
    const VerificationReport rep = run(c);
    const std::string text = render(rep, c.format);
    if (c.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(c.out, std::ios::trunc);
      if (!out) throw stw::DomainError("cannot write " + c.out);
      out << text;
      std::cout << (rep.ok() ? "PASS" : "FAIL") << ' ' << c.out << '\n';
    }
    return exit_code(rep);
  } catch (const stw::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const stw::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const stw::CheckFailure& e) {
    std::cerr << "check failure: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}
