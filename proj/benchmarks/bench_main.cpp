#include <benchmark/benchmark.h>

#include <random>

#include "stw/building.hpp"
#include "stw/counting.hpp"
#include "stw/rank.hpp"
#include "stw/steinberg.hpp"

using namespace stw;

namespace {

std::vector<std::vector<FpVector>> random_bases(std::size_t n, std::uint32_t p, std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t codes = 1;
  for (std::size_t i = 0; i < n; ++i) codes *= p;
  std::uniform_int_distribution<std::uint64_t> d(1, codes - 1);
  std::vector<std::vector<FpVector>> out;
  while (out.size() < count) {
    std::vector<FpVector> b;
    for (std::size_t i = 0; i < n; ++i) b.push_back(FpVector::from_code(PrimeModulus(p), n, d(rng)));
    out.push_back(std::move(b));
  }
  return out;
}

void BM_ApartmentVector(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::uint32_t>(state.range(1));
  auto ctx = BuildingContext::get(n, PrimeModulus(p));
  const auto bases = random_bases(n, p, 64, 7);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apartment_vector(bases[i++ % bases.size()], *ctx));
}
BENCHMARK(BM_ApartmentVector)->Args({3, 2})->Args({4, 2})->Args({4, 3});

void BM_SpanInsertion(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::uint32_t>(state.range(1));
  auto ctx = BuildingContext::get(n, PrimeModulus(p));
  std::vector<IntVector> vs;
  for (const auto& b : random_bases(n, p, 400, 11)) vs.push_back(apartment_vector(b, *ctx));
  for (auto _ : state) {
    SpanBasis span(ctx->flag_count(), RankEngineConfig::modular());
    for (const auto& v : vs) span.insert(v);
    benchmark::DoNotOptimize(span.rank());
  }
}
BENCHMARK(BM_SpanInsertion)->Args({3, 3})->Args({4, 2})->Unit(benchmark::kMillisecond);

void BM_DenseEchelon(benchmark::State& state) {
  const auto ncols = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::vector<IntVector> vs(ncols / 2);
  for (auto& v : vs)
    for (std::uint32_t c = 0; c < ncols; c += 1 + rng() % 7) v.entries.emplace_back(c, static_cast<std::int64_t>(rng() % 5) - 2);
  for (auto& v : vs) v.canonicalize();
  for (auto _ : state) {
    DenseModularEchelon e(67108859, ncols);
    for (const auto& v : vs) e.insert(v);
    benchmark::DoNotOptimize(e.rank());
  }
}
BENCHMARK(BM_DenseEchelon)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ExponentialFormula(benchmark::State& state) {
  const auto g = static_cast<std::size_t>(state.range(0));
  std::vector<Rational> lam;
  for (std::size_t a = 1; a <= g; ++a) lam.push_back(lambda(a, 3));
  for (auto _ : state) benchmark::DoNotOptimize(partition_exponential_sum(g, lam));
}
BENCHMARK(BM_ExponentialFormula)->Arg(8)->Arg(16)->Arg(24);

void BM_MainBound(benchmark::State& state) {
  for (auto _ : state)
    for (std::size_t g = 1; g <= 10; ++g) benchmark::DoNotOptimize(main_bound(g, 7));
}
BENCHMARK(BM_MainBound);

}  // namespace

BENCHMARK_MAIN();
