// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <algorithm>

#include "ncclab/corpus.hpp"
#include "ncclab/hardpoly.hpp"
#include "ncclab/nisan.hpp"
#include "ncclab/normalize.hpp"

using namespace ncclab;

namespace {

NisanMatrix hard_matrix(std::size_t n, std::size_t d) {
  return build_matrix(palindrome_poly({n, d}), d / 2, d / 2);
}

// Dense-ish matrix: the palindrome plus every word with a nonzero, varying coefficient.
NisanMatrix mixed_matrix(std::size_t n, std::size_t half) {
  const NcPoly base = palindrome_poly({n, 2 * half});
  NcPoly p = base;
  const Field q = p.field();
  std::size_t seed = 1;
  for (const auto& [w, c] : base.terms()) {
    Word shifted = w;
    std::rotate(shifted.begin(), shifted.begin() + 1, shifted.end());
    p.add_term(shifted, FieldElem::from_int(q, static_cast<long>(seed++ % 7) + 1));
  }
  return build_matrix(p, half, half);
}

void BM_RankParallel(benchmark::State& st) {
  const NisanMatrix m = mixed_matrix(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(rank(m).rank);
}

void BM_RankSerial(benchmark::State& st) {
  const NisanMatrix m = mixed_matrix(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(rank_serial(m).rank);
}

void BM_HardRankParallel(benchmark::State& st) {
  const NisanMatrix m = hard_matrix(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(rank(m).rank);
}

void BM_HardRankSerial(benchmark::State& st) {
  const NisanMatrix m = hard_matrix(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(rank_serial(m).rank);
}

struct GateFixture {
  Circuit c;
  std::vector<NcPoly> f;
  RankTable table;
  std::vector<GateJob> jobs;
};

const GateFixture& gate_fixture() {
  static const GateFixture fx = [] {
    GateFixture g{normalize(random_circuit(entry_seed(3, 0), CorpusLimits{4, 8, 80}, Field::rationals())).circuit,
                  {}, {}, {}};
    g.f = node_polynomials(g.c);
    const std::size_t deg = *g.f[g.c.output()].degree();
    g.table = compute_rank_table(g.f, deg);
    g.jobs = all_gate_jobs(g.c, deg);
    return g;
  }();
  return fx;
}

void BM_CheckGatesParallel(benchmark::State& st) {
  const GateFixture& g = gate_fixture();
  for (auto _ : st) benchmark::DoNotOptimize(check_gates(g.c, g.f, g.table, g.jobs).size());
}

void BM_CheckGatesSerial(benchmark::State& st) {
  const GateFixture& g = gate_fixture();
  for (auto _ : st) benchmark::DoNotOptimize(check_gates_serial(g.c, g.f, g.table, g.jobs).size());
}

void BM_RankTableParallel(benchmark::State& st) {
  const GateFixture& g = gate_fixture();
  for (auto _ : st) benchmark::DoNotOptimize(compute_rank_table(g.f, g.table.max_total()).max_total());
}

void BM_RankTableSerial(benchmark::State& st) {
  const GateFixture& g = gate_fixture();
  for (auto _ : st) benchmark::DoNotOptimize(compute_rank_table_serial(g.f, g.table.max_total()).max_total());
}

}  // namespace

BENCHMARK(BM_RankParallel)->Args({3, 3})->Args({4, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankSerial)->Args({3, 3})->Args({4, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HardRankParallel)->Args({2, 12})->Args({4, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HardRankSerial)->Args({2, 12})->Args({4, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckGatesParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckGatesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankTableParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankTableSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
