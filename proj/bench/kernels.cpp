#include "wqm/bell_stats.hpp"
#include "wqm/sim_engine.hpp"

#include <benchmark/benchmark.h>

namespace {

std::vector<wqm::SlotRecord> make_log(std::uint64_t n)
{
    wqm::RunConfig c;
    c.n_slots = n;
    c.schedule = wqm::SettingsSchedule::random(n, 11);
    return wqm::run(c).slots;
}

void BM_count_parallel(benchmark::State& state)
{
    const auto log = make_log(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wqm::count_coincidences(log));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_count_serial(benchmark::State& state)
{
    const auto log = make_log(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wqm::count_coincidences_serial(log));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

wqm::RunConfig scan_base(std::int64_t n)
{
    wqm::RunConfig c;
    c.n_slots = static_cast<std::uint64_t>(n);
    c.schedule = wqm::SettingsSchedule::block(c.n_slots);
    return c;
}

const std::vector<double> kDeltas{0.0, wqm::kPi / 8, wqm::kPi / 4, 3 * wqm::kPi / 8, wqm::kPi / 2};

void BM_scan_parallel(benchmark::State& state)
{
    const auto base = scan_base(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(wqm::curve_scan(base, kDeltas));
}

void BM_scan_serial(benchmark::State& state)
{
    const auto base = scan_base(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(wqm::curve_scan_serial(base, kDeltas));
}

}  // namespace

BENCHMARK(BM_count_parallel)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_count_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_scan_parallel)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scan_serial)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
