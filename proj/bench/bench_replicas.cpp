// Serial vs OpenMP replica kernels on the same workloads. The reduction is
// ordered, so both modes return identical estimates; only wall time differs.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "mcao/attenuate.hpp"
#include "mcao/norepeat.hpp"
#include "mcao/simlab.hpp"

using namespace mcao;

namespace {

ExecMode mode_of(const benchmark::State& st) { return st.range(0) ? ExecMode::Parallel : ExecMode::Serial; }

void label(benchmark::State& st) {
    st.SetLabel(st.range(0) ? "parallel, " + std::to_string(omp_get_max_threads()) + " threads" : "serial");
}

void BM_OfferAllHardness(benchmark::State& st) {
    const ExecMode mode = mode_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(hardness_sold_fraction(200, 2000, 1, mode).mean);
    label(st);
}

void BM_GreedyHotel(benchmark::State& st) {
    HotelTemplate tpl = gen_hotel_like(1);
    Instance inst = build_hotel_instance(tpl, {.loading_factor = 3.0, .scale_factor = 2.0}, 2);
    const ExecMode mode = mode_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_baseline(inst, BaselineKind::Greedy, 500, 3, mode).revenue.mean);
    label(st);
}

void BM_NoRepeatHotel(benchmark::State& st) {
    HotelTemplate tpl = gen_hotel_like(1);
    Instance inst = build_hotel_instance(tpl, {.loading_factor = 3.0, .scale_factor = 2.0}, 2);
    NoRepeatPlan plan = NoRepeatPlan::from(inst, solve_mcdlp(inst, McdlpVariant::MmcdlpNr));
    NoRepeatOptions opt;
    opt.variant = NoRepeatVariant::Modified;
    opt.enforce_preconditions = false;
    const ExecMode mode = mode_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_norepeat(inst, plan, opt, 2000, 4, mode).revenue.mean);
    label(st);
}

void BM_AttenuationEstimates(benchmark::State& st) {
    Instance inst = gen_hardness_instance(30);
    AttenPlan plan = AttenPlan::from(solve_mcdlp(inst, McdlpVariant::SingleItemLP));
    AttenuationOptions opt;
    opt.budget = 500;
    opt.mode = mode_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(compute_attenuation(inst, plan, opt, 5).vertex.size());
    label(st);
}

}  // namespace

BENCHMARK(BM_OfferAllHardness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreedyHotel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoRepeatHotel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AttenuationEstimates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
