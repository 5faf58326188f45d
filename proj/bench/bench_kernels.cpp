#include <benchmark/benchmark.h>

#include "rcap/ambigcheck.hpp"
#include "rcap/capsearch.hpp"

using namespace rcap;

namespace {

/* Q(sqrt 10) has no admissible p, so the whole range is scanned */
SearchContext full_scan_context(QuadraticField const & K, RayClassGroup const & R, u64 bound)
{
    SearchParams P;
    P.n = 1;
    P.h = 0;
    P.h_override = true;
    P.bound = bound;
    finalize_params(K, P);
    return make_context(K, R, select_target(R.group, "auto-2"), aug_unit_mod_m(K, Modulus{}), P);
}

void BM_search_serial(benchmark::State & st)
{
    auto K = make_quadratic(10);
    auto R = ray_class_group(K, Modulus{});
    auto ctx = full_scan_context(K, R, 300000);
    for (auto _ : st)
        benchmark::DoNotOptimize(find_principalizing_prime_serial(ctx));
}

void BM_search_parallel(benchmark::State & st)
{
    auto K = make_quadratic(10);
    auto R = ray_class_group(K, Modulus{});
    auto ctx = full_scan_context(K, R, 300000);
    for (auto _ : st)
        benchmark::DoNotOptimize(find_principalizing_prime(ctx, static_cast<int>(st.range(0))));
}

void BM_fp_generator(benchmark::State & st)
{
    auto L = make_biquadratic(34, 5);
    auto U = unit_group(L);
    Ideal I = principal_ideal(L.field(), ZVec{17, -9, 4, 3});
    FPOptions opts;
    opts.jobs = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(fp_find_generator(L.field(), U.gens, I, opts));
}

void BM_ambig_sweep(benchmark::State & st)
{
    auto cases = ambig_corpus("modulus");
    for (auto _ : st)
        benchmark::DoNotOptimize(ambig_sweep(cases, static_cast<int>(st.range(0))));
}

} // namespace

BENCHMARK(BM_search_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_search_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fp_generator)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ambig_sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
