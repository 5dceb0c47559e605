#include <benchmark/benchmark.h>

#include "splinemom/knot_vector.hpp"

using namespace splinemom;

static void BM_CoxDeBoorDers(benchmark::State& state) {
    const KnotVector kv = KnotVector::uniform(static_cast<int>(state.range(0)), 16);
    double u = 0.0;
    for (auto _ : state) {
        u += 0.6180339887;
        if (u > 1.0) u -= 1.0;
        benchmark::DoNotOptimize(kv.eval_basis_ders(u, 1));
    }
}
BENCHMARK(BM_CoxDeBoorDers)->Arg(2)->Arg(3)->Arg(4);

static void BM_BezierExtractedEval(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const KnotVector kv = KnotVector::uniform(p, 16);
    const BezierExtraction ext = bezier_extract(kv);
    double u = 0.0;
    for (auto _ : state) {
        u += 0.6180339887;
        if (u > 1.0) u -= 1.0;
        const int e = kv.element_of(u);
        const auto [a, b] = kv.element_bounds(e);
        const Eigen::MatrixXd bern = bernstein_ders(p, (u - a) / (b - a), 1);
        benchmark::DoNotOptimize((ext.operators[e] * bern.transpose()).eval());
    }
}
BENCHMARK(BM_BezierExtractedEval)->Arg(2)->Arg(3)->Arg(4);

static void BM_KnotInsertion(benchmark::State& state) {
    const KnotVector kv = KnotVector::uniform(4, 8);
    for (auto _ : state) benchmark::DoNotOptimize(kv.refine_dyadic(1));
}
BENCHMARK(BM_KnotInsertion);

BENCHMARK_MAIN();
