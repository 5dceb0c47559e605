#include <benchmark/benchmark.h>

#include "splinemom/assembly.hpp"
#include "splinemom/models.hpp"

using namespace splinemom;

namespace {

struct Setup {
    std::shared_ptr<const MultipatchSurface> surface;
    ConformingSpace space;
    EfieIntegrator integrator;

    explicit Setup(int href, int a, int b)
        : surface(std::make_shared<const MultipatchSurface>(make_sphere().refined(href))),
          space(build_conforming_space(surface, SpaceKind::Div, a, b)),
          integrator(space, 3.0, QuadratureConfig{}) {}
};

} // namespace

static void BM_RegularPairBlock(benchmark::State& state) {
    Setup setup(2, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) - 1);
    Eigen::MatrixXcd block;
    for (auto _ : state) {
        setup.integrator.pair_block(3, 80, block); // far pair on the h2 sphere
        benchmark::DoNotOptimize(block);
    }
}
BENCHMARK(BM_RegularPairBlock)->Arg(1)->Arg(2)->Arg(3);

static void BM_CoincidentPairBlock(benchmark::State& state) {
    Setup setup(1, 2, 1);
    Eigen::MatrixXcd block;
    for (auto _ : state) {
        setup.integrator.pair_block(5, 5, block);
        benchmark::DoNotOptimize(block);
    }
}
BENCHMARK(BM_CoincidentPairBlock);

static void BM_SauterSchwabRuleBuild(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sauter_schwab_rule(PairClass::Coincident, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SauterSchwabRuleBuild)->Arg(4)->Arg(6)->Arg(8);
