#include <benchmark/benchmark.h>

#include "sane/encoding.hpp"
#include "sane/engine.hpp"
#include "sane/phenotype.hpp"
#include "sane/speciation.hpp"
#include "support/support.hpp"

using namespace sane;

namespace {

std::vector<Genotype> random_population(const SearchSpace& space, int n, std::uint64_t seed) {
    Rng rng(seed);
    IdAllocator ids;
    std::vector<Genotype> pop;
    for (int i = 0; i < n; ++i) {
        pop.push_back(fixtures::random_genotype(space, rng, 20, ids));
    }
    return pop;
}

void BM_Distance(benchmark::State& state) {
    const auto pop = random_population(builtin_space(BuiltinSpace::cnn), 2, 1);
    const SpeciationConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance(pop[0], pop[1], config));
    }
}
BENCHMARK(BM_Distance);

void BM_Speciate(benchmark::State& state) {
    const auto pop = random_population(builtin_space(BuiltinSpace::cnn), static_cast<int>(state.range(0)), 2);
    SpeciationConfig config;
    config.tau_d = 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(speciate(pop, SpeciesSet{}, config));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Speciate)->Arg(20)->Arg(50)->Arg(100);

void BM_VaryRound(benchmark::State& state) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto config = VariationConfig::defaults_for(space);
    const auto seed_pool = random_population(space, 50, 3);
    Rng rng(4);
    IdAllocator ids(1000);
    for (auto _ : state) {
        auto pool = seed_pool;
        benchmark::DoNotOptimize(vary_round(pool, space, config, rng, ids));
    }
}
BENCHMARK(BM_VaryRound);

void BM_Decode(benchmark::State& state) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto g = minimal_genotype(space, 1);
    const std::vector<int> shape{3, 32, 32};
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode(g, space, shape));
    }
}
BENCHMARK(BM_Decode);

void BM_EncodeBinary(benchmark::State& state) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto schema = StateSchema::from_space(space);
    const auto pop = random_population(space, 1, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_binary(pop[0], schema));
    }
}
BENCHMARK(BM_EncodeBinary);

void BM_SubsetSumRun(benchmark::State& state) {
    const int z = static_cast<int>(state.range(0));
    const auto space = fixtures::subset_sum_space(z / 4);
    const auto problem = SubsetSumProblem::all_ones(StateSchema::from_space(space));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SubsetSumEvaluator eval(problem);
        benchmark::DoNotOptimize(run(space, fixtures::subset_sum_config(space, z, seed++), eval));
    }
}
BENCHMARK(BM_SubsetSumRun)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
