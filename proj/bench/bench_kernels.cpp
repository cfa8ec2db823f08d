// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <cstdio>

#include "qvdp/error.hpp"
#include "qvdp/fock.hpp"
#include "qvdp/langevin.hpp"
#include "qvdp/linalg.hpp"
#include "qvdp/liouvillian.hpp"

using namespace qvdp;

namespace {

const ModelParams kParams = ModelParams::from_ratios(1.0, 20.0, 0.1, 0.4);

template <bool Serial>
void apply(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const Generator g = rotating_generator(kParams, d);
    const CMatrix rho = coherent_state(FockSpace(d), 2.0).matrix();
    CMatrix out(d, d);
    for (auto _ : state) {
        if constexpr (Serial) apply_generator_serial(g, rho, out);
        else apply_generator(g, rho, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Serial>
void sector(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const Generator g = rotating_generator(kParams, d);
    const SectorBasis basis(d, Parity::Odd);
    for (auto _ : state) {
        RMatrix r = Serial ? build_sector_matrix_serial(g, basis) : build_sector_matrix(g, basis);
        benchmark::DoNotOptimize(r.data());
    }
}

template <langevin::Execution Exec>
void phase_ensemble(benchmark::State& state) {
    langevin::LangevinConfig c;
    c.dt = 1e-3;
    c.n_steps = 10000;
    c.n_trajectories = static_cast<int>(state.range(0));
    c.record_every = 100;
    for (auto _ : state) {
        auto e = langevin::simulate_phase(kParams, c, Exec);
        benchmark::DoNotOptimize(e.paths.data());
    }
}

}  // namespace

BENCHMARK(apply<false>)->Name("apply_generator/openmp")->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(apply<true>)->Name("apply_generator/serial")->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(sector<false>)->Name("build_sector_matrix/openmp")->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(sector<true>)->Name("build_sector_matrix/serial")->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(phase_ensemble<langevin::Execution::Parallel>)->Name("langevin_phase/openmp")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(phase_ensemble<langevin::Execution::Serial>)->Name("langevin_phase/serial")->Arg(64)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    try {
        linalg::ensure_reliable_blas(argv);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
