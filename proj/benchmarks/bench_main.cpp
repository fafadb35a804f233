#include <benchmark/benchmark.h>

#include "skelpre/experiment.hpp"

using namespace skelpre;

namespace {

struct Setup
{
    MeshHierarchy hier;
    std::shared_ptr<const SkeletonSpace> space;
    std::shared_ptr<const SparseMatrix> d;
};

Setup
make_setup(int level, int k)
{
    Setup s;
    s.hier = build_hierarchy(DomainKind::square(), level);
    s.space = std::make_shared<const SkeletonSpace>(s.hier.levels.back(), k);
    s.d = std::make_shared<const SparseMatrix>(assemble_schur(*s.space, MethodSpec::make(MethodFamily::hdg3, k)).d);
    return s;
}

void
BM_AssembleSchur(benchmark::State& state)
{
    const int level = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const MeshHierarchy hier = build_hierarchy(DomainKind::square(), level);
    const SkeletonSpace s(hier.levels.back(), k);
    const MethodSpec spec = MethodSpec::make(MethodFamily::hdg3, k);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_schur(s, spec));
    state.counters["dof"] = static_cast<double>(s.dof_count());
}
BENCHMARK(BM_AssembleSchur)->Args({4, 0})->Args({5, 0})->Args({4, 1})->Args({5, 1})->Unit(benchmark::kMillisecond);

void
BM_BpxApply(benchmark::State& state)
{
    const Setup s = make_setup(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const BpxPreconditioner b = make_bpx(s.hier, *s.space, ProlongationKind::face_l2);
    const Vector x = Vector::Ones(s.space->dof_count());
    Vector y;
    for (auto _ : state) {
        b.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.counters["dof"] = static_cast<double>(s.space->dof_count());
}
BENCHMARK(BM_BpxApply)->Args({5, 0})->Args({6, 0})->Args({7, 0})->Args({6, 1})->Unit(benchmark::kMicrosecond);

void
BM_SgsApply(benchmark::State& state)
{
    const Setup s = make_setup(static_cast<int>(state.range(0)), 0);
    const Vector x = Vector::Ones(s.space->dof_count());
    for (auto _ : state)
        benchmark::DoNotOptimize(smoother_apply(SmootherKind::sgs, *s.d, x));
}
BENCHMARK(BM_SgsApply)->Arg(5)->Arg(6)->Unit(benchmark::kMicrosecond);

void
BM_PcgBpx(benchmark::State& state)
{
    const Setup s = make_setup(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const LinearOperator a = LinearOperator::from_matrix(s.d);
    const LinearOperator b = make_bpx(s.hier, *s.space, ProlongationKind::face_l2).as_operator();
    const Index n = s.space->dof_count();
    int iterations = 0;
    for (auto _ : state) {
        const PcgResult r = pcg(a, b, Vector::Zero(n), Vector::Ones(n));
        iterations = r.report.iterations;
        benchmark::DoNotOptimize(r.x.data());
    }
    state.counters["iterations"] = iterations;
    state.counters["dof"] = static_cast<double>(n);
}
BENCHMARK(BM_PcgBpx)->Args({5, 0})->Args({6, 0})->Args({5, 1})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
