// Microbenchmarks for the two hot paths: local polynomial smoothing and the
// SCAD coordinate descent. Inputs are synthetic and deterministic so timings
// are comparable across runs; none of this is wired into ctest.

#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <vector>

#include <sparseode/functionals.hpp>
#include <sparseode/rng.hpp>
#include <sparseode/simulation.hpp>
#include <sparseode/smoother.hpp>
#include <sparseode/sparse_solver.hpp>

namespace {

using namespace sparseode;

// Noisy sine observations on n equispaced times in [0, 1].
struct Series {
    Eigen::VectorXd times;
    Eigen::VectorXd values;
};

Series make_series(int n) {
    Rng rng(42);
    Series s;
    s.times.resize(n);
    s.values.resize(n);
    for (int i = 0; i < n; ++i) {
        s.times[i] = (i + 1) / static_cast<double>(n);
        s.values[i] = std::sin(6.0 * s.times[i]) + 0.1 * rng.normal();
    }
    return s;
}

// SPD quadratic form with a sparse ground truth, mimicking the Gram systems
// the estimator produces.
struct Quadratic {
    FunctionalMatrix fm;
};

Quadratic make_quadratic(int p) {
    Rng rng(7);
    Eigen::MatrixXd M(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) M(i, j) = rng.normal();
    Eigen::MatrixXd Q = M.transpose() * M / static_cast<double>(p);
    Q += 0.05 * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta[0] = -2.0;
    beta[1] = 5.0;
    Quadratic q;
    q.fm.target = 0;
    q.fm.Q = Q;
    q.fm.b = Q * beta;
    return q;
}

void BM_LocalPolyFit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Series s = make_series(n);
    SmootherConfig cfg;
    cfg.bandwidth = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(local_poly_fit(s.times, s.values, 0.5, cfg));
    }
}
BENCHMARK(BM_LocalPolyFit)->Arg(100)->Arg(400);

void BM_SmoothCurve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Series s = make_series(n);
    const QuadratureGrid quad(201);
    SmootherConfig cfg;
    cfg.bandwidth = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(smooth_curve(s.times, s.values, quad.points, cfg));
    }
}
BENCHMARK(BM_SmoothCurve)->Arg(100)->Arg(400);

void BM_AssembleFunctionalMatrix(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const QuadratureGrid quad(201);
    Rng rng(3);
    std::vector<SmoothedCurve> curves(static_cast<size_t>(p));
    for (auto& c : curves) {
        c.grid = quad.points;
        c.value.resize(quad.size());
        c.deriv.resize(quad.size());
        const double a = rng.uniform(0.5, 2.0);
        const double w = rng.uniform(1.0, 8.0);
        for (int g = 0; g < quad.size(); ++g) {
            c.value[g] = a * std::sin(w * quad.points[g]);
            c.deriv[g] = a * w * std::cos(w * quad.points[g]);
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_functional_matrix(curves, 0, quad));
    }
}
BENCHMARK(BM_AssembleFunctionalMatrix)->Arg(10)->Arg(20)->Arg(40);

void BM_ScadDescent(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const Quadratic q = make_quadratic(p);
    ScadParams params;
    params.lambda = 0.1;
    FitOptions opts;
    opts.init = Eigen::VectorXd::Zero(p);  // fixed start for comparable sweeps
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_scad(q.fm, params, opts));
    }
}
BENCHMARK(BM_ScadDescent)->Arg(10)->Arg(20)->Arg(40);

void BM_ScadPath(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const Quadratic q = make_quadratic(p);
    const std::vector<double> grid =
        default_lambda_grid(q.fm.Q, q.fm.b, 3.7, 20, 1e-4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_scad_path(q.fm, grid));
    }
}
BENCHMARK(BM_ScadPath)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
