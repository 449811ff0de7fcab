// Shipped-claims verification: runs the end-to-end checks the library is
// sold on and prints one [PASS]/[FAIL] line per claim. Exits nonzero if any
// claim fails. Heavier than the unit suite; expect several minutes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sparseode/pipeline.hpp"
#include "sparseode/simulation.hpp"
#include "sparseode/version.hpp"

using namespace sparseode;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " — " << detail
              << std::endl;
    if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

// 1. Head-to-head benchmark at desk scale: the penalized two-step estimator
// beats both the unpenalized fit and the difference-quotient baseline on
// coefficient error, and selects a support of believable size.
void check_benchmark_ordering() {
    SimConfig sim;
    sim.n = 100;
    sim.sigma = 0.1;
    sim.seed = 1;
    sim.replicates = 100;
    EstimatorConfig est;
    const auto t0 = Clock::now();
    const BenchmarkReport rep = run_benchmark(sim, est);
    const double secs = seconds_since(t0);

    const EstimatorAggregate scad = rep.aggregate(EstimatorKind::Scad);
    const EstimatorAggregate ols = rep.aggregate(EstimatorKind::Ols);
    const EstimatorAggregate tss = rep.aggregate(EstimatorKind::TsScad);
    const bool complete = rep.completed() == sim.replicates;
    const bool beats_ols = ols.amse_mean >= 1.5 * scad.amse_mean;
    const bool beats_ts = tss.amse_mean >= 1.5 * scad.amse_mean;
    const bool count_ok = scad.avg_nonzero >= 2.0 && scad.avg_nonzero <= 4.0;
    const bool time_ok = secs < 600.0;
    report(complete && beats_ols && beats_ts && count_ok && time_ok,
           "benchmark-ordering",
           "n=100, 100 replicates: amse SCAD=" + fmt(scad.amse_mean) +
               " OLS=" + fmt(ols.amse_mean) + " TS-SCAD=" + fmt(tss.amse_mean) +
               ", avg nonzero=" + fmt(scad.avg_nonzero) + ", " +
               std::to_string(rep.completed()) + "/100 ok, " + fmt(secs, 3) +
               " s");
}

// 2. Support recovery sharpens with sample size. Selection consistency is an
// asymptotic guarantee, stated for tunings that shrink at prescribed rates —
// bandwidth of order n^(-1/5), penalty level of order n^(-2/5) — with the
// curve count growing much more slowly than sqrt(n). The check instantiates
// that regime directly: a fixed 4-curve family, rate-scaled bandwidth and
// penalty with fixed constants, and a noise floor small enough that the
// large-sample behavior is visible at these n. (The cross-validated pipeline
// on the heavy growing-dimension design is what the head-to-head benchmark
// above exercises; prediction-optimal cross-validation deliberately trades
// exact support for fit, so it is not the object of this claim.)
void check_support_trend() {
    const int ns[3] = {50, 100, 200};
    double frac[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        const int n = ns[i];
        const double h = 0.20 * std::pow(n, -0.2);
        const double lam = 0.06 * std::pow(n, -0.4);
        int hits = 0;
        for (int r = 0; r < 30; ++r) {
            Rng rng(Rng::substream_seed(1, static_cast<std::uint64_t>(r)));
            const LinearSystem sys = make_block_system(2, rng);
            Eigen::VectorXd times(n);
            for (int k = 0; k < n; ++k)
                times[k] = (k + 1) / static_cast<double>(n);
            const Eigen::MatrixXd traj =
                euler_solve(sys, aligned_euler_step(n, 1e-4), times);
            const TimeSeries raw = observe(traj, times, 0.01, rng);
            const RescaledSeries resc = rescale_times(raw);
            std::vector<int> truth;
            for (int j = 0; j < sys.p(); ++j)
                if (sys.A(0, j) != 0.0) truth.push_back(j);

            EstimatorConfig est;
            est.bandwidths = {h};
            const SmoothedPanel panel = smooth_panel(resc.ts, est);
            const FunctionalMatrix fm =
                assemble_functional_matrix(panel.curves, 0, panel.quad);
            // Warm-started descent from far above lambda_max down to the
            // rate-scaled level; the fit at that level is the selection.
            std::vector<double> grid;
            const int steps = 40;
            for (int k = 0; k <= steps; ++k)
                grid.push_back(lam * std::pow(10.0 / lam,
                                              static_cast<double>(steps - k) /
                                                  steps));
            const std::vector<SparseFit> path = fit_scad_path(fm, grid);
            if (path.back().support == truth) ++hits;
        }
        frac[i] = hits / 30.0;
    }
    const bool ok =
        frac[0] <= frac[1] && frac[1] <= frac[2] && frac[2] >= 0.8;
    report(ok, "support-recovery-trend",
           "exact-support fraction " + fmt(frac[0]) + " (n=50) -> " +
               fmt(frac[1]) + " (n=100) -> " + fmt(frac[2]) +
               " (n=200); 4 curves, sigma=0.01, h=0.2 n^(-1/5), lambda=0.06 "
               "n^(-2/5)");
}

// 3. Noiseless end-to-end run recovers the whole network exactly.
void check_noiseless_recovery() {
    const int n = 400;
    Rng rng(17);
    const LinearSystem sys = make_block_system(2, rng);
    Eigen::VectorXd times(n);
    for (int i = 0; i < n; ++i) times[i] = (i + 1) / static_cast<double>(n);
    const Eigen::MatrixXd traj =
        euler_solve(sys, aligned_euler_step(n, 1e-4), times);
    Rng noise(1);
    TimeSeries ts = observe(traj, times, 0.0, noise);
    const RescaledSeries resc = rescale_times(ts);

    EstimatorConfig cfg;
    const AdjacencyOutput adj = fit_network(resc.ts, cfg);
    bool supports_ok = true;
    for (int r = 0; r < 4; ++r) {
        const int base = 2 * (r / 2);
        supports_ok = supports_ok && adj.supports[static_cast<size_t>(r)] ==
                                         std::vector<int>{base, base + 1};
    }
    const double duration = 1.0 - 1.0 / n;
    const double max_err = (adj.A - duration * sys.A).cwiseAbs().maxCoeff();
    report(supports_ok && max_err <= 0.1, "noiseless-recovery",
           "p=4, n=400, sigma=0: supports " +
               std::string(supports_ok ? "exact" : "WRONG") +
               ", max coefficient error " + fmt(max_err));
}

// 4. The closed-form univariate penalty minimizer agrees with a dense
// grid search + bisection oracle across the parameter sweep.
void check_threshold_oracle() {
    const auto t0 = Clock::now();
    double max_diff = 0.0;
    long points = 0;
    for (double lambda : {0.1, 1.0})
        for (double q : {0.5, 2.0})
            for (double a : {2.5, 3.7})
                for (int k = 0; k <= 400; ++k) {
                    const double z = -5.0 + 0.025 * k;
                    ScadParams params;
                    params.lambda = lambda;
                    params.a = a;
                    const double got = scad_threshold(z, q, params);
                    const double want =
                        oracle::threshold_bruteforce(z, q, lambda, a);
                    double diff = std::abs(got - want);
                    if (diff > 1e-6) {
                        // Two exact global minimizers: accept either argmin
                        // as long as the objective values tie.
                        const double f_got =
                            oracle::threshold_objective(got, z, q, lambda, a);
                        const double f_want =
                            oracle::threshold_objective(want, z, q, lambda, a);
                        if (f_got <= f_want + 1e-12 * (1.0 + std::abs(f_want)))
                            diff = 0.0;
                    }
                    max_diff = std::max(max_diff, diff);
                    ++points;
                }
    const double secs = seconds_since(t0);
    report(max_diff <= 1e-6 && secs < 10.0, "threshold-oracle",
           std::to_string(points) + " sweep points, max |diff| = " +
               fmt(max_diff, 3) + ", " + fmt(secs, 3) + " s");
}

// 5. Local polynomial fits reproduce cubic-or-lower data exactly.
void check_local_poly_exactness() {
    oracle::TestRand rnd(7);
    const int n = 200;
    Eigen::VectorXd times(n);
    for (int i = 0; i < n; ++i) times[i] = i / (n - 1.0);
    double max_val_err = 0.0, max_der_err = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int deg = rep % 4;
        double c[4] = {0, 0, 0, 0};
        for (int d = 0; d <= deg; ++d) c[d] = rnd.unif(-2.0, 2.0);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            const double t = times[i];
            y[i] = c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        }
        SmootherConfig cfg;
        cfg.bandwidth = rnd.unif(0.08, 0.35);
        for (int j = 0; j < 15; ++j) {
            const double x =
                cfg.bandwidth + (1.0 - 2.0 * cfg.bandwidth) * j / 14.0;
            const Eigen::VectorXd alpha = local_poly_fit(times, y, x, cfg);
            const double val = c[0] + x * (c[1] + x * (c[2] + x * c[3]));
            const double der = c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
            max_val_err = std::max(max_val_err, std::abs(alpha[0] - val));
            max_der_err = std::max(max_der_err, std::abs(alpha[1] - der));
        }
    }
    report(max_val_err <= 1e-8 && max_der_err <= 1e-8, "local-poly-exactness",
           "50 random cubic cases: max value err " + fmt(max_val_err, 3) +
               ", max derivative err " + fmt(max_der_err, 3));
}

// 6. Quadrature reproduces every closed-form moment of the weight function.
void check_quadrature_fixtures() {
    const QuadratureGrid quad(201);
    const int G = quad.size();
    double max_err = 0.0;
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; k <= 4; ++k) {
            Eigen::VectorXd f(G), g = Eigen::VectorXd::Ones(G);
            for (int i = 0; i < G; ++i) {
                const double x = quad.points[i];
                f[i] = std::pow(x, j) * std::pow(1.0 - x, k);
            }
            const double got = inner_product(f, g, quad);
            const double want =
                static_cast<double>(oracle::beta_weight_moment(j, k));
            max_err = std::max(max_err, std::abs(got - want));
        }

    // Assembled form on analytic curves m1(x)=x, m2(x)=1.
    std::vector<SmoothedCurve> curves(2);
    curves[0].grid = quad.points;
    curves[0].value = quad.points;
    curves[0].deriv = Eigen::VectorXd::Ones(G);
    curves[1].grid = quad.points;
    curves[1].value = Eigen::VectorXd::Ones(G);
    curves[1].deriv = Eigen::VectorXd::Zero(G);
    const FunctionalMatrix fm = assemble_functional_matrix(curves, 0, quad);
    max_err = std::max(max_err, std::abs(fm.b[0] - 0.5));
    max_err = std::max(max_err, std::abs(fm.b[1] - 1.0));
    max_err = std::max(max_err, std::abs(fm.Q(0, 0) - 5.0 / 18.0));
    max_err = std::max(max_err, std::abs(fm.Q(0, 1) - 0.5));
    max_err = std::max(max_err, std::abs(fm.Q(1, 1) - 1.0));
    report(max_err <= 1e-9, "quadrature-fixtures",
           "25 weighted monomial integrals + assembled 2-curve matrix, max err " +
               fmt(max_err, 3));
}

// 7. The forward integrator's global error is first order in the step.
void check_euler_order() {
    LinearSystem decay;
    decay.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
    decay.m0 = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd t1(1);
    t1 << 1.0;
    const double exact = std::exp(-1.0);
    const double steps[3] = {1e-2, 5e-3, 2.5e-3};
    double err[3];
    for (int i = 0; i < 3; ++i)
        err[i] = std::abs(euler_solve(decay, steps[i], t1)(0, 0) - exact);
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    const bool ok = r1 >= 1.7 && r1 <= 2.3 && r2 >= 1.7 && r2 <= 2.3;
    report(ok, "euler-order",
           "error ratios per halving: " + fmt(r1) + ", " + fmt(r2));
}

// 8. The assembled functional matrix concentrates on its analytic limit as
// the sample grows (median over replicates of the max-entry error).
void check_functional_consistency() {
    const QuadratureGrid quad(201);
    Eigen::MatrixXd truth(2, 3);
    truth << 0.5, 5.0 / 18.0, 1.0 / 6.0, 5.0 / 18.0, 1.0 / 6.0, 7.0 / 66.0;

    double medians[2] = {0, 0};
    const int ns[2] = {100, 400};
    for (int which = 0; which < 2; ++which) {
        const int n = ns[which];
        SmootherConfig cfg;
        cfg.bandwidth = std::pow(static_cast<double>(n), -0.2);
        std::vector<double> errs;
        for (int r = 0; r < 20; ++r) {
            Rng rng = Rng::substream(2026, static_cast<std::uint64_t>(n) * 100 +
                                               static_cast<std::uint64_t>(r));
            Eigen::VectorXd times(n), y1(n), y2(n);
            for (int i = 0; i < n; ++i) {
                times[i] = i / (n - 1.0);
                y1[i] = times[i] + rng.normal(0.0, 0.1);
                y2[i] = times[i] * times[i] + rng.normal(0.0, 0.1);
            }
            std::vector<SmoothedCurve> curves;
            curves.push_back(smooth_curve(times, y1, quad.points, cfg));
            curves.push_back(smooth_curve(times, y2, quad.points, cfg));
            const FunctionalMatrix fm =
                assemble_functional_matrix(curves, 0, quad);
            errs.push_back((fm.as_matrix() - truth).cwiseAbs().maxCoeff());
        }
        std::sort(errs.begin(), errs.end());
        medians[which] = 0.5 * (errs[9] + errs[10]);
    }
    report(medians[1] < medians[0], "functional-consistency",
           "median max-entry error " + fmt(medians[0]) + " (n=100) -> " +
               fmt(medians[1]) + " (n=400), h = n^(-1/5)");
}

// 9. Edge-recovery bookkeeping reproduces hand-counted rates on a
// network-sized confusion fixture.
void check_network_counts() {
    std::vector<bool> ref(80, false), est(80, false);
    for (int i = 0; i < 18; ++i) ref[static_cast<size_t>(i)] = true;
    for (int i = 0; i < 15; ++i) est[static_cast<size_t>(i)] = true;
    for (int i = 40; i < 53; ++i) est[static_cast<size_t>(i)] = true;
    const SelectionStats s = selection_stats(est, ref);
    const bool ok = s.ppv.has_value() && s.sensitivity.has_value() &&
                    std::abs(*s.ppv - 15.0 / 28.0) < 1e-15 &&
                    std::abs(*s.sensitivity - 15.0 / 18.0) < 1e-15 &&
                    std::abs(*s.ppv - 0.536) < 5e-4 &&
                    std::abs(*s.sensitivity - 0.833) < 5e-4;
    report(ok, "network-counts",
           "28 calls vs 18 reference edges, overlap 15: ppv = " +
               fmt(s.ppv.value_or(-1)) + ", sensitivity = " +
               fmt(s.sensitivity.value_or(-1)));
}

// 10. Coordinate descent always descends and lands on a stationary point.
void check_solver_invariants() {
    oracle::TestRand rnd(99);
    int bad = 0;
    double worst_station = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const int p = 2 + rep % 9;
        Eigen::MatrixXd B(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) B(i, j) = rnd.unif(-1.0, 1.0);
        const double ridge = rnd.unif(0.05, 0.3);
        FunctionalMatrix fm;
        fm.Q = B.transpose() * B / p +
               ridge * Eigen::MatrixXd::Identity(p, p);
        fm.b = Eigen::VectorXd(p);
        for (int i = 0; i < p; ++i) fm.b[i] = rnd.unif(-2.0, 2.0);

        ScadParams params;
        params.lambda = rnd.unif(0.02, 0.8);
        FitOptions opts;
        const SparseFit fit = fit_scad(fm, params, opts);

        bool ok = fit.converged;
        for (size_t k = 1; k < fit.objective_trace.size(); ++k)
            ok = ok && std::isfinite(fit.objective_trace[k]) &&
                 fit.objective_trace[k] <=
                     fit.objective_trace[k - 1] + 1e-10;

        const Eigen::VectorXd grad = 2.0 * (fm.Q * fit.beta - fm.b);
        for (int j = 0; j < p; ++j) {
            const double slack = 10.0 * opts.tol * fm.Q(j, j);
            if (fit.beta[j] != 0.0) {
                const double g =
                    grad[j] + scad_derivative(std::abs(fit.beta[j]), params) *
                                  (fit.beta[j] > 0 ? 1.0 : -1.0);
                worst_station = std::max(worst_station, std::abs(g) - slack);
                ok = ok && std::abs(g) < slack;
            } else {
                worst_station =
                    std::max(worst_station, std::abs(grad[j]) - params.lambda - slack);
                ok = ok && std::abs(grad[j]) <= params.lambda + slack;
            }
        }
        ok = ok && support_of(fit.beta) == fit.support;
        if (!ok) ++bad;
    }
    report(bad == 0, "solver-invariants",
           "200 random instances, p in [2, 10]: " + std::to_string(bad) +
               " violations, worst stationarity slack " +
               fmt(worst_station, 3));
}

}  // namespace

int main() {
    std::cout << "sparseode acceptance checks (library " << kVersion << ")\n";
    const auto t0 = Clock::now();
    check_benchmark_ordering();
    check_support_trend();
    check_noiseless_recovery();
    check_threshold_oracle();
    check_local_poly_exactness();
    check_quadrature_fixtures();
    check_euler_order();
    check_functional_consistency();
    check_network_counts();
    check_solver_invariants();
    std::cout << (g_failures == 0 ? "ALL CHECKS PASSED" : "FAILURES: ")
              << (g_failures == 0 ? "" : std::to_string(g_failures)) << " ("
              << fmt(seconds_since(t0), 3) << " s total)\n";
    return g_failures == 0 ? 0 : 1;
}
