#include "sparseode/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace sparseode {

LinearSystem make_block_system(int blocks, Rng& rng) {
    if (blocks < 1) throw ValidationError("need at least one block");
    const int p = 2 * blocks;
    LinearSystem sys;
    sys.A = Eigen::MatrixXd::Zero(p, p);
    for (int k = 0; k < blocks; ++k) {
        const double a = rng.uniform(-4.0, 0.0);
        const double b = rng.uniform(-10.0, 10.0);
        const int i = 2 * k;
        sys.A(i, i) = a;
        sys.A(i, i + 1) = b;
        sys.A(i + 1, i) = -b;
        sys.A(i + 1, i + 1) = a;
    }
    sys.m0.resize(p);
    for (int j = 0; j < p; ++j) sys.m0[j] = rng.uniform(0.0, 1.0);
    return sys;
}

LinearSystem generate_system(int n, Rng& rng) {
    if (n < 1) throw ValidationError("n must be positive");
    const int blocks = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
    return make_block_system(blocks, rng);
}

double aligned_euler_step(int n, double requested) {
    if (n < 1) throw ValidationError("n must be positive");
    if (!(requested > 0.0) || !std::isfinite(requested))
        throw ValidationError("step must be positive");
    const double substeps = std::ceil(1.0 / (static_cast<double>(n) * requested) - 1e-12);
    const double m = std::max(substeps, 1.0);
    return 1.0 / (static_cast<double>(n) * m);
}

Eigen::MatrixXd euler_solve(const LinearSystem& sys, double step,
                            const Eigen::VectorXd& eval_times) {
    const int p = sys.p();
    if (sys.A.cols() != p) throw ShapeMismatch("coefficient matrix must be square");
    if (sys.m0.size() != p)
        throw ShapeMismatch("initial state length does not match matrix");
    if (!(step > 0.0) || !std::isfinite(step))
        throw ValidationError("step must be positive");

    const int nt = static_cast<int>(eval_times.size());
    std::vector<long> target(nt);
    long max_step = 0;
    for (int i = 0; i < nt; ++i) {
        const double t = eval_times[i];
        if (!(t >= 0.0) || !std::isfinite(t))
            throw ValidationError("evaluation times must be nonnegative");
        const double q = t / step;
        const double r = std::round(q);
        // Times that land on a step boundary up to rounding take that step;
        // otherwise the last completed step before t.
        target[i] = std::abs(q - r) < 1e-6 ? static_cast<long>(r)
                                           : static_cast<long>(std::floor(q));
        max_step = std::max(max_step, target[i]);
    }

    Eigen::MatrixXd out(nt, p);
    Eigen::VectorXd state = sys.m0;
    long k = 0;
    for (int i = 0; i < nt; ++i)
        if (target[i] == 0) out.row(i) = state.transpose();
    while (k < max_step) {
        state += step * (sys.A * state);
        ++k;
        if (!state.allFinite())
            throw NonFinite("state non-finite at step " + std::to_string(k) +
                            " (t = " + std::to_string(k * step) + ")");
        for (int i = 0; i < nt; ++i)
            if (target[i] == k) out.row(i) = state.transpose();
    }
    return out;
}

TimeSeries observe(const Eigen::MatrixXd& trajectories,
                   const Eigen::VectorXd& eval_times, double sigma, Rng& rng) {
    if (trajectories.rows() != eval_times.size())
        throw ShapeMismatch("one trajectory row per evaluation time expected");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("sigma must be nonnegative");
    TimeSeries ts;
    ts.times = eval_times;
    ts.values = trajectories;
    for (Eigen::Index r = 0; r < ts.values.rows(); ++r)
        for (Eigen::Index c = 0; c < ts.values.cols(); ++c)
            ts.values(r, c) += rng.normal(0.0, sigma);
    return ts;
}

void SimConfig::validate() const {
    if (n < 10) throw ConfigError("n must be at least 10");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ConfigError("sigma must be nonnegative");
    if (!(euler_step > 0.0) || !(euler_step <= 1.0 / static_cast<double>(n)))
        throw ConfigError("euler_step must lie in (0, 1/n]");
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
}

int BenchmarkReport::completed() const {
    int c = 0;
    for (const ReplicateOutcome& r : replicates)
        if (r.ok) ++c;
    return c;
}

int BenchmarkReport::failed() const {
    return static_cast<int>(replicates.size()) - completed();
}

EstimatorAggregate BenchmarkReport::aggregate(EstimatorKind kind) const {
    const size_t e = static_cast<size_t>(kind);
    EstimatorAggregate agg;
    std::vector<double> sq;
    double nz = 0.0, match = 0.0, ppv_sum = 0.0, sens_sum = 0.0;
    int ppv_n = 0, sens_n = 0;
    for (const ReplicateOutcome& r : replicates) {
        if (!r.ok) continue;
        const EstimatorOutcome& out = r.estimators[e];
        if (!out.ok) continue;
        sq.push_back(out.sq_err_mean);
        nz += out.nonzeros;
        match += out.support_exact ? 1.0 : 0.0;
        if (out.ppv) {
            ppv_sum += *out.ppv;
            ++ppv_n;
        }
        if (out.sensitivity) {
            sens_sum += *out.sensitivity;
            ++sens_n;
        }
    }
    const double R = static_cast<double>(sq.size());
    agg.count = static_cast<int>(sq.size());
    if (sq.empty()) return agg;
    for (double v : sq) agg.amse_mean += v;
    agg.amse_mean /= R;
    if (sq.size() >= 2) {
        double ss = 0.0;
        for (double v : sq) ss += (v - agg.amse_mean) * (v - agg.amse_mean);
        agg.amse_se = std::sqrt(ss / (R - 1.0)) / std::sqrt(R);
    }
    agg.avg_nonzero = nz / R;
    agg.support_match_rate = match / R;
    if (ppv_n > 0) agg.mean_ppv = ppv_sum / ppv_n;
    if (sens_n > 0) agg.mean_sensitivity = sens_sum / sens_n;
    return agg;
}

namespace {

EstimatorOutcome score(const Eigen::VectorXd& beta, const Eigen::VectorXd& truth,
                       const std::vector<int>& truth_support) {
    EstimatorOutcome out;
    out.ok = true;
    out.beta = beta;
    out.nonzeros = nonzero_count(beta);
    const std::vector<int> sup = support_of(beta);
    out.support_exact = sup == truth_support;
    std::vector<bool> est_mask(beta.size(), false), ref_mask(beta.size(), false);
    for (int j : sup) est_mask[j] = true;
    for (int j : truth_support) ref_mask[j] = true;
    const SelectionStats stats = selection_stats(est_mask, ref_mask);
    out.ppv = stats.ppv;
    out.sensitivity = stats.sensitivity;
    out.sq_err_mean = amse({beta}, truth, truth_support).mean;
    return out;
}

}  // namespace

ReplicateOutcome run_replicate(const SimConfig& sim, const EstimatorConfig& est,
                               std::uint64_t replicate_index) {
    sim.validate();
    est.validate();
    ReplicateOutcome out;
    out.stream_seed = Rng::substream_seed(sim.seed, replicate_index);
    try {
        Rng rng(out.stream_seed);
        const LinearSystem sys = generate_system(sim.n, rng);
        const double step = aligned_euler_step(sim.n, sim.euler_step);
        Eigen::VectorXd times(sim.n);
        for (int i = 0; i < sim.n; ++i)
            times[i] = static_cast<double>(i + 1) / static_cast<double>(sim.n);
        const Eigen::MatrixXd traj = euler_solve(sys, step, times);
        const TimeSeries raw = observe(traj, times, sim.sigma, rng);
        const RescaledSeries resc = rescale_times(raw);

        constexpr int target = 0;
        out.truth_row = resc.duration() * sys.A.row(target).transpose();
        out.truth_support = support_of(out.truth_row);

        const SmoothedPanel panel = smooth_panel(resc.ts, est);
        out.bandwidth_target = panel.bandwidths[target];

        FitOptions opts;
        opts.tol = est.tol;
        opts.max_iter = est.max_iter;
        ScadParams base;
        base.a = est.scad_a;

        // Each estimator fails on its own: a singular unpenalized baseline
        // must not discard the replicate for the others.
        const auto attempt = [&out](EstimatorKind kind, auto&& make_beta) {
            EstimatorOutcome& slot = out.estimators[static_cast<size_t>(kind)];
            try {
                slot = score(make_beta(), out.truth_row, out.truth_support);
            } catch (const Error& e) {
                slot = EstimatorOutcome{};
                slot.error = e.what();
            }
        };

        attempt(EstimatorKind::Scad, [&] {
            RowFit row = fit_row(resc.ts, panel, target, est);
            out.lambda_scad = row.lambda;
            return row.beta;
        });

        const FunctionalMatrix fm =
            assemble_functional_matrix(panel.curves, target, panel.quad);
        attempt(EstimatorKind::Ols, [&] { return fit_ols(fm).beta; });
        attempt(EstimatorKind::Oracle,
                [&] { return fit_oracle(fm, out.truth_support).beta; });

        attempt(EstimatorKind::TsScad, [&] {
            const FunctionalMatrix ts_gram = difference_gram(resc.ts, target);
            const std::vector<double> ts_cands =
                est.lambdas.empty()
                    ? default_lambda_grid(ts_gram.Q, ts_gram.b, est.scad_a,
                                          est.lambda_count, est.lambda_min_ratio)
                    : est.lambdas;
            double lam_ts = ts_cands.front();
            if (ts_cands.size() > 1)
                lam_ts = cv_lambda_ts(resc.ts, target, ts_cands,
                                      est.lambda_folds, base, opts);
            out.lambda_ts = lam_ts;
            // Warm-started sweep from the largest candidate down to the
            // selected level, matching the path the cross-validation scored.
            std::vector<double> desc = ts_cands;
            std::sort(desc.begin(), desc.end(), std::greater<>());
            FitOptions warm = opts;
            warm.init = Eigen::VectorXd::Zero(resc.ts.p());
            SparseFit fit;
            for (double lam : desc) {
                ScadParams ts_params = base;
                ts_params.lambda = lam;
                fit = fit_ts(resc.ts, target, ts_params, warm);
                warm.init = fit.beta;
                if (lam == lam_ts) break;
            }
            return fit.beta;
        });
        attempt(EstimatorKind::TsOracle, [&] {
            return fit_ts_oracle(resc.ts, target, out.truth_support).beta;
        });
        out.ok = true;
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

BenchmarkReport run_benchmark(const SimConfig& sim, const EstimatorConfig& est) {
    sim.validate();
    est.validate();
    BenchmarkReport report;
    report.sim = sim;
    report.replicates.reserve(sim.replicates);
    for (int r = 0; r < sim.replicates; ++r)
        report.replicates.push_back(
            run_replicate(sim, est, static_cast<std::uint64_t>(r)));
    return report;
}

}  // namespace sparseode
