#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparseode/pipeline.hpp"
#include "sparseode/rng.hpp"
#include "sparseode/time_series.hpp"

namespace sparseode {

// m'(t) = A m(t), m(0) = m0.
struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd m0;

    int p() const { return static_cast<int>(A.rows()); }
};

// Block-diagonal A of 2x2 blocks [[a, b], [-b, a]] with a ~ U(-4, 0) and
// b ~ U(-10, 10); m0 entries ~ U(0, 1). Draw order is fixed (a_i, b_i per
// block, then m0), so output is a deterministic function of the rng state.
LinearSystem make_block_system(int blocks, Rng& rng);

// p = 2 * floor(sqrt(n)) variables.
LinearSystem generate_system(int n, Rng& rng);

// Forward Euler from t = 0 with the given step; returns states at the
// requested times (each mapped to the nearest completed step not past it).
// NonFinite if the state stops being finite, naming the step.
Eigen::MatrixXd euler_solve(const LinearSystem& sys, double step,
                            const Eigen::VectorXd& eval_times);

// Largest step <= requested such that 1/n is an integer multiple of it, so
// observation times land exactly on Euler steps.
double aligned_euler_step(int n, double requested);

// Adds iid N(0, sigma^2) noise to every entry (row-major draw order).
TimeSeries observe(const Eigen::MatrixXd& trajectories,
                   const Eigen::VectorXd& eval_times, double sigma, Rng& rng);

struct SimConfig {
    int n = 100;
    double sigma = 0.1;
    std::uint64_t seed = 1;
    double euler_step = 1e-4;
    int replicates = 100;

    void validate() const;  // n >= 10, sigma >= 0, 0 < euler_step <= 1/n
};

enum class EstimatorKind { Scad = 0, Ols, Oracle, TsScad, TsOracle };
inline constexpr std::array<const char*, 5> kEstimatorNames = {
    "SCAD", "OLS", "ORACLE", "TS-SCAD", "TS-ORACLE"};

struct EstimatorOutcome {
    bool ok = false;    // this estimator produced a fit on this replicate
    std::string error;  // why not, when ok is false
    Eigen::VectorXd beta;
    int nonzeros = 0;
    bool support_exact = false;
    std::optional<double> ppv;
    std::optional<double> sensitivity;
    double sq_err_mean = 0.0;  // mean squared error over the true support
};

// ok covers the shared stage (system, trajectories, smoothing, functional
// assembly); estimators that fail on top of a healthy shared stage are
// flagged individually so one singular baseline cannot void the replicate.
struct ReplicateOutcome {
    std::uint64_t stream_seed = 0;
    bool ok = false;
    std::string error;
    Eigen::VectorXd truth_row;  // target-row coefficients on the rescaled clock
    std::vector<int> truth_support;
    double bandwidth_target = 0.0;  // h chosen for the target column
    double lambda_scad = 0.0;
    double lambda_ts = 0.0;
    std::array<EstimatorOutcome, 5> estimators;
};

struct EstimatorAggregate {
    int count = 0;  // replicates where this estimator produced a fit
    double amse_mean = 0.0;
    double amse_se = 0.0;
    double avg_nonzero = 0.0;
    double support_match_rate = 0.0;
    std::optional<double> mean_ppv;
    std::optional<double> mean_sensitivity;
};

struct BenchmarkReport {
    SimConfig sim;
    std::vector<ReplicateOutcome> replicates;

    int completed() const;
    int failed() const;
    EstimatorAggregate aggregate(EstimatorKind kind) const;
};

// One replicate: generate the system from substream(seed, index), integrate,
// observe at {1/n, ..., 1}, rescale onto [0, 1], then run all five
// estimators on the first equation. Depends only on (sim, est, index).
ReplicateOutcome run_replicate(const SimConfig& sim, const EstimatorConfig& est,
                               std::uint64_t replicate_index);

// All replicates; per-replicate failures are recorded, never propagated.
BenchmarkReport run_benchmark(const SimConfig& sim, const EstimatorConfig& est);

}  // namespace sparseode
