#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "sparseode/errors.hpp"
#include "sparseode/functionals.hpp"
#include "sparseode/time_series.hpp"

namespace sparseode {

struct ScadParams {
    double lambda = 0.0;
    double a = 3.7;

    void validate() const;  // lambda >= 0, a > 2
};

struct SparseFit {
    Eigen::VectorXd beta;
    std::vector<int> support;
    // Quadratic part plus penalty at beta; the beta-free constant of the
    // residual form is omitted.
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
    ScadParams penalty;
    std::vector<double> objective_trace;  // objective after each full sweep
};

// p_lambda'(theta) = lambda { I(theta <= lambda)
//                           + (a lambda - theta)_+ / ((a-1) lambda) I(theta > lambda) }
double scad_derivative(double theta, const ScadParams& params);

// Its antiderivative with p_lambda(0) = 0: linear, then quadratic, then flat
// at (a+1) lambda^2 / 2.
double scad_penalty(double theta, const ScadParams& params);

// Global minimizer over beta of  q (beta - z)^2 / 2 + p_lambda(|beta|),
// q > 0. Evaluated in closed form per branch; the result has the sign of z
// (or is zero), and |z| > a*lambda passes through unshrunk.
double scad_threshold(double z, double q, const ScadParams& params);

struct FitOptions {
    double tol = 1e-8;
    int max_iter = 10000;
    // Starting point; defaults to the ridgeless LS solution when the
    // quadratic form is well conditioned, the zero vector otherwise.
    std::optional<Eigen::VectorXd> init;
};

// Cyclic coordinate descent on S(beta) = beta'Q beta - 2 b'beta + sum p(|beta_j|)
// with exact univariate minimization: z_j = (b_j - sum_{k != j} Q_jk beta_k)/Q_jj
// updated through scad_threshold(z_j, 2 Q_jj). Stops when the largest
// coordinate change in a sweep falls below tol, then runs one polishing sweep.
SparseFit fit_scad(const FunctionalMatrix& fm, const ScadParams& params,
                   const FitOptions& opts = {});

// Fits the penalized objective at every candidate penalty level, sweeping
// from the largest lambda down and warm-starting each descent from the
// previous solution (zero vector at the top). The warm path keeps the
// descent in the sparse basin that the largest penalties expose; a cold
// start at the unpenalized solution can strand it in a dense local minimum
// when Q is ill-conditioned, because the penalty is flat beyond a*lambda.
// Results are returned in the order of `lambdas` (any input order; the fit
// at a given lambda does not depend on how the candidates are arranged).
std::vector<SparseFit> fit_scad_path(const FunctionalMatrix& fm,
                                     const std::vector<double>& lambdas,
                                     const ScadParams& base = {},
                                     const FitOptions& opts = {});

// Unpenalized solve of Q beta = b via LDLT; support lists all coordinates.
// IllConditioned when cond(Q) >= 1e12 or Q is not positive definite.
SparseFit fit_ols(const FunctionalMatrix& fm);

// Unpenalized solve restricted to `support`; zeros elsewhere.
SparseFit fit_oracle(const FunctionalMatrix& fm, const std::vector<int>& support);

// Finite-difference baseline: regress (Y[i][target] - Y[i-1][target])/(t_i - t_{i-1})
// on the covariate rows Y[i], i = 2..n, with the same SCAD machinery on the
// Gram form X'X, X'r.
SparseFit fit_ts(const TimeSeries& ts, int target, const ScadParams& params,
                 const FitOptions& opts = {});

// Finite-difference baseline restricted to a known support, no penalty.
SparseFit fit_ts_oracle(const TimeSeries& ts, int target,
                        const std::vector<int>& support);

// Gram form (X'X, X'r) of the finite-difference regression behind fit_ts,
// e.g. to build a lambda grid for it.
FunctionalMatrix difference_gram(const TimeSeries& ts, int target);

// Smallest lambda for which one descent sweep from the zero vector leaves
// every coordinate at zero (per-coordinate bisection on scad_threshold).
double lambda_zero_all(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                       double a = 3.7);

// Pathwise grid: `count` log-spaced values from min_ratio*lambda_max up to
// lambda_max = lambda_zero_all(Q, b). Ascending. {0} when b = 0.
std::vector<double> default_lambda_grid(const Eigen::MatrixXd& Q,
                                        const Eigen::VectorXd& b,
                                        double a = 3.7,
                                        int count = 20,
                                        double min_ratio = 1e-4);

// One fold of the second-step cross-validation: functionals assembled from a
// training subset, plus the training-smoothed values of every column at an
// arbitrary time (for held-out prediction).
struct FoldModel {
    FunctionalMatrix fm;
    std::function<Eigen::VectorXd(double)> value_row;
};
using FoldModelBuilder = std::function<FoldModel(const std::vector<int>& train_indices)>;

// K-fold selection of lambda for the two-step estimator. Folds are assigned
// by index modulo `folds` over the time-sorted observations. Validation loss
// for a fold sums, over disjoint held-out pairs i < j spanning at least a
// tenth of the observation span each,
//     ( (Y[j][target]-Y[i][target])/(t_j - t_i)
//       - beta' (m_train(t_i)+m_train(t_j))/2 )^2
// a finite-difference derivative proxy built from held-out data only, scored
// against the fitted average gradient over the window (the difference
// quotient is the mean derivative, which the dynamics tie to the mean state).
// Ties break toward the larger lambda.
double cv_lambda(const FoldModelBuilder& builder,
                 const TimeSeries& ts,
                 int target,
                 const std::vector<double>& candidates,
                 int folds,
                 const ScadParams& base = {},
                 const FitOptions& opts = {});

// Same scheme for the finite-difference estimator: folds over the n-1
// difference rows, training Gram refit per fold, held-out squared residuals.
double cv_lambda_ts(const TimeSeries& ts,
                    int target,
                    const std::vector<double>& candidates,
                    int folds,
                    const ScadParams& base = {},
                    const FitOptions& opts = {});

namespace detail {

// Shared descent core on an explicit quadratic form.
SparseFit scad_descent(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                       const ScadParams& params, const FitOptions& opts);

// lambda_max / lambda_min of a symmetric matrix; +inf when lambda_min <= 0.
double condition_estimate(const Eigen::MatrixXd& Q);

// LDLT solve guarded by condition_estimate < limit (IllConditioned otherwise).
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                          double cond_limit = 1e12);

}  // namespace detail

}  // namespace sparseode
