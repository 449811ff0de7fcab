#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sparseode/errors.hpp"

namespace sparseode {

// Kernels supported: continuous symmetric densities on [-1, 1].
enum class Kernel { Epanechnikov, Biweight, Triweight };

//! K(u); identically zero outside [-1, 1].
double kernel_eval(double u, Kernel kernel);

Kernel kernel_from_name(const std::string& name);  // throws ConfigError
std::string kernel_name(Kernel kernel);

struct SmootherConfig {
    double bandwidth = 0.1;
    int order = 3;  // local polynomial degree s
    Kernel kernel = Kernel::Epanechnikov;

    void validate() const;  // bandwidth > 0, order >= 1
};

// Estimated trajectory: value = m-hat and deriv = m-hat' on an evaluation
// grid. deriv comes from the second local coefficient, not from numerically
// differentiating value.
struct SmoothedCurve {
    Eigen::VectorXd grid;
    Eigen::VectorXd value;
    Eigen::VectorXd deriv;
};

// Kernel-weighted least squares fit of a degree-s polynomial in (t - x0)
// around x0. Returns the s+1 local coefficients alpha; the d-th derivative
// estimate at x0 is d! * alpha[d].
//
// Needs at least s+1 observations with strictly positive kernel weight
// (InsufficientLocalData otherwise). The normal matrix is checked for
// conditioning; a near-singular design gets one ridge-jittered retry before
// SingularLocalDesign is thrown.
Eigen::VectorXd local_poly_fit(const Eigen::VectorXd& times,
                               const Eigen::VectorXd& values,
                               double x0,
                               const SmootherConfig& cfg);

// local_poly_fit at every grid point; errors are rethrown with the failing
// grid point named. An empty grid gives empty outputs.
SmoothedCurve smooth_curve(const Eigen::VectorXd& times,
                           const Eigen::VectorXd& values,
                           const Eigen::VectorXd& grid,
                           const SmootherConfig& cfg);

// K-fold cross-validation of the bandwidth. Folds are assigned by index
// modulo `folds` over the time-sorted observations; the score of a candidate
// is the mean squared error of held-out value predictions. Candidates that
// hit InsufficientLocalData or SingularLocalDesign on any fold are skipped;
// AllCandidatesFailed if none survive. Ties break toward the smallest
// bandwidth (scores at exact-interpolation level count as ties).
double cv_bandwidth(const Eigen::VectorXd& times,
                    const Eigen::VectorXd& values,
                    const std::vector<double>& candidates,
                    int folds,
                    const SmootherConfig& base = {});

// Geometric candidate grid used when no bandwidths are configured:
// 7 points from max(0.03, 8/n) up to 0.5.
std::vector<double> default_bandwidth_grid(int n);

}  // namespace sparseode
