#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "sparseode/functionals.hpp"
#include "sparseode/metrics.hpp"
#include "sparseode/smoother.hpp"
#include "sparseode/sparse_solver.hpp"
#include "sparseode/time_series.hpp"

namespace sparseode {

// Knobs of the two-step fit, shared by the command line tool and the
// benchmark harness.
struct EstimatorConfig {
    std::vector<double> bandwidths;  // empty: default_bandwidth_grid(n)
    int bandwidth_folds = 5;
    std::vector<double> lambdas;     // empty: pathwise default_lambda_grid
    int lambda_count = 20;
    double lambda_min_ratio = 1e-4;
    int lambda_folds = 5;
    int quadrature_points = 201;
    double scad_a = 3.7;
    double tol = 1e-8;
    int max_iter = 10000;
    int order = 3;
    Kernel kernel = Kernel::Epanechnikov;

    void validate() const;  // throws ConfigError
    SmootherConfig smoother(double bandwidth) const;
};

// Every column smoothed on the quadrature grid with its own cross-validated
// bandwidth.
struct SmoothedPanel {
    std::vector<SmoothedCurve> curves;
    std::vector<double> bandwidths;
    QuadratureGrid quad;

    SmoothedPanel() : quad(201) {}
};

SmoothedPanel smooth_panel(const TimeSeries& ts, const EstimatorConfig& cfg);

// Builder handed to cv_lambda: refits the smoothing step on the training
// subset (same per-column bandwidths) and assembles fold functionals.
FoldModelBuilder make_fold_model_builder(const TimeSeries& ts,
                                         const std::vector<double>& bandwidths,
                                         const QuadratureGrid& quad,
                                         int target,
                                         const EstimatorConfig& cfg);

struct RowFit {
    Eigen::VectorXd beta;
    std::vector<int> support;
    double lambda = 0.0;
};

// lambda CV + SCAD fit for one target equation of the panel.
RowFit fit_row(const TimeSeries& ts, const SmoothedPanel& panel, int target,
               const EstimatorConfig& cfg);

// Full network estimate, in rescaled-time units.
struct AdjacencyOutput {
    Eigen::MatrixXd A;                       // p x p
    std::vector<std::vector<int>> supports;  // per row
    std::vector<double> lambdas;             // per row
    std::vector<double> bandwidths;          // per column
    std::vector<std::string> names;
    double t_min = 0.0;                      // affine time map recorded at ingestion
    double t_max = 1.0;
};

AdjacencyOutput fit_network(const TimeSeries& ts, const EstimatorConfig& cfg);

// Reference comparison restricted to the columns named as sources in the
// reference edge list (rows are all series columns, diagonal included).
struct NetworkComparison {
    SelectionStats stats;
    std::vector<std::string> sources;  // grid column order
    std::string table;                 // rendered grid
};

NetworkComparison compare_network(
    const AdjacencyOutput& adj,
    const std::vector<std::pair<std::string, std::string>>& reference_edges);

}  // namespace sparseode
