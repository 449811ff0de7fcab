#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "sparseode/errors.hpp"

namespace sparseode {

struct AmseResult {
    double mean = 0.0;
    double se = 0.0;  // standard error across replicates; 0 for one replicate
};

// Mean over replicates of the mean squared coefficient error over `support`.
AmseResult amse(const std::vector<Eigen::VectorXd>& estimates,
                const Eigen::VectorXd& truth,
                const std::vector<int>& support);

struct SelectionStats {
    long true_positive = 0;
    long false_positive = 0;
    long false_negative = 0;
    long true_negative = 0;
    std::optional<double> ppv;          // TP / (TP + FP); empty when no positives called
    std::optional<double> sensitivity;  // TP / (TP + FN); empty when no reference edges
};

SelectionStats selection_stats(const std::vector<bool>& estimated,
                               const std::vector<bool>& reference);

// Entries with |value| > tol count as edges.
SelectionStats selection_stats(const Eigen::MatrixXd& estimated,
                               const Eigen::MatrixXd& reference,
                               double tol = 0.0);

int nonzero_count(const Eigen::VectorXd& beta, double tol = 0.0);
std::vector<int> support_of(const Eigen::VectorXd& beta, double tol = 0.0);

}  // namespace sparseode
