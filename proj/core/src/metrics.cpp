#include "sparseode/metrics.hpp"

#include <cmath>
#include <string>

namespace sparseode {

AmseResult amse(const std::vector<Eigen::VectorXd>& estimates,
                const Eigen::VectorXd& truth, const std::vector<int>& support) {
    if (estimates.empty()) throw ValidationError("no replicates");
    if (support.empty()) throw EmptySupport("support is empty");
    for (int j : support)
        if (j < 0 || j >= truth.size())
            throw ValidationError("support index " + std::to_string(j) +
                                  " out of range");

    const double R = static_cast<double>(estimates.size());
    std::vector<double> per_rep;
    per_rep.reserve(estimates.size());
    for (const Eigen::VectorXd& est : estimates) {
        if (est.size() != truth.size())
            throw LengthMismatch("estimate length " + std::to_string(est.size()) +
                                 " vs truth length " + std::to_string(truth.size()));
        double sq = 0.0;
        for (int j : support) {
            const double d = est[j] - truth[j];
            sq += d * d;
        }
        per_rep.push_back(sq / static_cast<double>(support.size()));
    }

    AmseResult out;
    for (double v : per_rep) out.mean += v;
    out.mean /= R;
    if (per_rep.size() >= 2) {
        double ss = 0.0;
        for (double v : per_rep) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (R - 1.0)) / std::sqrt(R);
    }
    return out;
}

SelectionStats selection_stats(const std::vector<bool>& estimated,
                               const std::vector<bool>& reference) {
    if (estimated.size() != reference.size())
        throw LengthMismatch("estimated has " + std::to_string(estimated.size()) +
                             " entries, reference has " +
                             std::to_string(reference.size()));
    SelectionStats s;
    for (size_t i = 0; i < estimated.size(); ++i) {
        if (estimated[i] && reference[i])
            ++s.true_positive;
        else if (estimated[i] && !reference[i])
            ++s.false_positive;
        else if (!estimated[i] && reference[i])
            ++s.false_negative;
        else
            ++s.true_negative;
    }
    if (s.true_positive + s.false_positive > 0)
        s.ppv = static_cast<double>(s.true_positive) /
                static_cast<double>(s.true_positive + s.false_positive);
    if (s.true_positive + s.false_negative > 0)
        s.sensitivity = static_cast<double>(s.true_positive) /
                        static_cast<double>(s.true_positive + s.false_negative);
    return s;
}

SelectionStats selection_stats(const Eigen::MatrixXd& estimated,
                               const Eigen::MatrixXd& reference, double tol) {
    if (estimated.rows() != reference.rows() || estimated.cols() != reference.cols())
        throw ShapeMismatch("matrix shapes differ");
    std::vector<bool> est, ref;
    est.reserve(static_cast<size_t>(estimated.size()));
    ref.reserve(static_cast<size_t>(reference.size()));
    for (Eigen::Index c = 0; c < estimated.cols(); ++c)
        for (Eigen::Index r = 0; r < estimated.rows(); ++r) {
            est.push_back(std::abs(estimated(r, c)) > tol);
            ref.push_back(std::abs(reference(r, c)) > tol);
        }
    return selection_stats(est, ref);
}

int nonzero_count(const Eigen::VectorXd& beta, double tol) {
    int count = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (std::abs(beta[j]) > tol) ++count;
    return count;
}

std::vector<int> support_of(const Eigen::VectorXd& beta, double tol) {
    std::vector<int> sup;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (std::abs(beta[j]) > tol) sup.push_back(static_cast<int>(j));
    return sup;
}

}  // namespace sparseode
