#include "sparseode/smoother.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sparseode {

double kernel_eval(double u, Kernel kernel) {
    const double t = 1.0 - u * u;
    if (t <= 0.0) return 0.0;
    switch (kernel) {
        case Kernel::Epanechnikov: return 0.75 * t;
        case Kernel::Biweight: return (15.0 / 16.0) * t * t;
        case Kernel::Triweight: return (35.0 / 32.0) * t * t * t;
    }
    return 0.0;
}

Kernel kernel_from_name(const std::string& name) {
    if (name == "epanechnikov") return Kernel::Epanechnikov;
    if (name == "biweight") return Kernel::Biweight;
    if (name == "triweight") return Kernel::Triweight;
    throw ConfigError("unknown kernel '" + name +
                      "' (expected epanechnikov, biweight, or triweight)");
}

std::string kernel_name(Kernel kernel) {
    switch (kernel) {
        case Kernel::Epanechnikov: return "epanechnikov";
        case Kernel::Biweight: return "biweight";
        case Kernel::Triweight: return "triweight";
    }
    return "?";
}

void SmootherConfig::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw ValidationError("bandwidth must be positive");
    if (order < 1) throw ValidationError("polynomial order must be at least 1");
}

Eigen::VectorXd local_poly_fit(const Eigen::VectorXd& times,
                               const Eigen::VectorXd& values,
                               double x0,
                               const SmootherConfig& cfg) {
    cfg.validate();
    if (times.size() != values.size())
        throw LengthMismatch("times and values differ in length");

    const int n = static_cast<int>(times.size());
    const int k = cfg.order + 1;
    const double h = cfg.bandwidth;

    std::vector<int> idx;
    idx.reserve(16);
    for (int i = 0; i < n; ++i)
        if (kernel_eval((times[i] - x0) / h, cfg.kernel) > 0.0) idx.push_back(i);

    const int m = static_cast<int>(idx.size());
    if (m < k)
        throw InsufficientLocalData(
            "only " + std::to_string(m) + " observations within bandwidth " +
            std::to_string(h) + " of x0=" + std::to_string(x0) + ", need " +
            std::to_string(k));

    // Weighted design in powers of (t - x0), plus the normal matrix used for
    // the conditioning check.
    Eigen::MatrixXd design(m, k);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) {
        const int i = idx[r];
        const double dt = times[i] - x0;
        const double sw = std::sqrt(kernel_eval(dt / h, cfg.kernel));
        double pw = sw;
        for (int c = 0; c < k; ++c) {
            design(r, c) = pw;
            pw *= dt;
        }
        rhs[r] = sw * values[i];
    }
    const Eigen::MatrixXd normal = design.transpose() * design;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    constexpr double kCondLimit = 1e12;

    if (lo > 0.0 && hi / lo < kCondLimit)
        return design.colPivHouseholderQr().solve(rhs);

    // One ridge-jittered retry on the normal equations.
    const double jitter = 1e-10 * normal.trace() / k;
    Eigen::MatrixXd damped = normal;
    damped.diagonal().array() += jitter;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(damped, Eigen::EigenvaluesOnly);
    const double lo2 = eig2.eigenvalues().minCoeff();
    const double hi2 = eig2.eigenvalues().maxCoeff();
    if (!(lo2 > 0.0) || hi2 / lo2 >= kCondLimit)
        throw SingularLocalDesign("local design singular at x0=" + std::to_string(x0) +
                                  " (condition ~" +
                                  std::to_string(lo2 > 0.0 ? hi2 / lo2
                                                           : std::numeric_limits<double>::infinity()) +
                                  " after ridge jitter)");
    return damped.ldlt().solve(design.transpose() * rhs);
}

SmoothedCurve smooth_curve(const Eigen::VectorXd& times,
                           const Eigen::VectorXd& values,
                           const Eigen::VectorXd& grid,
                           const SmootherConfig& cfg) {
    cfg.validate();
    const int g = static_cast<int>(grid.size());
    SmoothedCurve out;
    out.grid = grid;
    out.value.resize(g);
    out.deriv.resize(g);
    for (int i = 0; i < g; ++i) {
        if (grid[i] < 0.0 || grid[i] > 1.0)
            throw DomainError("grid point " + std::to_string(grid[i]) + " outside [0, 1]");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw ValidationError("grid not strictly increasing");
        try {
            const Eigen::VectorXd alpha = local_poly_fit(times, values, grid[i], cfg);
            out.value[i] = alpha[0];
            out.deriv[i] = alpha[1];
        } catch (const InsufficientLocalData& e) {
            throw InsufficientLocalData(std::string(e.what()) + " (grid point " +
                                        std::to_string(grid[i]) + ")");
        } catch (const SingularLocalDesign& e) {
            throw SingularLocalDesign(std::string(e.what()) + " (grid point " +
                                      std::to_string(grid[i]) + ")");
        }
    }
    return out;
}

std::vector<double> default_bandwidth_grid(int n) {
    if (n < 2) throw ValidationError("need at least two observations");
    // The floor keeps roughly eight observations inside each window so the
    // order-3 local fit stays determined; the ceiling stops at half the
    // rescaled span, past which the window covers everything and the fit
    // degenerates into one global cubic. Log spacing concentrates candidates
    // at the small end, where estimate quality changes fastest.
    const double lo = std::max(0.03, 8.0 / n);
    const double hi = 0.5;
    if (lo >= hi) return {lo};
    const int count = 7;
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return grid;
}

double cv_bandwidth(const Eigen::VectorXd& times,
                    const Eigen::VectorXd& values,
                    const std::vector<double>& candidates,
                    int folds,
                    const SmootherConfig& base) {
    if (candidates.empty()) throw ValidationError("no bandwidth candidates");
    if (folds < 2) throw ValidationError("need at least two folds");
    if (times.size() != values.size())
        throw LengthMismatch("times and values differ in length");
    const int n = static_cast<int>(times.size());

    // Exact-interpolation plateau: scores this far below the data scale are
    // indistinguishable, and the smallest-bandwidth tie rule should decide.
    const double rms = std::sqrt(values.squaredNorm() / std::max(1, n));
    const double floor = (1e-10 * rms) * (1e-10 * rms);

    double best_h = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    bool any = false;

    std::vector<double> ordered = candidates;
    std::sort(ordered.begin(), ordered.end());  // ties then break toward smallest h

    for (double h : ordered) {
        SmootherConfig cfg = base;
        cfg.bandwidth = h;
        cfg.validate();

        double total = 0.0;
        long count = 0;
        bool failed = false;
        for (int f = 0; f < folds && !failed; ++f) {
            std::vector<int> train;
            train.reserve(n);
            for (int i = 0; i < n; ++i)
                if (i % folds != f) train.push_back(i);
            Eigen::VectorXd tr_t(train.size()), tr_y(train.size());
            for (size_t r = 0; r < train.size(); ++r) {
                tr_t[r] = times[train[r]];
                tr_y[r] = values[train[r]];
            }
            for (int i = f; i < n; i += folds) {
                try {
                    const Eigen::VectorXd alpha = local_poly_fit(tr_t, tr_y, times[i], cfg);
                    const double e = values[i] - alpha[0];
                    total += e * e;
                    ++count;
                } catch (const InsufficientLocalData&) {
                    failed = true;
                    break;
                } catch (const SingularLocalDesign&) {
                    failed = true;
                    break;
                }
            }
        }
        if (failed || count == 0) continue;

        double score = total / static_cast<double>(count);
        if (score < floor) score = 0.0;
        any = true;
        if (score < best_score) {  // strict: earlier (smaller) h wins ties
            best_score = score;
            best_h = h;
        }
    }
    if (!any)
        throw AllCandidatesFailed("every bandwidth candidate failed on some fold");
    return best_h;
}

}  // namespace sparseode
