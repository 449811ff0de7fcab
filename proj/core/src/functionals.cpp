#include "sparseode/functionals.hpp"

#include <cmath>
#include <string>

namespace sparseode {

double weight_eval(double x) {
    if (x < 0.0 || x > 1.0)
        throw DomainError("weight argument " + std::to_string(x) + " outside [0, 1]");
    const double y = 1.0 - x;
    return 140.0 * x * x * x * y * y * y;
}

QuadratureGrid::QuadratureGrid(int n) {
    if (n < 3 || n % 2 == 0)
        throw ValidationError("quadrature grid needs an odd point count >= 3, got " +
                              std::to_string(n));
    points.resize(n);
    weights.resize(n);
    const double h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
        points[i] = static_cast<double>(i) * h;
        weights[i] = (i == 0 || i == n - 1) ? h / 3.0
                     : (i % 2 == 1)         ? 4.0 * h / 3.0
                                            : 2.0 * h / 3.0;
    }
    points[n - 1] = 1.0;
}

double inner_product(const Eigen::VectorXd& f,
                     const Eigen::VectorXd& g,
                     const QuadratureGrid& quad) {
    const int n = quad.size();
    if (f.size() != n || g.size() != n)
        throw LengthMismatch("inner_product needs length-" + std::to_string(n) +
                             " samples, got " + std::to_string(f.size()) + " and " +
                             std::to_string(g.size()));
    // f and g multiply each other first so the result is bitwise symmetric
    // in the two arguments.
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += (f[i] * g[i]) * (quad.weights[i] * weight_eval(quad.points[i]));
    // Euler-Maclaurin boundary term of Simpson on f*g*w; see the header.
    const double h = 1.0 / (n - 1);
    const double h2 = h * h;
    sum += (14.0 / 3.0) * h2 * h2 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
    return sum;
}

Eigen::MatrixXd FunctionalMatrix::as_matrix() const {
    Eigen::MatrixXd m(p(), p() + 1);
    m.col(0) = b;
    m.rightCols(p()) = Q;
    return m;
}

FunctionalMatrix assemble_functional_matrix(const std::vector<SmoothedCurve>& curves,
                                            int target,
                                            const QuadratureGrid& quad) {
    const int p = static_cast<int>(curves.size());
    if (p == 0) throw ValidationError("no curves");
    if (target < 0 || target >= p)
        throw ValidationError("target " + std::to_string(target) + " out of range for " +
                              std::to_string(p) + " curves");
    for (int i = 0; i < p; ++i) {
        const SmoothedCurve& c = curves[i];
        if (c.grid.size() != quad.size() || (c.grid - quad.points).cwiseAbs().maxCoeff() != 0.0)
            throw GridMismatch("curve " + std::to_string(i) +
                               " not sampled on the quadrature grid");
    }

    FunctionalMatrix fm;
    fm.target = target;
    fm.b.resize(p);
    fm.Q.resize(p, p);
    for (int i = 0; i < p; ++i)
        fm.b[i] = inner_product(curves[target].deriv, curves[i].value, quad);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            const double v = inner_product(curves[i].value, curves[j].value, quad);
            fm.Q(i, j) = v;
            fm.Q(j, i) = v;
        }
    return fm;
}

Eigen::VectorXd vech_structured(const Eigen::MatrixXd& C, double tol) {
    const int p = static_cast<int>(C.rows());
    if (C.cols() != p + 1)
        throw ShapeMismatch("expected a p x (p+1) matrix, got " + std::to_string(C.rows()) +
                            " x " + std::to_string(C.cols()));
    const auto Q = C.rightCols(p);
    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol)
        throw AsymmetryError("right block asymmetric by " + std::to_string(asym));

    Eigen::VectorXd v(p * (p + 3) / 2);
    int k = 0;
    for (int i = 0; i < p; ++i) v[k++] = C(i, 0);
    for (int c = 0; c < p; ++c)
        for (int r = c; r < p; ++r) v[k++] = Q(r, c);
    return v;
}

Eigen::MatrixXd duplication_matrix(int p) {
    if (p < 1) throw ValidationError("p must be at least 1");
    const int rows = p * (p + 1);
    const int cols = p * (p + 3) / 2;
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(rows, cols);

    // vech layout: b at [0, p), then column c of the lower triangle starting
    // at p + c*p - c*(c-1)/2.
    for (int i = 0; i < p; ++i) phi(i, i) = 1.0;  // the b column of C
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) {
            const int vec_idx = p + j * p + i;  // column-major position of Q(i, j)
            const int r = std::max(i, j);
            const int c = std::min(i, j);
            const int vech_idx = p + c * p - c * (c - 1) / 2 + (r - c);
            phi(vec_idx, vech_idx) = 1.0;
        }
    return phi;
}

}  // namespace sparseode
