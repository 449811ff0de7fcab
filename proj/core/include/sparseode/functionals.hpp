#pragma once

#include <Eigen/Core>
#include <vector>

#include "sparseode/errors.hpp"
#include "sparseode/smoother.hpp"

namespace sparseode {

// w(x) = 140 x^3 (1-x)^3: unit mass on [0,1], vanishing with its first two
// derivatives at both endpoints.
double weight_eval(double x);

// Equispaced composite Simpson rule on [0, 1] with an odd number of points.
// weights hold the plain Simpson coefficients (they sum to the interval
// length); the w factor is applied by inner_product.
struct QuadratureGrid {
    explicit QuadratureGrid(int points = 201);

    Eigen::VectorXd points;
    Eigen::VectorXd weights;

    int size() const { return static_cast<int>(points.size()); }
};

// Approximates integral of f*g*w over [0,1] from samples on quad.points.
//
// Simpson's error on f*g*w is dominated by the Euler-Maclaurin boundary term
// (h^4/180)*(q'''(1) - q'''(0)), q = f*g*w. Because w, w', w'' vanish at both
// endpoints, q''' there reduces to w'''*f*g with w'''(0) = 840 = -w'''(1),
// so the term is known exactly and is added back:
//     result = simpson_sum + (14 h^4 / 3) * (f(0)g(0) + f(1)g(1)).
// The correction is a nonnegative rank-2 form, so Gram matrices built from
// this inner product stay positive semidefinite; residual error is O(h^6)
// (about 1e-12 at the default 201 points).
double inner_product(const Eigen::VectorXd& f,
                     const Eigen::VectorXd& g,
                     const QuadratureGrid& quad);

// M-hat = [b, Q] for one target equation.
struct FunctionalMatrix {
    int target = 0;      // 0-based column index of the equation being fit
    Eigen::VectorXd b;   // b[i]    = integral m_target' m_i w
    Eigen::MatrixXd Q;   // Q(i,j)  = integral m_i m_j w

    int p() const { return static_cast<int>(b.size()); }
    Eigen::MatrixXd as_matrix() const;  // p x (p+1), [b, Q]
};

// All curves must live on quad.points (GridMismatch otherwise). Q is computed
// once per unordered pair and mirrored, so it is symmetric bitwise.
FunctionalMatrix assemble_functional_matrix(const std::vector<SmoothedCurve>& curves,
                                            int target,
                                            const QuadratureGrid& quad);

// Half-vectorization of C = [b, Q] (p x (p+1), Q symmetric within tol):
// b in full, then the lower triangle of Q (diagonal included) column by
// column. Length p(p+3)/2.
Eigen::VectorXd vech_structured(const Eigen::MatrixXd& C, double tol = 1e-12);

// Binary Phi_p with vec(C) = Phi_p * vech_structured(C), vec column-major.
// Shape p(p+1) x p(p+3)/2, exactly one 1 per row.
Eigen::MatrixXd duplication_matrix(int p);

}  // namespace sparseode
