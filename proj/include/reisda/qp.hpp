#pragma once

#include "reisda/matrix.hpp"

#include <vector>

namespace reisda {

// minimize 1/2 b'Qb - c'b   subject to  0 <= b_i <= box_upper
// and |mean(b) - sum_target| <= sum_slack.
//
// This is the constraint shape kernel mean matching needs: a box plus a
// slab on the mean of the weights.
struct QpProblem {
    Matrix quadratic;             // symmetric PSD, n x n
    std::vector<double> linear;   // length n
    double box_upper = 1.0;       // B > 0
    double sum_slack = 0.0;       // eps >= 0
    double sum_target = 1.0;      // required mean of the solution

    std::size_t size() const { return linear.size(); }
    void validate() const;
    double objective(std::span<const double> b) const;
};

// Projected gradient with adaptive step; the mean constraint is enforced by
// Euclidean projection, bisecting on the shift multiplier. Returns the
// weight vector; throws InfeasibleError / ConvergenceError.
std::vector<double> solve_qp(const QpProblem& p, double tol = 1e-8, int max_iter = 10000);

// Euclidean projection onto the feasible set of p. Exposed for tests.
std::vector<double> project_feasible(const QpProblem& p, std::vector<double> z);

// sup-norm of b - project(b - grad f(b)); zero exactly at a KKT point
double kkt_residual(const QpProblem& p, std::span<const double> b);

}  // namespace reisda
