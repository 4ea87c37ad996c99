#include "reisda/qp.hpp"

#include <algorithm>
#include <cmath>

#include "reisda/errors.hpp"

namespace reisda {

namespace {

double clamp01(double v, double upper) { return std::clamp(v, 0.0, upper); }

// project z onto { b in [0,B]^n : sum(b) = target_sum } by bisecting the
// shift mu in b_i = clip(z_i + mu)
std::vector<double> project_box_sum(const std::vector<double>& z, double upper, double target_sum) {
    const std::size_t n = z.size();
    double lo = -upper, hi = upper;
    for (double v : z) {
        lo = std::min(lo, -v);
        hi = std::max(hi, upper - v);
    }
    auto shifted_sum = [&](double mu) {
        double s = 0.0;
        for (double v : z) s += clamp01(v + mu, upper);
        return s;
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shifted_sum(mid) < target_sum) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double mu = 0.5 * (lo + hi);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = clamp01(z[i] + mu, upper);
    return out;
}

}  // namespace

void QpProblem::validate() const {
    const std::size_t n = size();
    if (n == 0) throw InvalidInputError("qp: empty problem");
    if (quadratic.rows() != n || quadratic.cols() != n) {
        throw InvalidInputError("qp: quadratic term must be n x n");
    }
    if (!quadratic.all_finite()) throw InvalidInputError("qp: non-finite quadratic term");
    if (quadratic.asymmetry() > 1e-10) {
        throw InvalidInputError("qp: quadratic term not symmetric within 1e-10");
    }
    if (!(box_upper > 0.0)) throw InvalidInputError("qp: box_upper must be positive");
    if (sum_slack < 0.0) throw InvalidInputError("qp: sum_slack must be non-negative");
}

double QpProblem::objective(std::span<const double> b) const {
    const auto qb = multiply(quadratic, b);
    return 0.5 * dot(qb, b) - dot(std::span<const double>(linear), b);
}

std::vector<double> project_feasible(const QpProblem& p, std::vector<double> z) {
    const std::size_t n = p.size();
    double s = 0.0;
    for (double v : z) s += clamp01(v, p.box_upper);
    const double lo = static_cast<double>(n) * (p.sum_target - p.sum_slack);
    const double hi = static_cast<double>(n) * (p.sum_target + p.sum_slack);
    // clip-then-shift must bisect on the unclipped point, so the slab cases
    // get the original z
    if (s < lo) return project_box_sum(z, p.box_upper, lo);
    if (s > hi) return project_box_sum(z, p.box_upper, hi);
    for (double& v : z) v = clamp01(v, p.box_upper);
    return z;
}

double kkt_residual(const QpProblem& p, std::span<const double> b) {
    auto grad = multiply(p.quadratic, b);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= p.linear[i];
    std::vector<double> step(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) step[i] = b[i] - grad[i];
    const auto proj = project_feasible(p, std::move(step));
    double r = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) r = std::max(r, std::abs(b[i] - proj[i]));
    return r;
}

std::vector<double> solve_qp(const QpProblem& p, double tol, int max_iter) {
    p.validate();
    if (!(tol > 0.0)) throw InvalidInputError("qp: tolerance must be positive");

    const std::size_t n = p.size();
    // feasibility of box against the mean slab
    const double lo = static_cast<double>(n) * (p.sum_target - p.sum_slack);
    const double hi = static_cast<double>(n) * (p.sum_target + p.sum_slack);
    if (lo > static_cast<double>(n) * p.box_upper + 1e-12 || hi < -1e-12) {
        throw InfeasibleError("qp: box and mean constraints do not intersect");
    }

    // start from the projected uniform point
    std::vector<double> b =
        project_feasible(p, std::vector<double>(n, clamp01(p.sum_target, p.box_upper)));

    // Lipschitz estimate via max absolute row sum of Q
    double lipschitz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < n; ++j) rs += std::abs(p.quadratic(i, j));
        lipschitz = std::max(lipschitz, rs);
    }
    double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

    double f = p.objective(b);
    double best_residual = kkt_residual(p, b);
    std::vector<double> best = b;

    const double base_step = step;
    std::vector<double> prev_b;
    std::vector<double> prev_grad;

    for (int it = 0; it < max_iter; ++it) {
        auto grad = multiply(p.quadratic, b);
        for (std::size_t i = 0; i < n; ++i) grad[i] -= p.linear[i];

        // Barzilai-Borwein spectral step, clamped around the Lipschitz guess
        if (!prev_b.empty()) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = b[i] - prev_b[i];
                ss += s * s;
                sy += s * (grad[i] - prev_grad[i]);
            }
            if (sy > 1e-300 && ss > 0.0) {
                step = std::clamp(ss / sy, 1e-4 * base_step, 1e6 * base_step);
            }
        }
        prev_b = b;
        prev_grad = grad;

        // backtracking on the projected step
        std::vector<double> candidate;
        double f_new = f;
        for (int bt = 0; bt < 80; ++bt) {
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = b[i] - step * grad[i];
            candidate = project_feasible(p, std::move(z));
            f_new = p.objective(candidate);
            if (f_new <= f + 1e-14 * std::abs(f)) break;
            step *= 0.5;
        }

        b = std::move(candidate);
        f = f_new;

        const double res = kkt_residual(p, b);
        if (res < best_residual) {
            best_residual = res;
            best = b;
        }
        if (res <= tol) return b;
    }
    throw ConvergenceError("qp: iteration budget exhausted", best_residual, best);
}

}  // namespace reisda
