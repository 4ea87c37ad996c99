#include "reisda/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reisda/errors.hpp"

namespace reisda {

namespace {

// sum of squares of off-diagonal entries
double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

void fix_column_sign(Matrix& v, std::size_t col) {
    const std::size_t n = v.rows();
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(v(i, col));
        if (m > best + 1e-15) {  // strict improvement keeps the lowest index on ties
            best = m;
            arg = i;
        }
    }
    if (v(arg, col) < 0.0) {
        for (std::size_t i = 0; i < n; ++i) v(i, col) = -v(i, col);
    }
}

}  // namespace

EigResult symmetric_eig(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw InvalidInputError("symmetric_eig: matrix is not square");
    }
    if (a.asymmetry() > 1e-10) {
        throw InvalidInputError("symmetric_eig: matrix is not symmetric within 1e-10");
    }
    const std::size_t n = a.rows();
    if (n == 0) return {{}, Matrix{}};

    Matrix m = a;
    // Symmetrize exactly so rotations keep both triangles consistent.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = m(j, i) = avg;
        }

    Matrix v = Matrix::identity(n);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m(i, i)));
    scale = std::max(scale, off_diagonal_norm(m));
    const double tol = std::max(1e-14 * scale, 1e-300);

    const int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(m) <= tol) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = m(p, p);
                const double aqq = m(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    const double residual = off_diagonal_norm(m);
    if (sweep == max_sweeps && residual > tol) {
        throw ConvergenceError("symmetric_eig: Jacobi sweeps exhausted", residual);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return m(i, i) > m(j, j); });

    EigResult out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = m(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
        fix_column_sign(out.vectors, j);
    }
    return out;
}

}  // namespace reisda
