#include "reisda/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reisda/eig.hpp"
#include "reisda/errors.hpp"

namespace reisda {

MinMaxParams minmax_fit(const Matrix& data) {
    if (data.rows() == 0) throw InvalidInputError("minmax_fit: empty data");
    MinMaxParams p;
    p.min.assign(data.cols(), 0.0);
    p.max.assign(data.cols(), 0.0);
    for (std::size_t j = 0; j < data.cols(); ++j) {
        double lo = data(0, j), hi = data(0, j);
        for (std::size_t i = 1; i < data.rows(); ++i) {
            lo = std::min(lo, data(i, j));
            hi = std::max(hi, data(i, j));
        }
        p.min[j] = lo;
        p.max[j] = hi;
    }
    return p;
}

Matrix minmax_apply(const MinMaxParams& params, const Matrix& data) {
    if (data.cols() != params.min.size()) {
        throw InvalidInputError("minmax_apply: column count mismatch");
    }
    Matrix out = data;
    for (std::size_t j = 0; j < data.cols(); ++j) {
        const double range = params.max[j] - params.min[j];
        for (std::size_t i = 0; i < data.rows(); ++i) {
            out(i, j) = range > 0.0 ? (data(i, j) - params.min[j]) / range : 0.0;
        }
    }
    return out;
}

namespace {

Matrix covariance(const Matrix& data, std::vector<double>& means) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    means.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) means[j] += data(i, j);
    for (double& m : means) m /= static_cast<double>(n);

    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double da = data(i, a) - means[a];
            for (std::size_t b = a; b < d; ++b) {
                cov(a, b) += da * (data(i, b) - means[b]);
            }
        }
    }
    const double div = static_cast<double>(n - 1);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= div;
            cov(b, a) = cov(a, b);
        }
    return cov;
}

PcaParams pca_fit_impl(const Matrix& data) {
    if (data.rows() < 2) throw InvalidInputError("pca_fit: need at least 2 rows");
    PcaParams p;
    const Matrix cov = covariance(data, p.means);
    EigResult eig = symmetric_eig(cov);
    p.components = std::move(eig.vectors);
    p.variances = std::move(eig.values);
    for (double& v : p.variances) v = std::max(v, 0.0);  // clip eigen noise
    return p;
}

}  // namespace

PcaParams pca_fit(const Matrix& data, std::size_t retained) {
    if (retained == 0 || retained > std::min(data.rows() - 1, data.cols())) {
        throw InvalidInputError("pca_fit: retained count out of range");
    }
    PcaParams p = pca_fit_impl(data);
    p.retained = retained;
    return p;
}

PcaParams pca_fit_fraction(const Matrix& data, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw InvalidInputError("pca_fit_fraction: fraction must be in (0, 1]");
    }
    PcaParams p = pca_fit_impl(data);
    const double total = std::accumulate(p.variances.begin(), p.variances.end(), 0.0);
    double acc = 0.0;
    std::size_t k = 0;
    const std::size_t cap = std::min(data.rows() - 1, data.cols());
    while (k < cap && acc < fraction * total) {
        acc += p.variances[k];
        ++k;
    }
    p.retained = std::max<std::size_t>(k, 1);
    return p;
}

Matrix pca_apply(const PcaParams& params, const Matrix& data) {
    if (data.cols() != params.means.size()) {
        throw InvalidInputError("pca_apply: column count mismatch");
    }
    Matrix out(data.rows(), params.retained);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t c = 0; c < params.retained; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < data.cols(); ++j) {
                s += (data(i, j) - params.means[j]) * params.components(j, c);
            }
            out(i, c) = s;
        }
    }
    return out;
}

Matrix pca_inverse(const PcaParams& params, const Matrix& projected) {
    if (projected.cols() != params.retained) {
        throw InvalidInputError("pca_inverse: column count mismatch");
    }
    const std::size_t d = params.means.size();
    Matrix out(projected.rows(), d);
    for (std::size_t i = 0; i < projected.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = params.means[j];
            for (std::size_t c = 0; c < params.retained; ++c) {
                s += projected(i, c) * params.components(j, c);
            }
            out(i, j) = s;
        }
    }
    return out;
}

Matrix frame_difference(const Matrix& series) {
    if (series.rows() == 0) throw InvalidInputError("frame_difference: empty series");
    const std::size_t d = series.cols();
    Matrix out(series.rows(), 2 * d);
    for (std::size_t i = 0; i < series.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            out(i, j) = series(i, j);
            out(i, d + j) = i == 0 ? 0.0 : series(i, j) - series(i - 1, j);
        }
    }
    return out;
}

std::vector<std::size_t> order_targets(const Matrix& targets,
                                       std::span<const double> calibration_input,
                                       TargetOrdering mode) {
    std::vector<std::size_t> perm(targets.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (mode == TargetOrdering::kKeepOrder) return perm;

    if (targets.cols() != calibration_input.size()) {
        throw InvalidInputError("order_targets: dimension mismatch");
    }
    std::vector<double> dist(targets.rows());
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        dist[i] = euclidean_distance(targets.row(i), calibration_input);
    }
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    return perm;
}

Matrix apply_permutation(const Matrix& rows, const std::vector<std::size_t>& perm) {
    if (perm.size() != rows.rows()) {
        throw InvalidInputError("apply_permutation: length mismatch");
    }
    Matrix out(rows.rows(), rows.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) out.set_row(i, rows.row(perm[i]));
    return out;
}

std::vector<double> apply_permutation(const std::vector<double>& values,
                                      const std::vector<std::size_t>& perm) {
    if (perm.size() != values.size()) {
        throw InvalidInputError("apply_permutation: length mismatch");
    }
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out[i] = values[perm[i]];
    return out;
}

LabeledSample choose_calibration(const Dataset& source, const Matrix& targets,
                                 const LabeledSample* provided) {
    if (provided != nullptr) return *provided;
    if (source.size() == 0 || !source.labeled()) {
        throw InvalidInputError("choose_calibration: source must be labeled and non-empty");
    }
    if (targets.rows() == 0) {
        throw InvalidInputError("choose_calibration: no targets to measure distance against");
    }
    std::size_t best = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < source.size(); ++i) {
        double s = 0.0;
        for (std::size_t t = 0; t < targets.rows(); ++t) {
            s += euclidean_distance(source.inputs.row(i), targets.row(t));
        }
        const double mean = s / static_cast<double>(targets.rows());
        if (mean < best_mean) {  // strict: ties keep the lowest index
            best_mean = mean;
            best = i;
        }
    }
    return {source.inputs.row_copy(best), source.labels[best]};
}

}  // namespace reisda
