#pragma once

#include "reisda/dataset.hpp"
#include "reisda/matrix.hpp"

#include <vector>

namespace reisda {

struct MinMaxParams {
    std::vector<double> min;
    std::vector<double> max;
};

// column-wise max-min normalization; constant columns map to 0
MinMaxParams minmax_fit(const Matrix& data);
Matrix minmax_apply(const MinMaxParams& params, const Matrix& data);

struct PcaParams {
    std::vector<double> means;
    Matrix components;              // orthonormal columns, descending variance
    std::vector<double> variances;  // all component variances, descending
    std::size_t retained = 0;
};

// Principal components of the sample covariance (divisor rows-1).
PcaParams pca_fit(const Matrix& data, std::size_t retained);
// Retain the smallest count of components whose variances sum to at least
// `fraction` of the total.
PcaParams pca_fit_fraction(const Matrix& data, double fraction);
Matrix pca_apply(const PcaParams& params, const Matrix& data);
// maps projected coordinates back to the original space
Matrix pca_inverse(const PcaParams& params, const Matrix& projected);

// Appends per-column successive differences (row t minus row t-1) to a
// time-ordered series; the first row's appended columns are zero so row
// alignment with labels is preserved.
Matrix frame_difference(const Matrix& series);

enum class TargetOrdering { kByDistance, kKeepOrder };

// Permutation over target rows: ascending distance to the calibration
// input (ties keep original index), or identity for time series.
std::vector<std::size_t> order_targets(const Matrix& targets,
                                       std::span<const double> calibration_input,
                                       TargetOrdering mode);

Matrix apply_permutation(const Matrix& rows, const std::vector<std::size_t>& perm);
std::vector<double> apply_permutation(const std::vector<double>& values,
                                      const std::vector<std::size_t>& perm);

// The calibration rule: an explicitly provided labeled target sample wins;
// otherwise the source sample with the least mean distance to the targets.
LabeledSample choose_calibration(const Dataset& source, const Matrix& targets,
                                 const LabeledSample* provided = nullptr);

}  // namespace reisda
