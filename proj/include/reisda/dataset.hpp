#pragma once

#include "reisda/matrix.hpp"

#include <string>
#include <vector>

namespace reisda {

// Universal sample container: feature rows plus an optional label column.
// labels.empty() means unlabeled.
struct Dataset {
    Matrix inputs;
    std::vector<double> labels;

    std::size_t size() const { return inputs.rows(); }
    std::size_t dim() const { return inputs.cols(); }
    bool labeled() const { return !labels.empty(); }

    void validate(const std::string& who) const;
};

struct LabeledSample {
    std::vector<double> input;
    double label = 0.0;
};

// One adaptation problem instance: labeled source set, ordered unlabeled
// target inputs, and a single labeled calibration sample from the target
// side.
struct DomainPair {
    Dataset source;         // labeled, size q
    Matrix target_inputs;   // size p, already ordered
    LabeledSample calibration;

    std::size_t source_size() const { return source.size(); }
    std::size_t target_size() const { return target_inputs.rows(); }
    std::size_t dim() const { return source.dim(); }

    void validate() const;

    // source plus the calibration point, the training set every method
    // starts from
    Dataset pool_with_calibration() const;
};

Dataset append_sample(Dataset d, std::span<const double> input, double label);

}  // namespace reisda
