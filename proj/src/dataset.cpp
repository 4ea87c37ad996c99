#include "reisda/dataset.hpp"

#include <cmath>

#include "reisda/errors.hpp"

namespace reisda {

void Dataset::validate(const std::string& who) const {
    if (labeled() && labels.size() != inputs.rows()) {
        throw InvalidInputError(who + ": label count does not match input rows");
    }
    if (!inputs.all_finite()) {
        throw InvalidInputError(who + ": non-finite inputs");
    }
    for (double y : labels) {
        if (!std::isfinite(y)) throw InvalidInputError(who + ": non-finite label");
    }
}

void DomainPair::validate() const {
    source.validate("source");
    if (!source.labeled() || source.size() == 0) {
        throw InvalidInputError("domain pair: source must be labeled and non-empty");
    }
    if (target_inputs.rows() == 0) {
        throw InvalidInputError("domain pair: target set is empty");
    }
    if (target_inputs.cols() != source.dim() || calibration.input.size() != source.dim()) {
        throw InvalidInputError("domain pair: feature dimensions disagree");
    }
    if (!target_inputs.all_finite()) {
        throw InvalidInputError("domain pair: non-finite target inputs");
    }
}

Dataset DomainPair::pool_with_calibration() const {
    Dataset pool = source;
    return append_sample(std::move(pool), calibration.input, calibration.label);
}

Dataset append_sample(Dataset d, std::span<const double> input, double label) {
    d.inputs = append_row(std::move(d.inputs), input);
    d.labels.push_back(label);
    return d;
}

}  // namespace reisda
