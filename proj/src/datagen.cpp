#include "reisda/datagen.hpp"

#include <cmath>
#include <numbers>

#include "reisda/errors.hpp"
#include "reisda/halton.hpp"
#include "reisda/preprocess.hpp"

namespace reisda {

double friedman(std::span<const double> z) {
    if (z.size() != 5) throw InvalidInputError("friedman: input must have 5 dimensions");
    for (double v : z) {
        if (!std::isfinite(v)) throw InvalidInputError("friedman: non-finite input");
    }
    return 10.0 * std::sin(std::numbers::pi * z[0] * z[1]) + 20.0 * (z[2] - 0.5) * (z[2] - 0.5) +
           10.0 * z[3] + 5.0 * z[4];
}

void FriedmanBenchmarkSpec::validate() const {
    if (dims != 5) throw InvalidInputError("friedman benchmark: dims must be 5");
    if (n_source == 0 || n_target == 0) {
        throw InvalidInputError("friedman benchmark: empty source or target");
    }
    if (n_target > n_source) {
        throw InvalidInputError("friedman benchmark: n_target must not exceed n_source");
    }
    if (!(domain_high > domain_low)) {
        throw InvalidInputError("friedman benchmark: domain_high must exceed domain_low");
    }
}

Benchmark make_friedman_benchmark(const FriedmanBenchmarkSpec& spec) {
    spec.validate();
    const double span = spec.domain_high - spec.domain_low;

    Matrix source_inputs(spec.n_source, spec.dims);
    std::vector<double> source_labels(spec.n_source);
    for (std::size_t i = 0; i < spec.n_source; ++i) {
        const auto h = halton_point(i + 1, static_cast<unsigned>(spec.dims));
        for (std::size_t d = 0; d < spec.dims; ++d) {
            source_inputs(i, d) = spec.domain_low + span * h[d];
        }
        source_labels[i] = friedman(source_inputs.row(i));
    }

    Matrix targets(spec.n_target, spec.dims);
    std::vector<double> truth(spec.n_target);
    for (std::size_t i = 0; i < spec.n_target; ++i) {
        for (std::size_t d = 0; d < spec.dims; ++d) {
            targets(i, d) = source_inputs(i, d) + spec.shift;
        }
        truth[i] = friedman(targets.row(i));
    }

    LabeledSample calibration{targets.row_copy(0), truth[0]};

    const auto perm = order_targets(targets, calibration.input, TargetOrdering::kByDistance);

    Benchmark bench;
    bench.pair.source = Dataset{std::move(source_inputs), std::move(source_labels)};
    bench.pair.target_inputs = apply_permutation(targets, perm);
    bench.pair.calibration = std::move(calibration);
    bench.target_truth = apply_permutation(truth, perm);
    bench.pair.validate();
    return bench;
}

}  // namespace reisda
