#pragma once

#include "reisda/dataset.hpp"

#include <vector>

namespace reisda {

// f(z) = 10 sin(pi z1 z2) + 20 (z3 - 0.5)^2 + 10 z4 + 5 z5
double friedman(std::span<const double> z);

struct FriedmanBenchmarkSpec {
    std::size_t n_source = 80;
    std::size_t n_target = 41;
    double domain_low = 0.2;
    double domain_high = 1.2;
    double shift = 0.2;  // added to every dimension of the first n_target source inputs
    std::size_t dims = 5;

    void validate() const;
};

// A benchmark bundle: the adaptation problem plus the sealed true target
// labels. Methods only ever see `pair`; `target_truth` is for scoring.
struct Benchmark {
    DomainPair pair;
    std::vector<double> target_truth;  // aligned with pair.target_inputs rows
};

// Source inputs are scaled Halton points 1..n_source in
// [domain_low, domain_high]^dims with exact labels; targets are the first
// n_target source inputs shifted by `shift` per dimension; the calibration
// point is the shifted first source point with its exact label; targets are
// reordered by ascending distance from the calibration input.
Benchmark make_friedman_benchmark(const FriedmanBenchmarkSpec& spec = {});

}  // namespace reisda
