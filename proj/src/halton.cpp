#include "reisda/halton.hpp"

#include <array>

#include "reisda/errors.hpp"

namespace reisda {

namespace {

constexpr std::array<unsigned, kMaxHaltonDims> kPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

bool is_prime(unsigned n) {
    if (n < 2) return false;
    for (unsigned d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

double halton(std::uint64_t index, unsigned base) {
    if (index == 0) {
        throw InvalidInputError("halton index starts at 1");
    }
    if (!is_prime(base)) {
        throw InvalidInputError("halton base must be prime");
    }
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

std::vector<double> halton_point(std::uint64_t index, unsigned dims) {
    if (dims == 0 || dims > kMaxHaltonDims) {
        throw InvalidInputError("halton_point dims must be in [1, 25]");
    }
    std::vector<double> p(dims);
    for (unsigned d = 0; d < dims; ++d) p[d] = halton(index, kPrimes[d]);
    return p;
}

}  // namespace reisda
