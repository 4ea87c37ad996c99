#pragma once

#include <cstdint>
#include <vector>

namespace reisda {

// Radical-inverse (Halton) low-discrepancy values. Indexing starts at 1;
// index 0 would be the origin in every base, a useless design point.
double halton(std::uint64_t index, unsigned base);

// Point in [0,1)^dims where coordinate d uses the d-th prime base
// (2, 3, 5, ...). dims is capped at 25, the number of precomputed primes.
std::vector<double> halton_point(std::uint64_t index, unsigned dims);

inline constexpr unsigned kMaxHaltonDims = 25;

}  // namespace reisda
