#pragma once

#include <cstdint>

#include "nlh/image.hpp"

namespace nlh {

// Adds i.i.d. Gaussian noise with std sigma/255 (sigma given on the usual
// [0,255] convention). Output is NOT clamped so the noise statistics stay
// intact. The stream is a fixed function of the seed: mt19937_64 uniforms
// fed through Box-Muller, pixels consumed in row-major pairs.
Plane add_awgn(const Plane& img, double sigma, uint64_t seed);

}  // namespace nlh
