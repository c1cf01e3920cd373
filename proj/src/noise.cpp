#include "nlh/noise.hpp"

#include <cmath>
#include <random>

namespace nlh {

namespace {
// Uniform in [0,1) from the top 53 bits; std::normal_distribution is
// implementation-defined, so the Gaussian stream is rolled by hand.
inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

Plane add_awgn(const Plane& img, double sigma, uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_awgn: negative sigma");
    Plane out = img;
    if (sigma == 0.0) return out;

    const double s = sigma / 255.0;
    std::mt19937_64 rng(seed);
    const size_t n = out.size();
    for (size_t i = 0; i < n; i += 2) {
        const double u1 = 1.0 - uniform53(rng);  // (0,1]
        const double u2 = uniform53(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        out.data[i] += s * r * std::cos(a);
        if (i + 1 < n) out.data[i + 1] += s * r * std::sin(a);
    }
    return out;
}

}  // namespace nlh
