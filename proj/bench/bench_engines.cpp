// Compares the serial reference pipeline against the OpenMP engine on a
// synthetic image and verifies they agree bitwise. Run manually:
//   ./nlh-bench [size] [workers]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "nlh/noise.hpp"
#include "nlh/parallel.hpp"
#include "nlh/pipeline.hpp"
#include "nlh/reference.hpp"

using namespace nlh;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Plane synthetic_image(int size) {
    Plane img(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double g = 0.5 + 0.3 * std::sin(r * 0.07) * std::cos(c * 0.05);
            const double e = (c % 37 < 18) ? 0.1 : -0.1;
            img.at(r, c) = clamp01(g + e);
        }
    return add_awgn(img, 15.0, 7);
}

bool bitwise_equal(const Plane& a, const Plane& b) {
    return a.same_shape(b) &&
           std::memcmp(a.data.data(), b.data.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    const int size = argc > 1 ? std::atoi(argv[1]) : 128;
    const int workers = argc > 2 ? std::atoi(argv[2]) : 0;
    const Plane img = synthetic_image(size);

    NlhParams params = profile_params(Profile::Real);

    std::printf("image %dx%d, profile real, workers %d (0 = auto)\n", size, size,
                resolve_workers(workers));

    double t0 = now_s();
    const GrayDenoiseResult serial = reference::denoise_gray(img, params);
    const double t_serial = now_s() - t0;

    t0 = now_s();
    const GrayDenoiseResult par1 = denoise_gray(img, params, 1);
    const double t_par1 = now_s() - t0;

    t0 = now_s();
    const GrayDenoiseResult parN = denoise_gray(img, params, workers);
    const double t_parn = now_s() - t0;

    std::printf("serial reference : %7.2f s\n", t_serial);
    std::printf("engine, 1 worker : %7.2f s  (%.2fx vs reference)\n", t_par1,
                t_serial / t_par1);
    std::printf("engine, parallel : %7.2f s  (%.2fx vs reference, %.2fx vs 1 worker)\n",
                t_parn, t_serial / t_parn, t_par1 / t_parn);

    const bool ok_basic = bitwise_equal(serial.basic, parN.basic);
    const bool ok_final = bitwise_equal(serial.output, parN.output) &&
                          bitwise_equal(par1.output, parN.output);
    std::printf("bitwise agreement: basic %s, final %s\n", ok_basic ? "yes" : "NO",
                ok_final ? "yes" : "NO");
    return (ok_basic && ok_final) ? 0 : 1;
}
