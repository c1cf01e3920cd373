#include "nlh/metrics.hpp"

#include <cmath>

namespace nlh {

namespace {

constexpr double kPsnrCap = 99.0;
constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;

double mse(const Plane& a, const Plane& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr_from_mse(double m) {
    if (m <= 0.0) return kPsnrCap;
    const double v = 10.0 * std::log10(1.0 / m);
    return v > kPsnrCap ? kPsnrCap : v;
}

// Normalized 11x11 Gaussian weights, sigma 1.5.
const double* gaussian_window() {
    static const auto w = [] {
        std::array<double, kWin * kWin> t{};
        double sum = 0.0;
        for (int y = 0; y < kWin; ++y)
            for (int x = 0; x < kWin; ++x) {
                const double dy = y - (kWin - 1) / 2.0;
                const double dx = x - (kWin - 1) / 2.0;
                t[y * kWin + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kWinSigma * kWinSigma));
                sum += t[y * kWin + x];
            }
        for (auto& v : t) v /= sum;
        return t;
    }();
    return w.data();
}

}  // namespace

double psnr(const Plane& ref, const Plane& test) {
    if (!ref.same_shape(test)) throw std::invalid_argument("psnr: dimension mismatch");
    return psnr_from_mse(mse(ref, test));
}

double psnr(const ColorImage& ref, const ColorImage& test) {
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        if (!ref.planes[c].same_shape(test.planes[c]))
            throw std::invalid_argument("psnr: dimension mismatch");
        acc += mse(ref.planes[c], test.planes[c]);
    }
    return psnr_from_mse(acc / 3.0);
}

double ssim(const Plane& ref, const Plane& test) {
    if (!ref.same_shape(test)) throw std::invalid_argument("ssim: dimension mismatch");
    if (ref.height < kWin || ref.width < kWin)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    const double* w = gaussian_window();
    double total = 0.0;
    long count = 0;
    for (int r = 0; r + kWin <= ref.height; ++r) {
        for (int c = 0; c + kWin <= ref.width; ++c) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int y = 0; y < kWin; ++y) {
                const double* px = &ref.data[static_cast<size_t>(r + y) * ref.width + c];
                const double* py = &test.data[static_cast<size_t>(r + y) * test.width + c];
                const double* ww = &w[y * kWin];
                for (int x = 0; x < kWin; ++x) {
                    mx += ww[x] * px[x];
                    my += ww[x] * py[x];
                    sxx += ww[x] * px[x] * px[x];
                    syy += ww[x] * py[x] * py[x];
                    sxy += ww[x] * px[x] * py[x];
                }
            }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cxy = sxy - mx * my;
            const double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
            const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double ssim(const ColorImage& ref, const ColorImage& test) {
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) acc += ssim(ref.planes[c], test.planes[c]);
    return acc / 3.0;
}

MetricReport metrics(const Plane& ref, const Plane& test) {
    return {psnr(ref, test), ssim(ref, test)};
}

MetricReport metrics(const ColorImage& ref, const ColorImage& test) {
    return {psnr(ref, test), ssim(ref, test)};
}

}  // namespace nlh
