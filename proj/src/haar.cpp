#include "nlh/haar.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace nlh {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

// Both passes ping-pong between v and scratch instead of copying back per
// level; the arithmetic (and hence every output bit) is unchanged.
void haar_forward_1d(double* v, int len, double* scratch) {
    if (len < 2) return;
    double* bufs[2] = {v, scratch};
    int cur = 0;  // buffer currently holding the working approximation
    for (int l = len; l >= 2; l /= 2) {
        const double* src = bufs[cur];
        double* dst = bufs[1 - cur];
        const int half = l / 2;
        for (int i = 0; i < half; ++i) {
            const double a = src[2 * i];
            const double b = src[2 * i + 1];
            dst[i] = (a + b) * kInvSqrt2;
            dst[half + i] = (a - b) * kInvSqrt2;
        }
        cur = 1 - cur;
    }
    // detail blocks written into scratch (every other level) move back to v
    int parity = 1;
    for (int l = len; l >= 2; l /= 2) {
        if (parity == 1)
            std::memcpy(v + l / 2, scratch + l / 2,
                        static_cast<size_t>(l - l / 2) * sizeof(double));
        parity = 1 - parity;
    }
    if (cur == 1) v[0] = scratch[0];
}

void haar_inverse_1d(double* v, int len, double* scratch) {
    if (len < 2) return;
    double* bufs[2] = {v, scratch};
    int cur = 0;
    for (int l = 2; l <= len; l *= 2) {
        const double* s = bufs[cur];
        const double* d = v + l / 2;  // detail coefficients always sit in v
        double* dst = bufs[1 - cur];
        const int half = l / 2;
        for (int i = 0; i < half; ++i) {
            const double a = s[i];
            const double b = d[i];
            dst[2 * i] = (a + b) * kInvSqrt2;
            dst[2 * i + 1] = (a - b) * kInvSqrt2;
        }
        cur = 1 - cur;
    }
    if (cur == 1) std::memcpy(v, scratch, static_cast<size_t>(len) * sizeof(double));
}

std::vector<double> haar_forward_1d(const std::vector<double>& v) {
    if (!is_power_of_two(static_cast<int>(v.size())))
        throw std::invalid_argument("haar_forward_1d: length must be a power of 2");
    std::vector<double> out = v, scratch(v.size());
    haar_forward_1d(out.data(), static_cast<int>(out.size()), scratch.data());
    return out;
}

std::vector<double> haar_inverse_1d(const std::vector<double>& c) {
    if (!is_power_of_two(static_cast<int>(c.size())))
        throw std::invalid_argument("haar_inverse_1d: length must be a power of 2");
    std::vector<double> out = c, scratch(c.size());
    haar_inverse_1d(out.data(), static_cast<int>(out.size()), scratch.data());
    return out;
}

namespace {
inline void ensure_scratch(std::vector<double>& scratch, size_t needed) {
    if (scratch.size() < needed) scratch.resize(needed);
}
}  // namespace

void haar_forward_rows(double* a, int rows, int m, std::vector<double>& scratch) {
    ensure_scratch(scratch, static_cast<size_t>(m));
    for (int r = 0; r < rows; ++r) haar_forward_1d(a + static_cast<size_t>(r) * m, m, scratch.data());
}

void haar_inverse_rows(double* a, int rows, int m, std::vector<double>& scratch) {
    ensure_scratch(scratch, static_cast<size_t>(m));
    for (int r = 0; r < rows; ++r) haar_inverse_1d(a + static_cast<size_t>(r) * m, m, scratch.data());
}

// Column passes work on whole rows at a time so the inner loops stay
// contiguous; `scratch` is used as a q x m staging buffer.
void haar_forward_cols(double* a, int q, int m, std::vector<double>& scratch) {
    ensure_scratch(scratch, static_cast<size_t>(std::max(q, 2)) * m);
    for (int l = q; l >= 2; l /= 2) {
        const int half = l / 2;
        for (int i = 0; i < half; ++i) {
            const double* r0 = a + static_cast<size_t>(2 * i) * m;
            const double* r1 = a + static_cast<size_t>(2 * i + 1) * m;
            double* s = scratch.data() + static_cast<size_t>(i) * m;
            double* d = scratch.data() + static_cast<size_t>(half + i) * m;
            for (int c = 0; c < m; ++c) {
                s[c] = (r0[c] + r1[c]) * kInvSqrt2;
                d[c] = (r0[c] - r1[c]) * kInvSqrt2;
            }
        }
        std::memcpy(a, scratch.data(), static_cast<size_t>(l) * m * sizeof(double));
    }
}

void haar_inverse_cols(double* a, int q, int m, std::vector<double>& scratch) {
    ensure_scratch(scratch, static_cast<size_t>(std::max(q, 2)) * m);
    for (int l = 2; l <= q; l *= 2) {
        const int half = l / 2;
        for (int i = 0; i < half; ++i) {
            const double* s = a + static_cast<size_t>(i) * m;
            const double* d = a + static_cast<size_t>(half + i) * m;
            double* o0 = scratch.data() + static_cast<size_t>(2 * i) * m;
            double* o1 = scratch.data() + static_cast<size_t>(2 * i + 1) * m;
            for (int c = 0; c < m; ++c) {
                o0[c] = (s[c] + d[c]) * kInvSqrt2;
                o1[c] = (s[c] - d[c]) * kInvSqrt2;
            }
        }
        std::memcpy(a, scratch.data(), static_cast<size_t>(l) * m * sizeof(double));
    }
}

void haar_forward_2d(double* a, int q, int m, std::vector<double>& scratch) {
    haar_forward_rows(a, q, m, scratch);
    haar_forward_cols(a, q, m, scratch);
}

void haar_inverse_2d(double* a, int q, int m, std::vector<double>& scratch) {
    haar_inverse_cols(a, q, m, scratch);
    haar_inverse_rows(a, q, m, scratch);
}

namespace {
void check_group_shape(int q, int m) {
    if (!is_power_of_two(q) || !is_power_of_two(m))
        throw std::invalid_argument("haar 2d: group shape must be powers of 2");
}
}  // namespace

void haar_forward_2d(Mat& mat) {
    check_group_shape(mat.rows, mat.cols);
    std::vector<double> scratch;
    haar_forward_2d(mat.data.data(), mat.rows, mat.cols, scratch);
}

void haar_inverse_2d(Mat& mat) {
    check_group_shape(mat.rows, mat.cols);
    std::vector<double> scratch;
    haar_inverse_2d(mat.data.data(), mat.rows, mat.cols, scratch);
}

void bi_hard_threshold(double* a, int q, int m, double sigma_g, double tau, ThresholdLaw law) {
    const double thr =
        law == ThresholdLaw::Sigma2 ? tau * sigma_g * sigma_g : tau * sigma_g;
    const size_t n = static_cast<size_t>(q) * m;
    for (size_t i = 0; i < n; ++i)
        if (std::fabs(a[i]) < thr) a[i] = 0.0;
    // high-frequency band: last two coefficient rows, column 0 exempt
    for (int r = std::max(q - 2, 0); r < q; ++r) {
        double* row = a + static_cast<size_t>(r) * m;
        for (int c = 1; c < m; ++c) row[c] = 0.0;
    }
}

void bi_hard_threshold(Mat& c, double sigma_g, double tau, ThresholdLaw law) {
    if (sigma_g < 0.0) throw std::invalid_argument("bi_hard_threshold: negative sigma");
    bi_hard_threshold(c.data.data(), c.rows, c.cols, sigma_g, tau, law);
}

void wiener_shrink(double* noisy, const double* guide, int q, int m, double sigma_g) {
    const double s2 = (sigma_g / 2.0) * (sigma_g / 2.0);
    const size_t n = static_cast<size_t>(q) * m;
    for (size_t i = 0; i < n; ++i) {
        const double e = guide[i] * guide[i];
        const double den = e + s2;
        const double g = den == 0.0 ? 1.0 : e / den;
        noisy[i] *= g * g;  // two Wiener passes with the same guide
    }
}

void wiener_shrink(Mat& noisy, const Mat& guide, double sigma_g) {
    if (noisy.rows != guide.rows || noisy.cols != guide.cols)
        throw std::invalid_argument("wiener_shrink: shape mismatch");
    wiener_shrink(noisy.data.data(), guide.data.data(), noisy.rows, noisy.cols, sigma_g);
}

}  // namespace nlh
