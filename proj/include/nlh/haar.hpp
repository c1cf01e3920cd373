#pragma once

#include <vector>

#include "nlh/image.hpp"

namespace nlh {

/// Small dense row-major matrix used for pixel groups and their transform
/// coefficients. In the transform domain the layout per dimension is:
/// index 0 holds the DC/scaling coefficient, index 1 the coarsest difference
/// (first half minus second half, scaled 1/sqrt(len)), and indices
/// [2^(s-1), 2^s) the scale-s block differences scaled 1/sqrt(block size).
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

enum class ThresholdLaw {
    Sigma,   // threshold tau * sigma (default; the scale that denoises)
    Sigma2,  // threshold tau * sigma^2, literal reading of the published rule
};

bool is_power_of_two(int v);

// Full-depth orthonormal Haar analysis/synthesis of a power-of-2 length
// vector, in place. `scratch` must hold at least `len` doubles.
void haar_forward_1d(double* v, int len, double* scratch);
void haar_inverse_1d(double* v, int len, double* scratch);

std::vector<double> haar_forward_1d(const std::vector<double>& v);
std::vector<double> haar_inverse_1d(const std::vector<double>& c);

// Separable 2D transform on a q x m matrix: rows first, then columns
// (inverse runs columns first, then rows). Both dimensions must be powers
// of two.
void haar_forward_2d(Mat& m);
void haar_inverse_2d(Mat& m);
void haar_forward_2d(double* a, int q, int m, std::vector<double>& scratch);
void haar_inverse_2d(double* a, int q, int m, std::vector<double>& scratch);

// The two separable phases, exposed so callers can share the per-row
// transforms of rows that appear in many groups.
void haar_forward_rows(double* a, int rows, int m, std::vector<double>& scratch);
void haar_inverse_rows(double* a, int rows, int m, std::vector<double>& scratch);
void haar_forward_cols(double* a, int q, int m, std::vector<double>& scratch);
void haar_inverse_cols(double* a, int q, int m, std::vector<double>& scratch);

// Bi-hard thresholding of a coefficient matrix: magnitude thresholding at
// tau*sigma^2 (or tau*sigma under the alternate law), then structural
// zeroing of the last two coefficient rows except column 0.
void bi_hard_threshold(Mat& c, double sigma_g, double tau,
                       ThresholdLaw law = ThresholdLaw::Sigma);
void bi_hard_threshold(double* a, int q, int m, double sigma_g, double tau, ThresholdLaw law);

// Empirical Wiener attenuation g = |guide|^2 / (|guide|^2 + (sigma/2)^2)
// applied twice to `noisy` (same guide both times). When the denominator is
// exactly zero (sigma 0 and zero guide) the gain is 1.
void wiener_shrink(Mat& noisy, const Mat& guide, double sigma_g);
void wiener_shrink(double* noisy, const double* guide, int q, int m, double sigma_g);

}  // namespace nlh
