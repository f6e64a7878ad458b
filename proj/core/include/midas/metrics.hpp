#pragma once

#include "midas/tensor.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace midas {

/// PSNR reported for identical images.
inline constexpr double kPsnrCap = 99.0;

/// 10 log10(255^2 / MSE) over all RGB samples, capped at kPsnrCap.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Mean SSIM over every 8x8 window (stride 1) of the BT.601 luminance planes,
/// uniform weights, C1 = (0.01*255)^2, C2 = (0.03*255)^2.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// Mean over the same windows of the structure term
/// (2 cov + C) / (var_a + var_b + C) with C = C2 / 2.
double s_component(const ImageBuffer& a, const ImageBuffer& b);

/// Pearson correlation of the flattened values.
double latent_corr(const Latent& a, const Latent& b);
double pearson(std::span<const float> a, std::span<const float> b);

struct MetricReport {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
    double s = 0.0;
    double corr = 0.0;
};

MetricReport measure(std::string name, const ImageBuffer& reference, const ImageBuffer& test, const Latent& z_ref,
                     const Latent& z_test);

/// Writes "name,psnr,ssim,s,corr" followed by one row per report.
void write_metrics_csv(std::ostream& out, std::span<const MetricReport> rows);

} // namespace midas
