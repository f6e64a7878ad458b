#pragma once

#include "midas/tensor.hpp"

#include <cstdint>
#include <string>

namespace midas {

/// A transmission degradation applied to the stego image.
struct Degradation {
    enum class Kind { none, gaussian, jpeg };

    Kind kind = Kind::none;
    double sigma = 0.0;  ///< pixel units on the 0..255 scale
    int quality = 100;   ///< 1..100

    /// Parses "none", "gaussian:<sigma>" or "jpeg:<quality>".
    static Degradation parse(const std::string& text);
};

/// Adds seeded i.i.d. N(0, sigma^2) to every sample, then rounds and clamps.
ImageBuffer apply_gaussian(const ImageBuffer& img, double sigma, std::uint64_t seed);

/// Baseline-JPEG-style loss without entropy coding: per 8x8 block of each
/// full-resolution YCbCr plane, DCT, quantize with the Annex K luminance or
/// chrominance table scaled to `quality`, dequantize, inverse DCT.
/// Partial edge blocks are padded by edge replication.
ImageBuffer apply_jpeg(const ImageBuffer& img, int quality);

ImageBuffer apply_degradation(const ImageBuffer& img, const Degradation& d, std::uint64_t seed);

} // namespace midas
