#pragma once

#include "midas/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace midas {

/// Area-average downsampling by n1 in height and n2 in width.
ImageBuffer downsample(const ImageBuffer& img, std::size_t n1, std::size_t n2);
/// Bilinear upsampling by n1 in height and n2 in width, half-pixel centres,
/// edge samples clamped.
ImageBuffer upsample(const ImageBuffer& img, std::size_t n1, std::size_t n2);

/// Image <-> latent conversion.
class LatentCodec {
public:
    virtual ~LatentCodec() = default;
    virtual Latent encode(const ImageBuffer& img) const = 0;
    virtual ImageBuffer decode(const Latent& z) const = 0;
    /// Image pixels per latent cell along each axis.
    virtual std::size_t scale() const noexcept = 0;
    virtual std::size_t channels() const noexcept = 0;
    virtual bool concurrency_safe() const noexcept { return false; }
};

/// Model-free codec: pixels rescaled to [-1, 1], 4x4 area pooling, channels
/// (R, G, B, luminance). Decoding drops the luminance channel and repeats each
/// cell over its 4x4 block.
class ToyCodec final : public LatentCodec {
public:
    static constexpr std::size_t kScale = 4;
    static constexpr std::size_t kChannels = 4;

    Latent encode(const ImageBuffer& img) const override;
    ImageBuffer decode(const Latent& z) const override;
    std::size_t scale() const noexcept override { return kScale; }
    std::size_t channels() const noexcept override { return kChannels; }
    bool concurrency_safe() const noexcept override { return true; }
};

Latent toy_encode(const ImageBuffer& img);
ImageBuffer toy_decode(const Latent& z);

/// "MLAT", u16 version, u32 C, H, W, then little-endian float32 values.
std::vector<std::uint8_t> serialize_latent(const Latent& z);
Latent deserialize_latent(std::span<const std::uint8_t> bytes);
void write_latent(const std::string& path, const Latent& z);
Latent read_latent(const std::string& path);

} // namespace midas
