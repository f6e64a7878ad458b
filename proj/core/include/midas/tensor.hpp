#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace midas {

/// Channels x height x width of a latent.
struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const noexcept { return channels * height * width; }
    std::string str() const;
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Real-valued C x H x W array stored channel-major, row-major.
class Latent {
public:
    Latent() = default;
    explicit Latent(Shape shape, float fill = 0.0f);
    Latent(Shape shape, std::vector<float> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<float> values() noexcept { return data_; }
    std::span<const float> values() const noexcept { return data_; }

    float& at(std::size_t c, std::size_t y, std::size_t x) noexcept {
        return data_[(c * shape_.height + y) * shape_.width + x];
    }
    float at(std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return data_[(c * shape_.height + y) * shape_.width + x];
    }

    bool all_finite() const noexcept;

    friend bool operator==(const Latent&, const Latent&) = default;

private:
    Shape shape_;
    std::vector<float> data_;
};

/// Returns a*x + b*y elementwise; shapes must match.
Latent lincomb(double a, const Latent& x, double b, const Latent& y);
Latent scaled(double a, const Latent& x);

/// Seeded i.i.d. standard normal latent.
Latent gaussian_latent(Shape shape, std::uint64_t seed);

double max_abs_diff(const Latent& a, const Latent& b);
/// ||a - b||_2 / ||b||_2.
double relative_l2(const Latent& a, const Latent& b);

/// Copies the (c, rows, cols) window starting at (row0, col0).
Latent crop(const Latent& z, std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols);
/// Writes `patch` into `dst` at (row0, col0); channel counts must match.
void paste(Latent& dst, const Latent& patch, std::size_t row0, std::size_t col0);

/// 8-bit RGB image, row-major, interleaved.
struct ImageBuffer {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data;

    ImageBuffer() = default;
    ImageBuffer(std::size_t w, std::size_t h, std::uint8_t fill = 0)
        : width(w), height(h), data(w * h * 3, fill) {}

    std::uint8_t& at(std::size_t y, std::size_t x, std::size_t ch) noexcept {
        return data[(y * width + x) * 3 + ch];
    }
    std::uint8_t at(std::size_t y, std::size_t x, std::size_t ch) const noexcept {
        return data[(y * width + x) * 3 + ch];
    }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

} // namespace midas
