#include "midas/tensor.hpp"

#include "midas/errors.hpp"
#include "midas/rng.hpp"

#include <algorithm>
#include <cmath>

namespace midas {

std::string Shape::str() const {
    return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

Latent::Latent(Shape shape, float fill) : shape_(shape), data_(shape.size(), fill) {}

Latent::Latent(Shape shape, std::vector<float> values) : shape_(shape), data_(std::move(values)) {
    if (data_.size() != shape_.size()) {
        throw DimensionError("latent of shape " + shape_.str() + " given " +
                             std::to_string(data_.size()) + " values");
    }
}

bool Latent::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

namespace {

void require_same(const Latent& a, const Latent& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("shape mismatch: " + a.shape().str() + " vs " + b.shape().str());
    }
}

} // namespace

Latent lincomb(double a, const Latent& x, double b, const Latent& y) {
    require_same(x, y);
    Latent out(x.shape());
    auto o = out.values();
    auto xs = x.values();
    auto ys = y.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = static_cast<float>(a * xs[i] + b * ys[i]);
    }
    return out;
}

Latent scaled(double a, const Latent& x) {
    Latent out(x.shape());
    auto o = out.values();
    auto xs = x.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<float>(a * xs[i]);
    return out;
}

Latent gaussian_latent(Shape shape, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Latent out(shape);
    for (float& v : out.values()) v = static_cast<float>(rng.normal());
    return out;
}

double max_abs_diff(const Latent& a, const Latent& b) {
    require_same(a, b);
    double m = 0.0;
    auto as = a.values();
    auto bs = b.values();
    for (std::size_t i = 0; i < as.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(as[i]) - bs[i]));
    }
    return m;
}

double relative_l2(const Latent& a, const Latent& b) {
    require_same(a, b);
    double num = 0.0;
    double den = 0.0;
    auto as = a.values();
    auto bs = b.values();
    for (std::size_t i = 0; i < as.size(); ++i) {
        const double d = static_cast<double>(as[i]) - bs[i];
        num += d * d;
        den += static_cast<double>(bs[i]) * bs[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

Latent crop(const Latent& z, std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) {
    const Shape& s = z.shape();
    if (row0 + rows > s.height || col0 + cols > s.width) {
        throw DimensionError("crop " + std::to_string(rows) + "x" + std::to_string(cols) + " at (" +
                             std::to_string(row0) + "," + std::to_string(col0) + ") exceeds " + s.str());
    }
    Latent out(Shape{s.channels, rows, cols});
    for (std::size_t c = 0; c < s.channels; ++c) {
        for (std::size_t y = 0; y < rows; ++y) {
            for (std::size_t x = 0; x < cols; ++x) out.at(c, y, x) = z.at(c, row0 + y, col0 + x);
        }
    }
    return out;
}

void paste(Latent& dst, const Latent& patch, std::size_t row0, std::size_t col0) {
    const Shape& d = dst.shape();
    const Shape& p = patch.shape();
    if (p.channels != d.channels || row0 + p.height > d.height || col0 + p.width > d.width) {
        throw DimensionError("cannot paste " + p.str() + " into " + d.str());
    }
    for (std::size_t c = 0; c < p.channels; ++c) {
        for (std::size_t y = 0; y < p.height; ++y) {
            for (std::size_t x = 0; x < p.width; ++x) dst.at(c, row0 + y, col0 + x) = patch.at(c, y, x);
        }
    }
}

} // namespace midas
