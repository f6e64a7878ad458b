#include "midas/codec.hpp"

#include "midas/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace midas {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace

ImageBuffer downsample(const ImageBuffer& img, std::size_t n1, std::size_t n2) {
    if (n1 == 0 || n2 == 0) throw ConfigError("downsampling factors must be positive");
    if (img.height % n1 != 0 || img.width % n2 != 0) {
        throw DimensionError("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                             " is not divisible by factors (" + std::to_string(n1) + ", " + std::to_string(n2) + ")");
    }
    ImageBuffer out(img.width / n2, img.height / n1);
    const double inv = 1.0 / static_cast<double>(n1 * n2);
    for (std::size_t y = 0; y < out.height; ++y) {
        for (std::size_t x = 0; x < out.width; ++x) {
            for (std::size_t ch = 0; ch < 3; ++ch) {
                unsigned sum = 0;
                for (std::size_t dy = 0; dy < n1; ++dy) {
                    for (std::size_t dx = 0; dx < n2; ++dx) sum += img.at(y * n1 + dy, x * n2 + dx, ch);
                }
                out.at(y, x, ch) = to_byte(sum * inv);
            }
        }
    }
    return out;
}

ImageBuffer upsample(const ImageBuffer& img, std::size_t n1, std::size_t n2) {
    if (n1 == 0 || n2 == 0) throw ConfigError("upsampling factors must be positive");
    ImageBuffer out(img.width * n2, img.height * n1);
    if (img.width == 0 || img.height == 0) return out;
    const double max_y = static_cast<double>(img.height - 1);
    const double max_x = static_cast<double>(img.width - 1);
    for (std::size_t y = 0; y < out.height; ++y) {
        const double sy = std::clamp((y + 0.5) / static_cast<double>(n1) - 0.5, 0.0, max_y);
        const auto y0 = static_cast<std::size_t>(sy);
        const std::size_t y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t x = 0; x < out.width; ++x) {
            const double sx = std::clamp((x + 0.5) / static_cast<double>(n2) - 0.5, 0.0, max_x);
            const auto x0 = static_cast<std::size_t>(sx);
            const std::size_t x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - static_cast<double>(x0);
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const double top = img.at(y0, x0, ch) * (1.0 - fx) + img.at(y0, x1, ch) * fx;
                const double bottom = img.at(y1, x0, ch) * (1.0 - fx) + img.at(y1, x1, ch) * fx;
                out.at(y, x, ch) = to_byte(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    return out;
}

Latent ToyCodec::encode(const ImageBuffer& img) const {
    if (img.width % kScale != 0 || img.height % kScale != 0 || img.width == 0 || img.height == 0) {
        throw DimensionError("toy codec needs image sides divisible by " + std::to_string(kScale) + ", got " +
                             std::to_string(img.width) + "x" + std::to_string(img.height));
    }
    const Shape shape{kChannels, img.height / kScale, img.width / kScale};
    Latent z(shape);
    constexpr double inv_area = 1.0 / (kScale * kScale);
    for (std::size_t y = 0; y < shape.height; ++y) {
        for (std::size_t x = 0; x < shape.width; ++x) {
            double rgb[3] = {0.0, 0.0, 0.0};
            for (std::size_t dy = 0; dy < kScale; ++dy) {
                for (std::size_t dx = 0; dx < kScale; ++dx) {
                    for (std::size_t ch = 0; ch < 3; ++ch) {
                        rgb[ch] += img.at(y * kScale + dy, x * kScale + dx, ch) / 127.5 - 1.0;
                    }
                }
            }
            for (std::size_t ch = 0; ch < 3; ++ch) {
                rgb[ch] *= inv_area;
                z.at(ch, y, x) = static_cast<float>(rgb[ch]);
            }
            z.at(3, y, x) = static_cast<float>(0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]);
        }
    }
    return z;
}

ImageBuffer ToyCodec::decode(const Latent& z) const {
    const Shape& s = z.shape();
    if (s.channels != kChannels) {
        throw DimensionError("toy codec decodes " + std::to_string(kChannels) + "-channel latents, got " + s.str());
    }
    ImageBuffer img(s.width * kScale, s.height * kScale);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            for (std::size_t ch = 0; ch < 3; ++ch) {
                img.at(y, x, ch) = to_byte((static_cast<double>(z.at(ch, y / kScale, x / kScale)) + 1.0) * 127.5);
            }
        }
    }
    return img;
}

Latent toy_encode(const ImageBuffer& img) { return ToyCodec{}.encode(img); }
ImageBuffer toy_decode(const Latent& z) { return ToyCodec{}.decode(z); }

namespace {

constexpr std::uint16_t kLatentVersion = 1;
constexpr std::size_t kLatentHeader = 4 + 2 + 3 * 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

} // namespace

std::vector<std::uint8_t> serialize_latent(const Latent& z) {
    std::vector<std::uint8_t> out;
    out.reserve(kLatentHeader + 4 * z.size());
    for (char c : {'M', 'L', 'A', 'T'}) out.push_back(static_cast<std::uint8_t>(c));
    out.push_back(static_cast<std::uint8_t>(kLatentVersion & 0xFF));
    out.push_back(static_cast<std::uint8_t>(kLatentVersion >> 8));
    put_u32(out, static_cast<std::uint32_t>(z.shape().channels));
    put_u32(out, static_cast<std::uint32_t>(z.shape().height));
    put_u32(out, static_cast<std::uint32_t>(z.shape().width));
    for (float v : z.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Latent deserialize_latent(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kLatentHeader || std::memcmp(bytes.data(), "MLAT", 4) != 0) {
        throw IoError("not a latent record (bad magic or truncated header)");
    }
    const auto version = static_cast<std::uint16_t>(bytes[4] | bytes[5] << 8);
    if (version != kLatentVersion) throw IoError("unsupported latent record version " + std::to_string(version));
    const Shape shape{get_u32(bytes.data() + 6), get_u32(bytes.data() + 10), get_u32(bytes.data() + 14)};
    if (bytes.size() != kLatentHeader + 4 * shape.size()) {
        throw IoError("latent record of shape " + shape.str() + " has " + std::to_string(bytes.size()) + " bytes");
    }
    std::vector<float> values(shape.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = std::bit_cast<float>(get_u32(bytes.data() + kLatentHeader + 4 * i));
    }
    return Latent(shape, std::move(values));
}

void write_latent(const std::string& path, const Latent& z) {
    const auto bytes = serialize_latent(z);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

Latent read_latent(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_latent(bytes);
}

} // namespace midas
