#include "midas/channel.hpp"

#include "midas/errors.hpp"
#include "midas/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace midas {

Degradation Degradation::parse(const std::string& text) {
    if (text.empty() || text == "none") return {};
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("degradation must be gaussian:<sigma> or jpeg:<quality>");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    Degradation d;
    try {
        std::size_t used = 0;
        if (kind == "gaussian") {
            d.kind = Kind::gaussian;
            d.sigma = std::stod(arg, &used);
            if (d.sigma < 0.0) throw ConfigError("gaussian sigma must be nonnegative");
        } else if (kind == "jpeg") {
            d.kind = Kind::jpeg;
            d.quality = std::stoi(arg, &used);
            if (d.quality < 1 || d.quality > 100) throw ConfigError("jpeg quality must lie in [1, 100]");
        } else {
            throw ConfigError("unknown degradation '" + kind + "'");
        }
        if (used != arg.size()) throw ConfigError("trailing characters in degradation '" + text + "'");
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse degradation '" + text + "'");
    }
    return d;
}

ImageBuffer apply_gaussian(const ImageBuffer& img, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ConfigError("gaussian sigma must be nonnegative");
    if (sigma == 0.0) return img;
    SplitMix64 rng(seed);
    ImageBuffer out = img;
    for (auto& v : out.data) {
        const double noisy = v + sigma * rng.normal();
        v = static_cast<std::uint8_t>(std::clamp(std::lround(noisy), 0L, 255L));
    }
    return out;
}

namespace {

using Table = std::array<int, 64>;

constexpr Table kLumaTable = {16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
                              14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
                              18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
                              49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr Table kChromaTable = {17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
                                24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
                                99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
                                99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// IJG quality scaling.
Table scaled_table(const Table& base, int quality) {
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    Table out{};
    for (std::size_t i = 0; i < 64; ++i) out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
    return out;
}

struct DctBasis {
    std::array<double, 64> c{};  // c[u*8 + x] = C(u)/2 cos((2x+1) u pi / 16)
    DctBasis() {
        for (int u = 0; u < 8; ++u) {
            const double cu = u == 0 ? std::sqrt(0.5) : 1.0;
            for (int x = 0; x < 8; ++x) {
                c[static_cast<std::size_t>(u * 8 + x)] = 0.5 * cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
            }
        }
    }
};

const DctBasis& basis() {
    static const DctBasis b;
    return b;
}

// In-place quantization round trip of one 8x8 block (row-major, level-shifted).
void quantize_block(std::array<double, 64>& block, const Table& table) {
    const auto& c = basis().c;
    std::array<double, 64> tmp{};
    std::array<double, 64> coef{};
    // Rows then columns.
    for (int y = 0; y < 8; ++y) {
        for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int x = 0; x < 8; ++x) s += c[u * 8 + x] * block[y * 8 + x];
            tmp[y * 8 + u] = s;
        }
    }
    for (int v = 0; v < 8; ++v) {
        for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int y = 0; y < 8; ++y) s += c[v * 8 + y] * tmp[y * 8 + u];
            const double q = table[static_cast<std::size_t>(v * 8 + u)];
            coef[v * 8 + u] = std::round(s / q) * q;
        }
    }
    for (int y = 0; y < 8; ++y) {
        for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v) s += c[v * 8 + y] * coef[v * 8 + u];
            tmp[y * 8 + u] = s;
        }
    }
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u) s += c[u * 8 + x] * tmp[y * 8 + u];
            block[y * 8 + x] = s;
        }
    }
}

} // namespace

ImageBuffer apply_jpeg(const ImageBuffer& img, int quality) {
    if (quality < 1 || quality > 100) throw ConfigError("jpeg quality must lie in [1, 100]");
    const std::size_t w = img.width;
    const std::size_t h = img.height;
    if (w == 0 || h == 0) return img;

    std::array<std::vector<double>, 3> planes;
    for (auto& p : planes) p.resize(w * h);
    for (std::size_t i = 0; i < w * h; ++i) {
        const double r = img.data[3 * i];
        const double g = img.data[3 * i + 1];
        const double b = img.data[3 * i + 2];
        planes[0][i] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
        planes[1][i] = -0.168736 * r - 0.331264 * g + 0.5 * b;
        planes[2][i] = 0.5 * r - 0.418688 * g - 0.081312 * b;
    }

    const Table luma = scaled_table(kLumaTable, quality);
    const Table chroma = scaled_table(kChromaTable, quality);
    for (std::size_t p = 0; p < 3; ++p) {
        const Table& table = p == 0 ? luma : chroma;
        auto& plane = planes[p];
        for (std::size_t by = 0; by < h; by += 8) {
            for (std::size_t bx = 0; bx < w; bx += 8) {
                std::array<double, 64> block{};
                for (std::size_t y = 0; y < 8; ++y) {
                    for (std::size_t x = 0; x < 8; ++x) {
                        const std::size_t sy = std::min(by + y, h - 1);
                        const std::size_t sx = std::min(bx + x, w - 1);
                        block[y * 8 + x] = plane[sy * w + sx];
                    }
                }
                quantize_block(block, table);
                for (std::size_t y = 0; y < 8 && by + y < h; ++y) {
                    for (std::size_t x = 0; x < 8 && bx + x < w; ++x) plane[(by + y) * w + bx + x] = block[y * 8 + x];
                }
            }
        }
    }

    ImageBuffer out(w, h);
    auto to_byte = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
    for (std::size_t i = 0; i < w * h; ++i) {
        const double y = planes[0][i] + 128.0;
        const double cb = planes[1][i];
        const double cr = planes[2][i];
        out.data[3 * i] = to_byte(y + 1.402 * cr);
        out.data[3 * i + 1] = to_byte(y - 0.344136 * cb - 0.714136 * cr);
        out.data[3 * i + 2] = to_byte(y + 1.772 * cb);
    }
    return out;
}

ImageBuffer apply_degradation(const ImageBuffer& img, const Degradation& d, std::uint64_t seed) {
    switch (d.kind) {
    case Degradation::Kind::none:
        return img;
    case Degradation::Kind::gaussian:
        return apply_gaussian(img, d.sigma, seed);
    case Degradation::Kind::jpeg:
        return apply_jpeg(img, d.quality);
    }
    return img;
}

} // namespace midas
