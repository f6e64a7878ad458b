#include "midas/metrics.hpp"

#include "midas/errors.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace midas {

namespace {

constexpr std::size_t kWindow = 8;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void require_same_dims(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionError("image sizes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                             " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
    }
}

std::vector<double> luminance(const ImageBuffer& img) {
    std::vector<double> y(img.width * img.height);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
    }
    return y;
}

struct WindowStats {
    double mean_a, mean_b, var_a, var_b, cov;
};

// Calls fn(stats) for every kWindow x kWindow window, stride 1.
template <typename Fn>
double mean_over_windows(const ImageBuffer& a, const ImageBuffer& b, Fn fn) {
    require_same_dims(a, b);
    if (a.width < kWindow || a.height < kWindow) {
        throw DimensionError("images smaller than the 8x8 SSIM window");
    }
    const auto ya = luminance(a);
    const auto yb = luminance(b);
    const std::size_t w = a.width;
    const std::size_t h = a.height;

    // Summed-area tables of a, b, a^2, b^2, ab with a zero border row/column.
    const std::size_t sw = w + 1;
    std::vector<double> sa(sw * (h + 1)), sb(sa.size()), saa(sa.size()), sbb(sa.size()), sab(sa.size());
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double va = ya[y * w + x];
            const double vb = yb[y * w + x];
            const std::size_t i = (y + 1) * sw + (x + 1);
            const std::size_t up = y * sw + (x + 1);
            const std::size_t left = (y + 1) * sw + x;
            const std::size_t diag = y * sw + x;
            sa[i] = va + sa[up] + sa[left] - sa[diag];
            sb[i] = vb + sb[up] + sb[left] - sb[diag];
            saa[i] = va * va + saa[up] + saa[left] - saa[diag];
            sbb[i] = vb * vb + sbb[up] + sbb[left] - sbb[diag];
            sab[i] = va * vb + sab[up] + sab[left] - sab[diag];
        }
    }
    auto box = [&](const std::vector<double>& s, std::size_t y, std::size_t x) {
        return s[(y + kWindow) * sw + (x + kWindow)] - s[y * sw + (x + kWindow)] - s[(y + kWindow) * sw + x] +
               s[y * sw + x];
    };

    constexpr double n = kWindow * kWindow;
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t y = 0; y + kWindow <= h; ++y) {
        for (std::size_t x = 0; x + kWindow <= w; ++x) {
            WindowStats st;
            st.mean_a = box(sa, y, x) / n;
            st.mean_b = box(sb, y, x) / n;
            st.var_a = std::max(0.0, box(saa, y, x) / n - st.mean_a * st.mean_a);
            st.var_b = std::max(0.0, box(sbb, y, x) / n - st.mean_b * st.mean_b);
            st.cov = box(sab, y, x) / n - st.mean_a * st.mean_b;
            total += fn(st);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

} // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_dims(a, b);
    if (a.data.empty()) throw DimensionError("PSNR of empty images");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        sse += d * d;
    }
    if (sse == 0.0) return kPsnrCap;
    const double mse = sse / static_cast<double>(a.data.size());
    return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    return mean_over_windows(a, b, [](const WindowStats& s) {
        return ((2.0 * s.mean_a * s.mean_b + kC1) * (2.0 * s.cov + kC2)) /
               ((s.mean_a * s.mean_a + s.mean_b * s.mean_b + kC1) * (s.var_a + s.var_b + kC2));
    });
}

double s_component(const ImageBuffer& a, const ImageBuffer& b) {
    constexpr double c = kC2 / 2.0;
    return mean_over_windows(a, b, [](const WindowStats& s) { return (2.0 * s.cov + c) / (s.var_a + s.var_b + c); });
}

double pearson(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw DimensionError("correlation of vectors with different lengths");
    if (a.empty()) throw DimensionError("correlation of empty vectors");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double latent_corr(const Latent& a, const Latent& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("latent shapes differ: " + a.shape().str() + " vs " + b.shape().str());
    }
    return pearson(a.values(), b.values());
}

MetricReport measure(std::string name, const ImageBuffer& reference, const ImageBuffer& test, const Latent& z_ref,
                     const Latent& z_test) {
    return MetricReport{std::move(name), psnr(reference, test), ssim(reference, test), s_component(reference, test),
                        latent_corr(z_ref, z_test)};
}

void write_metrics_csv(std::ostream& out, std::span<const MetricReport> rows) {
    out << "name,psnr,ssim,s,corr\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line << std::fixed << std::setprecision(6) << r.name << ',' << r.psnr << ',' << r.ssim << ',' << r.s << ','
             << r.corr << '\n';
        out << line.str();
    }
}

} // namespace midas
