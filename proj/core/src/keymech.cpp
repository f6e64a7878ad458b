#include "midas/keymech.hpp"

#include "midas/errors.hpp"
#include "midas/rng.hpp"

#include <Eigen/Householder>
#include <Eigen/QR>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

namespace midas {

namespace {

void require_dim(const OrthoKey& key, std::size_t n) {
    if (n != key.dim()) {
        throw DimensionError("key of dimension " + std::to_string(key.dim()) + " applied to vector of length " +
                             std::to_string(n));
    }
}

// Rows of the block are processed in chunks so very large blocks
// (8192 x 8192 for a 4x64x64 latent at strength 0.5) stream through cache.
constexpr std::ptrdiff_t kRowChunk = 256;

} // namespace

OrthoKey::OrthoKey(std::size_t dim, double strength, std::uint64_t seed, std::vector<std::uint32_t> positions,
                   BlockMatrix block)
    : dim_(dim), strength_(strength), seed_(seed), positions_(std::move(positions)),
      block_(std::make_shared<const BlockMatrix>(std::move(block))) {
    if (block_->rows() != block_->cols() || static_cast<std::size_t>(block_->rows()) != positions_.size()) {
        throw DimensionError("key block must be square with one row per position");
    }
}

bool operator==(const OrthoKey& a, const OrthoKey& b) {
    return a.dim_ == b.dim_ && a.strength_ == b.strength_ && a.seed_ == b.seed_ && a.positions_ == b.positions_ &&
           (a.block_ == b.block_ || *a.block_ == *b.block_);
}

std::size_t mixed_count(std::size_t d, double gamma) {
    return static_cast<std::size_t>(std::floor(gamma * static_cast<double>(d)));
}

OrthoKey build_random_basis(std::size_t d, double gamma, std::uint64_t seed) {
    if (d == 0) throw ConfigError("random basis dimension must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("random basis strength must lie in [0, 1]");
    if (d > UINT32_MAX) throw ConfigError("random basis dimension exceeds 32-bit positions");

    const std::size_t k = mixed_count(d, gamma);
    SplitMix64 rng(seed);
    const auto n = static_cast<Eigen::Index>(k);

    BlockMatrix block(n, n);
    if (k > 0) {
        Eigen::MatrixXf gauss(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) gauss(i, j) = static_cast<float>(rng.normal());
        }
        Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXf>> qr(gauss);
        Eigen::VectorXf r_diag = qr.matrixQR().diagonal();
        Eigen::MatrixXf q = qr.householderQ();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (r_diag(j) < 0.0f) q.col(j) = -q.col(j);
        }
        block = q;
    }

    std::vector<std::uint32_t> order(d);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t r = j + static_cast<std::size_t>(rng.below(d - j));
        std::swap(order[j], order[r]);
    }
    order.resize(k);
    return OrthoKey(d, gamma, seed, std::move(order), std::move(block));
}

std::vector<float> ortho_apply(const OrthoKey& key, std::span<const float> z) {
    require_dim(key, z.size());
    std::vector<float> out(z.begin(), z.end());
    const auto pos = key.positions();
    const auto n = static_cast<std::ptrdiff_t>(pos.size());
    if (n == 0) return out;

    std::vector<double> sub(pos.size());
    for (std::size_t b = 0; b < pos.size(); ++b) sub[b] = z[pos[b]];

    const BlockMatrix& block = key.block();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t chunk = 0; chunk < n; chunk += kRowChunk) {
        const std::ptrdiff_t end = std::min(n, chunk + kRowChunk);
        for (std::ptrdiff_t a = chunk; a < end; ++a) {
            const float* row = block.data() + a * n;
            double acc = 0.0;
            for (std::ptrdiff_t b = 0; b < n; ++b) acc += static_cast<double>(row[b]) * sub[b];
            out[pos[a]] = static_cast<float>(acc);
        }
    }
    return out;
}

std::vector<float> ortho_inverse(const OrthoKey& key, std::span<const float> z_enc) {
    require_dim(key, z_enc.size());
    std::vector<float> out(z_enc.begin(), z_enc.end());
    const auto pos = key.positions();
    const auto n = static_cast<std::ptrdiff_t>(pos.size());
    if (n == 0) return out;

    std::vector<double> sub(pos.size());
    for (std::size_t a = 0; a < pos.size(); ++a) sub[a] = z_enc[pos[a]];

    // out_b = sum_a block(a, b) * sub_a; accumulated column-chunk by column-chunk
    // so each thread owns a disjoint slice of the result.
    const BlockMatrix& block = key.block();
    std::vector<double> acc(pos.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t chunk = 0; chunk < n; chunk += kRowChunk) {
        const std::ptrdiff_t end = std::min(n, chunk + kRowChunk);
        for (std::ptrdiff_t a = 0; a < n; ++a) {
            const float* row = block.data() + a * n;
            const double s = sub[a];
            for (std::ptrdiff_t b = chunk; b < end; ++b) acc[b] += static_cast<double>(row[b]) * s;
        }
    }
    for (std::size_t b = 0; b < pos.size(); ++b) out[pos[b]] = static_cast<float>(acc[b]);
    return out;
}

namespace {

Eigen::MatrixXf gather_rows(const OrthoKey& key, const Eigen::MatrixXf& columns) {
    const auto pos = key.positions();
    Eigen::MatrixXf sub(static_cast<Eigen::Index>(pos.size()), columns.cols());
    for (std::size_t a = 0; a < pos.size(); ++a) sub.row(static_cast<Eigen::Index>(a)) = columns.row(pos[a]);
    return sub;
}

void scatter_rows(const OrthoKey& key, const Eigen::MatrixXf& sub, Eigen::MatrixXf& columns) {
    const auto pos = key.positions();
    for (std::size_t a = 0; a < pos.size(); ++a) columns.row(pos[a]) = sub.row(static_cast<Eigen::Index>(a));
}

} // namespace

Eigen::MatrixXf ortho_apply_columns(const OrthoKey& key, const Eigen::MatrixXf& columns) {
    require_dim(key, static_cast<std::size_t>(columns.rows()));
    Eigen::MatrixXf out = columns;
    if (key.mixed_count() == 0) return out;
    const Eigen::MatrixXf mixed = key.block() * gather_rows(key, columns);
    scatter_rows(key, mixed, out);
    return out;
}

Eigen::MatrixXf ortho_inverse_columns(const OrthoKey& key, const Eigen::MatrixXf& columns) {
    require_dim(key, static_cast<std::size_t>(columns.rows()));
    Eigen::MatrixXf out = columns;
    if (key.mixed_count() == 0) return out;
    const Eigen::MatrixXf mixed = key.block().transpose() * gather_rows(key, columns);
    scatter_rows(key, mixed, out);
    return out;
}

double orthonormality_error(const OrthoKey& key) {
    const auto n = static_cast<Eigen::Index>(key.mixed_count());
    if (n == 0) return 0.0;
    Eigen::MatrixXf gram = Eigen::MatrixXf::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(key.block());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double target = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(static_cast<double>(gram(i, j)) - target));
        }
    }
    return worst;
}

namespace {

template <typename T>
void put_le(std::uint8_t* dst, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

template <typename T>
T get_le(const std::uint8_t* src) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(src[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

} // namespace

std::array<std::uint8_t, kKeyRecordSize> serialize_key(const OrthoKey& key) {
    std::array<std::uint8_t, kKeyRecordSize> out{};
    std::memcpy(out.data(), "MKEY", 4);
    put_le<std::uint16_t>(out.data() + 4, kKeyRecordVersion);
    put_le<std::uint32_t>(out.data() + 6, static_cast<std::uint32_t>(key.dim()));
    put_le<double>(out.data() + 10, key.strength());
    put_le<std::uint64_t>(out.data() + 18, key.seed());
    return out;
}

OrthoKey deserialize_key(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kKeyRecordSize) {
        throw IoError("key record must be " + std::to_string(kKeyRecordSize) + " bytes, got " +
                      std::to_string(bytes.size()));
    }
    if (std::memcmp(bytes.data(), "MKEY", 4) != 0) throw IoError("key record has bad magic");
    const auto version = get_le<std::uint16_t>(bytes.data() + 4);
    if (version != kKeyRecordVersion) throw IoError("unsupported key record version " + std::to_string(version));
    const auto dim = get_le<std::uint32_t>(bytes.data() + 6);
    const auto strength = get_le<double>(bytes.data() + 10);
    const auto seed = get_le<std::uint64_t>(bytes.data() + 18);
    return build_random_basis(dim, strength, seed);
}

FlipKey::FlipKey(std::uint64_t seed, std::vector<std::int8_t> signs) : seed_(seed), signs_(std::move(signs)) {
    for (auto s : signs_) {
        if (s != 1 && s != -1) throw ConfigError("flip key entries must be +1 or -1");
    }
}

FlipKey build_flip(std::size_t d, std::uint64_t seed) {
    if (d == 0) throw ConfigError("flip key dimension must be positive");
    SplitMix64 rng(seed);
    std::vector<std::int8_t> signs(d);
    for (auto& s : signs) s = (rng.next() >> 63) ? std::int8_t{-1} : std::int8_t{1};
    return FlipKey(seed, std::move(signs));
}

std::vector<float> flip_apply(const FlipKey& key, std::span<const float> z) {
    if (z.size() != key.dim()) {
        throw DimensionError("flip key of dimension " + std::to_string(key.dim()) + " applied to vector of length " +
                             std::to_string(z.size()));
    }
    std::vector<float> out(z.size());
    const auto signs = key.signs();
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = signs[i] < 0 ? -z[i] : z[i];
    return out;
}

} // namespace midas
