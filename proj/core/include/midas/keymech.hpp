#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace midas {

using BlockMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Seeded orthonormal transform acting on floor(strength * dim) coordinates.
///
/// The implied dim x dim matrix Q equals the identity except on the rows and
/// columns listed in positions(), where it equals block(). It is never
/// materialized densely. Keys are immutable; copies share the block.
class OrthoKey {
public:
    OrthoKey(std::size_t dim, double strength, std::uint64_t seed, std::vector<std::uint32_t> positions,
             BlockMatrix block);

    std::size_t dim() const noexcept { return dim_; }
    double strength() const noexcept { return strength_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t mixed_count() const noexcept { return positions_.size(); }

    /// positions()[a] is the coordinate mixed by row/column a of block().
    std::span<const std::uint32_t> positions() const noexcept { return positions_; }
    const BlockMatrix& block() const noexcept { return *block_; }

    friend bool operator==(const OrthoKey& a, const OrthoKey& b);

private:
    std::size_t dim_;
    double strength_;
    std::uint64_t seed_;
    std::vector<std::uint32_t> positions_;
    std::shared_ptr<const BlockMatrix> block_;
};

/// floor(gamma * d) as used for the mixed block size.
std::size_t mixed_count(std::size_t d, double gamma);

/// Builds the Random Basis key for (d, gamma, seed).
///
/// Draws floor(gamma*d)^2 standard normals column-major from SplitMix64(seed),
/// QR-factorizes them with the nonnegative-diagonal-R convention (column j of Q
/// negated when R[j][j] < 0), then continues the same stream with a partial
/// Fisher-Yates shuffle of [0, d) whose first floor(gamma*d) entries become the
/// positions. gamma = 0 gives the identity.
OrthoKey build_random_basis(std::size_t d, double gamma, std::uint64_t seed);

/// z with its positions() subvector replaced by block * subvector.
std::vector<float> ortho_apply(const OrthoKey& key, std::span<const float> z);
/// Exact adjoint of ortho_apply: block transposed on the same positions.
std::vector<float> ortho_inverse(const OrthoKey& key, std::span<const float> z_enc);

/// Applies the key to every column of `columns` (dim x n) in one product.
Eigen::MatrixXf ortho_apply_columns(const OrthoKey& key, const Eigen::MatrixXf& columns);
Eigen::MatrixXf ortho_inverse_columns(const OrthoKey& key, const Eigen::MatrixXf& columns);

/// max |Q Q^T - I| over all entries of the implied matrix. Outside the
/// mixed coordinates Q Q^T is exactly the identity, so only the block is
/// multiplied.
double orthonormality_error(const OrthoKey& key);

/// Fixed-size record: "MKEY", u16 version, u32 dim, f64 strength, u64 seed,
/// little-endian. Block and positions are rebuilt on load.
inline constexpr std::size_t kKeyRecordSize = 4 + 2 + 4 + 8 + 8;
inline constexpr std::uint16_t kKeyRecordVersion = 1;

std::array<std::uint8_t, kKeyRecordSize> serialize_key(const OrthoKey& key);
OrthoKey deserialize_key(std::span<const std::uint8_t> bytes);

/// Noise Flip baseline: elementwise multiplication by seeded signs.
class FlipKey {
public:
    FlipKey(std::uint64_t seed, std::vector<std::int8_t> signs);

    std::size_t dim() const noexcept { return signs_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const std::int8_t> signs() const noexcept { return signs_; }

private:
    std::uint64_t seed_;
    std::vector<std::int8_t> signs_;
};

/// Sign i is -1 when the top bit of the i-th SplitMix64(seed) output is set.
FlipKey build_flip(std::size_t d, std::uint64_t seed);
/// Its own inverse.
std::vector<float> flip_apply(const FlipKey& key, std::span<const float> z);

} // namespace midas
