#pragma once

#include "midas/codec.hpp"
#include "midas/diffusion.hpp"
#include "midas/keymech.hpp"
#include "midas/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace midas {

enum class Sampler { edict, ddim };

/// Every knob of one hide/reveal job. Defaults are the N > 1 settings; use
/// defaults_for(n) to get the N = 1 variant.
struct StegoConfig {
    std::size_t n = 2;
    std::size_t n1 = 2;
    std::size_t n2 = 1;
    int steps = 50;
    double xi_priv = 0.4;
    double xi_pub = 0.7;
    double alpha = 0.95;
    double gamma_priv = 0.4;
    double gamma_fuse = 0.5;
    double edict_p = 0.93;
    int smoothing_steps = 5;
    int extra_denoise_steps = 0;
    std::vector<std::uint64_t> priv_seeds;
    std::uint64_t pub_seed = 0;
    std::string prompt;
    bool joint_denoise = true;
    Sampler sampler = Sampler::edict;
    /// Weight of the reference latent in the public-stage condition.
    double ref_weight = 0.3;
    double guidance = 7.5;

    /// Settings for n secrets: split factors from split_factors(n); for n = 1
    /// gamma_fuse = 0, gamma_priv = 0.5 and no smoothing steps.
    static StegoConfig defaults_for(std::size_t n);

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// (n1, n2) with n1 the smallest power of two >= sqrt(n) and n2 = n / n1.
std::pair<std::size_t, std::size_t> split_factors(std::size_t n);

/// Predictor, codec and base latent shape the pipeline runs on.
struct Backend {
    std::shared_ptr<const NoisePredictor> predictor;
    std::shared_ptr<const LatentCodec> codec;
    Shape latent;

    /// Image size the base latent decodes to.
    std::size_t image_width() const noexcept { return latent.width * codec->scale(); }
    std::size_t image_height() const noexcept { return latent.height * codec->scale(); }
    bool concurrency_safe() const noexcept { return predictor->concurrency_safe() && codec->concurrency_safe(); }
};

/// Toy denoiser + toy codec; the base latent is 4 x side x side.
Backend make_toy_backend(std::size_t latent_side = 16, double sigma0 = 0.5);
/// Connects to a protocol server and adopts its advertised dimensions.
Backend make_remote_backend(const std::string& address, double guidance = 7.5);

/// Top-left latent cell of 1-based segment j: row-major over the n1 x n2 grid.
std::pair<std::size_t, std::size_t> segment_origin(const Shape& base, std::size_t n1, std::size_t n2, std::size_t j);
Shape segment_shape(const Shape& base, std::size_t n1, std::size_t n2);
Latent concat_segments(std::span<const Latent> segments, std::size_t n1, std::size_t n2);
std::vector<Latent> split_segments(const Latent& z, std::size_t n1, std::size_t n2);

/// sqrt(alpha) * Q z_prot + sqrt(1 - alpha) * z_ref.
Latent fuse(const Latent& z_prot, const Latent& z_ref, const OrthoKey& pub_key, double alpha);
/// Q^T (z_pub - sqrt(1 - alpha) z_ref) / sqrt(alpha): the exact inverse of fuse.
Latent decompose(const Latent& z_pub, const Latent& z_ref, const OrthoKey& pub_key, double alpha);

Latent encrypt_latent(const Latent& z, const OrthoKey& key);
Latent decrypt_latent(const Latent& z, const OrthoKey& key);

struct Reference {
    ImageBuffer image;  ///< I_ref
    Latent clean;       ///< latent I_ref was decoded from
    Latent noisy;       ///< z_ref: I_ref inverted to step floor(xi_priv T)
};

/// Deterministic reference image and latent from the public seed and prompt.
Reference refgen(const Backend& backend, std::uint64_t pub_seed, const std::string& prompt, const StegoConfig& cfg);

/// Intermediate latents of a hide run, for diagnostics and tests.
struct HideTrace {
    std::vector<Latent> secret_latents;  ///< encode(downsample(I_sec^i))
    std::vector<Latent> z_sec;           ///< after private inversion
    std::vector<Latent> z_prot;          ///< after encryption and forward smoothing
    Latent z_prot_full;
    Latent z_pub;
    Latent stego_latent;                 ///< latent decoded into the stego image
};

struct HideResult {
    ImageBuffer stego;
    HideTrace trace;
};

/// Latent-level hiding stage; `secret_latents` are already encoded segments.
HideTrace hide_latents(const Backend& backend, std::span<const Latent> secret_latents, const StegoConfig& cfg,
                       const Reference& ref);
HideResult hide(const Backend& backend, std::span<const ImageBuffer> secrets, const StegoConfig& cfg);
HideResult hide(const Backend& backend, std::span<const ImageBuffer> secrets, const StegoConfig& cfg,
                const Reference& ref);

struct SegmentReport {
    std::size_t index = 0;       ///< 1-based segment j
    ImageBuffer image;           ///< reconstruction of I_sec^j by this user
    Latent noisy;                ///< decrypted segment at step floor(xi_priv T)
    Latent clean;                ///< after the final denoise
    /// Correlation between this segment with and without the user's
    /// decryption; near 1 means the key barely touched it.
    double corr_vs_undecrypted = 0.0;
};

struct RevealReport {
    std::size_t user = 0;  ///< 1-based designated index i
    std::vector<SegmentReport> segments;
    Latent z_pub;          ///< recovered public latent
    Latent z_prot;         ///< after decomposition and backward smoothing
};

/// Latent-level reconstruction stage starting from the received latent.
RevealReport reveal_latent(const Backend& backend, const Latent& received, std::size_t user,
                           std::uint64_t priv_seed, const StegoConfig& cfg, const Reference& ref);
RevealReport reveal(const Backend& backend, const ImageBuffer& stego, std::size_t user, std::uint64_t priv_seed,
                    const StegoConfig& cfg);
RevealReport reveal(const Backend& backend, const ImageBuffer& stego, std::size_t user, std::uint64_t priv_seed,
                    const StegoConfig& cfg, const Reference& ref);

} // namespace midas
