#include "midas/pipeline.hpp"

#include "midas/backend.hpp"
#include "midas/errors.hpp"
#include "midas/metrics.hpp"
#include "midas/rng.hpp"

#include <cmath>
#include <future>

namespace midas {

namespace {

// Stream separation for the reference generator's initial noise, so the
// same public seed never reuses the public key's Gaussian draws.
constexpr std::uint64_t kRefNoiseDomain = 0x5245464E4F495345ULL;  // "REFNOISE"

} // namespace

std::pair<std::size_t, std::size_t> split_factors(std::size_t n) {
    if (n == 0) throw ConfigError("secret count must be positive");
    std::size_t n1 = 1;
    while (n1 * n1 < n) n1 *= 2;
    if (n % n1 != 0) {
        throw ConfigError("secret count " + std::to_string(n) + " does not split as a power-of-two grid (n1 = " +
                          std::to_string(n1) + ")");
    }
    return {n1, n / n1};
}

StegoConfig StegoConfig::defaults_for(std::size_t n) {
    StegoConfig cfg;
    cfg.n = n;
    std::tie(cfg.n1, cfg.n2) = split_factors(n);
    if (n == 1) {
        cfg.gamma_priv = 0.5;
        cfg.gamma_fuse = 0.0;
        cfg.smoothing_steps = 0;
    }
    return cfg;
}

void StegoConfig::validate() const {
    if (n == 0) throw ConfigError("secret count must be positive");
    if (n1 * n2 != n) {
        throw ConfigError("split factors " + std::to_string(n1) + " x " + std::to_string(n2) + " do not equal N = " +
                          std::to_string(n));
    }
    if (steps < 1) throw ConfigError("step count must be at least 1");
    if (!(xi_priv > 0.0 && xi_priv <= 1.0)) throw ConfigError("xi_priv must lie in (0, 1]");
    if (!(xi_pub > 0.0 && xi_pub <= 1.0)) throw ConfigError("xi_pub must lie in (0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    if (!(gamma_priv >= 0.0 && gamma_priv <= 1.0)) throw ConfigError("gamma_priv must lie in [0, 1]");
    if (!(gamma_fuse >= 0.0 && gamma_fuse <= 1.0)) throw ConfigError("gamma_fuse must lie in [0, 1]");
    if (sampler == Sampler::edict && !(edict_p > 0.5 && edict_p <= 1.0)) {
        throw ConfigError("EDICT mixing coefficient must lie in (0.5, 1]");
    }
    if (smoothing_steps < 0) throw ConfigError("smoothing steps must be nonnegative");
    if (extra_denoise_steps < 0 || extra_denoise_steps > steps) {
        throw ConfigError("extra denoising steps must lie in [0, T]");
    }
    const int k_priv = static_cast<int>(std::floor(xi_priv * steps + 1e-9));
    if (k_priv + smoothing_steps > steps) throw ConfigError("private window plus smoothing steps exceeds T");
    if (!(ref_weight >= 0.0 && ref_weight <= 1.0)) throw ConfigError("ref_weight must lie in [0, 1]");
}

Backend make_toy_backend(std::size_t latent_side, double sigma0) {
    if (latent_side == 0) throw ConfigError("toy latent side must be positive");
    return Backend{std::make_shared<ToyPredictor>(sigma0), std::make_shared<ToyCodec>(),
                   Shape{ToyCodec::kChannels, latent_side, latent_side}};
}

Backend make_remote_backend(const std::string& address, double guidance) {
    auto session = Session::connect(address);
    const BackendInfo info = session->info();
    return Backend{std::make_shared<RemotePredictor>(session, guidance, info.concurrency_safe),
                   std::make_shared<RemoteCodec>(session, info), info.latent};
}

Shape segment_shape(const Shape& base, std::size_t n1, std::size_t n2) {
    if (n1 == 0 || n2 == 0 || base.height % n1 != 0 || base.width % n2 != 0) {
        throw DimensionError("latent " + base.str() + " does not split into a " + std::to_string(n1) + " x " +
                             std::to_string(n2) + " grid");
    }
    return Shape{base.channels, base.height / n1, base.width / n2};
}

std::pair<std::size_t, std::size_t> segment_origin(const Shape& base, std::size_t n1, std::size_t n2, std::size_t j) {
    if (j < 1 || j > n1 * n2) throw ConfigError("segment index " + std::to_string(j) + " out of range");
    const Shape seg = segment_shape(base, n1, n2);
    return {((j - 1) / n2) * seg.height, ((j - 1) % n2) * seg.width};
}

Latent concat_segments(std::span<const Latent> segments, std::size_t n1, std::size_t n2) {
    if (segments.size() != n1 * n2) throw DimensionError("segment count does not match the grid");
    const Shape seg = segments.front().shape();
    const Shape base{seg.channels, seg.height * n1, seg.width * n2};
    Latent out(base);
    for (std::size_t j = 1; j <= segments.size(); ++j) {
        if (segments[j - 1].shape() != seg) throw DimensionError("segments differ in shape");
        const auto [row, col] = segment_origin(base, n1, n2, j);
        paste(out, segments[j - 1], row, col);
    }
    return out;
}

std::vector<Latent> split_segments(const Latent& z, std::size_t n1, std::size_t n2) {
    const Shape seg = segment_shape(z.shape(), n1, n2);
    std::vector<Latent> out;
    out.reserve(n1 * n2);
    for (std::size_t j = 1; j <= n1 * n2; ++j) {
        const auto [row, col] = segment_origin(z.shape(), n1, n2, j);
        out.push_back(crop(z, row, col, seg.height, seg.width));
    }
    return out;
}

Latent encrypt_latent(const Latent& z, const OrthoKey& key) {
    return Latent(z.shape(), ortho_apply(key, z.values()));
}

Latent decrypt_latent(const Latent& z, const OrthoKey& key) {
    return Latent(z.shape(), ortho_inverse(key, z.values()));
}

Latent fuse(const Latent& z_prot, const Latent& z_ref, const OrthoKey& pub_key, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    return lincomb(std::sqrt(alpha), encrypt_latent(z_prot, pub_key), std::sqrt(1.0 - alpha), z_ref);
}

Latent decompose(const Latent& z_pub, const Latent& z_ref, const OrthoKey& pub_key, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    const double s = std::sqrt(alpha);
    return decrypt_latent(lincomb(1.0 / s, z_pub, -std::sqrt(1.0 - alpha) / s, z_ref), pub_key);
}

namespace {

int window(const StegoConfig& cfg, double xi) { return static_cast<int>(std::floor(xi * cfg.steps + 1e-9)); }

struct Sampling {
    const NoisePredictor& pred;
    DiffusionSchedule sched;
    const StegoConfig& cfg;

    Latent invert(const Latent& z, int from, int to, const Condition& cond) const {
        if (from == to) return z;
        if (cfg.sampler == Sampler::ddim) return ddim_invert(z, from, to, pred, cond, sched);
        return edict_invert(LatentPair::twin(z), from, to, pred, cond, sched, cfg.edict_p).x;
    }

    Latent denoise(const Latent& z, int from, int to, const Condition& cond) const {
        if (from == to) return z;
        if (cfg.sampler == Sampler::ddim) return ddim_denoise(z, from, to, pred, cond, sched);
        return edict_denoise(LatentPair::twin(z), from, to, pred, cond, sched, cfg.edict_p).x;
    }
};

Sampling sampling_for(const Backend& backend, const StegoConfig& cfg) {
    return Sampling{*backend.predictor, make_schedule(cfg.steps, cfg.xi_priv), cfg};
}

Condition public_condition(const StegoConfig& cfg, const Reference& ref) {
    Condition cond = Condition::with_prompt(cfg.prompt);
    if (cfg.ref_weight > 0.0) {
        cond.ref_latent = ref.noisy;
        cond.ref_weight = cfg.ref_weight;
    }
    return cond;
}

// Runs fn(j) for j in [0, count), concurrently when the backend allows it.
template <typename Fn>
auto for_each_segment(const Backend& backend, std::size_t count, Fn fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out;
    out.reserve(count);
    if (backend.concurrency_safe() && count > 1) {
        std::vector<std::future<R>> jobs;
        for (std::size_t j = 0; j < count; ++j) jobs.push_back(std::async(std::launch::async, fn, j));
        for (auto& job : jobs) out.push_back(job.get());
    } else {
        for (std::size_t j = 0; j < count; ++j) out.push_back(fn(j));
    }
    return out;
}

} // namespace

Reference refgen(const Backend& backend, std::uint64_t pub_seed, const std::string& prompt, const StegoConfig& cfg) {
    cfg.validate();
    const Sampling s = sampling_for(backend, cfg);
    const Condition cond = Condition::with_prompt(prompt);
    const Latent noise = gaussian_latent(backend.latent, derive_seed(pub_seed, kRefNoiseDomain));
    Reference ref;
    ref.clean = ddim_denoise(noise, cfg.steps, 0, s.pred, cond, s.sched);
    ref.image = backend.codec->decode(ref.clean);
    ref.noisy = s.invert(backend.codec->encode(ref.image), 0, window(cfg, cfg.xi_priv), cond);
    return ref;
}

HideTrace hide_latents(const Backend& backend, std::span<const Latent> secret_latents, const StegoConfig& cfg,
                       const Reference& ref) {
    cfg.validate();
    if (secret_latents.size() != cfg.n) {
        throw DimensionError("expected " + std::to_string(cfg.n) + " secrets, got " +
                             std::to_string(secret_latents.size()));
    }
    if (cfg.priv_seeds.size() != cfg.n) {
        throw ConfigError("expected " + std::to_string(cfg.n) + " private seeds, got " +
                          std::to_string(cfg.priv_seeds.size()));
    }
    const Shape seg = segment_shape(backend.latent, cfg.n1, cfg.n2);
    for (const auto& z : secret_latents) {
        if (z.shape() != seg) {
            throw DimensionError("secret latent " + z.shape().str() + " does not match segment shape " + seg.str());
        }
    }
    if (ref.noisy.shape() != backend.latent) throw DimensionError("reference latent does not match the backend");

    const Sampling s = sampling_for(backend, cfg);
    const int k_priv = window(cfg, cfg.xi_priv);
    const int k_pub = window(cfg, cfg.xi_pub);
    const Condition null_text = Condition::null_text();

    HideTrace trace;
    trace.secret_latents.assign(secret_latents.begin(), secret_latents.end());

    struct SegmentOut {
        Latent z_sec;
        Latent z_prot;
    };
    auto segments = for_each_segment(backend, cfg.n, [&](std::size_t j) {
        SegmentOut out;
        out.z_sec = s.invert(secret_latents[j], 0, k_priv, null_text);
        const OrthoKey key = build_random_basis(seg.size(), cfg.gamma_priv, cfg.priv_seeds[j]);
        Latent prot = encrypt_latent(out.z_sec, key);
        out.z_prot = ddim_invert(std::move(prot), k_priv, k_priv + cfg.smoothing_steps, s.pred, null_text, s.sched);
        return out;
    });
    for (auto& segment : segments) {
        trace.z_sec.push_back(std::move(segment.z_sec));
        trace.z_prot.push_back(std::move(segment.z_prot));
    }

    trace.z_prot_full = concat_segments(trace.z_prot, cfg.n1, cfg.n2);
    const OrthoKey pub_key = build_random_basis(backend.latent.size(), cfg.gamma_fuse, cfg.pub_seed);
    trace.z_pub = fuse(trace.z_prot_full, ref.noisy, pub_key, cfg.alpha);
    trace.stego_latent = s.denoise(trace.z_pub, k_pub, 0, public_condition(cfg, ref));
    return trace;
}

namespace {

std::vector<Latent> encode_secrets(const Backend& backend, std::span<const ImageBuffer> secrets,
                                   const StegoConfig& cfg) {
    const std::size_t w = backend.image_width();
    const std::size_t h = backend.image_height();
    std::vector<Latent> latents;
    for (std::size_t i = 0; i < secrets.size(); ++i) {
        const ImageBuffer& img = secrets[i];
        if (img.width != w || img.height != h) {
            throw DimensionError("secret " + std::to_string(i + 1) + " is " + std::to_string(img.width) + "x" +
                                 std::to_string(img.height) + ", backend expects " + std::to_string(w) + "x" +
                                 std::to_string(h));
        }
        latents.push_back(backend.codec->encode(downsample(img, cfg.n1, cfg.n2)));
    }
    return latents;
}

} // namespace

HideResult hide(const Backend& backend, std::span<const ImageBuffer> secrets, const StegoConfig& cfg,
                const Reference& ref) {
    cfg.validate();
    if (secrets.size() != cfg.n) {
        throw DimensionError("expected " + std::to_string(cfg.n) + " secrets, got " + std::to_string(secrets.size()));
    }
    const auto latents = encode_secrets(backend, secrets, cfg);
    HideResult result;
    result.trace = hide_latents(backend, latents, cfg, ref);
    result.stego = backend.codec->decode(result.trace.stego_latent);
    return result;
}

HideResult hide(const Backend& backend, std::span<const ImageBuffer> secrets, const StegoConfig& cfg) {
    return hide(backend, secrets, cfg, refgen(backend, cfg.pub_seed, cfg.prompt, cfg));
}

RevealReport reveal_latent(const Backend& backend, const Latent& received, std::size_t user,
                           std::uint64_t priv_seed, const StegoConfig& cfg, const Reference& ref) {
    cfg.validate();
    if (user < 1 || user > cfg.n) {
        throw ConfigError("user index " + std::to_string(user) + " outside [1, " + std::to_string(cfg.n) + "]");
    }
    if (received.shape() != backend.latent) {
        throw DimensionError("received latent " + received.shape().str() + " does not match backend latent " +
                             backend.latent.str());
    }
    const Sampling s = sampling_for(backend, cfg);
    const int k_priv = window(cfg, cfg.xi_priv);
    const int k_pub = window(cfg, cfg.xi_pub);
    const Condition pub_cond = public_condition(cfg, ref);
    const Condition null_text = Condition::null_text();

    Latent z = received;
    if (cfg.extra_denoise_steps > 0) {
        z = ddim_denoise(std::move(z), cfg.extra_denoise_steps, 0, s.pred, pub_cond, s.sched);
    }

    RevealReport report;
    report.user = user;
    report.z_pub = s.invert(z, 0, k_pub, pub_cond);

    const OrthoKey pub_key = build_random_basis(backend.latent.size(), cfg.gamma_fuse, cfg.pub_seed);
    Latent prot = decompose(report.z_pub, ref.noisy, pub_key, cfg.alpha);
    report.z_prot = ddim_denoise(std::move(prot), k_priv + cfg.smoothing_steps, k_priv, s.pred, null_text, s.sched);

    const Shape seg = segment_shape(backend.latent, cfg.n1, cfg.n2);
    const OrthoKey key = build_random_basis(seg.size(), cfg.gamma_priv, priv_seed);
    const auto encrypted = split_segments(report.z_prot, cfg.n1, cfg.n2);
    std::vector<Latent> decrypted;
    decrypted.reserve(encrypted.size());
    for (const auto& part : encrypted) decrypted.push_back(decrypt_latent(part, key));

    std::vector<Latent> clean;
    if (cfg.joint_denoise) {
        clean = split_segments(s.denoise(concat_segments(decrypted, cfg.n1, cfg.n2), k_priv, 0, null_text), cfg.n1,
                               cfg.n2);
    } else {
        clean = for_each_segment(backend, decrypted.size(),
                                 [&](std::size_t j) { return s.denoise(decrypted[j], k_priv, 0, null_text); });
    }

    for (std::size_t j = 0; j < decrypted.size(); ++j) {
        SegmentReport part;
        part.index = j + 1;
        part.corr_vs_undecrypted = latent_corr(decrypted[j], encrypted[j]);
        part.image = upsample(backend.codec->decode(clean[j]), cfg.n1, cfg.n2);
        part.noisy = std::move(decrypted[j]);
        part.clean = std::move(clean[j]);
        report.segments.push_back(std::move(part));
    }
    return report;
}

RevealReport reveal(const Backend& backend, const ImageBuffer& stego, std::size_t user, std::uint64_t priv_seed,
                    const StegoConfig& cfg, const Reference& ref) {
    return reveal_latent(backend, backend.codec->encode(stego), user, priv_seed, cfg, ref);
}

RevealReport reveal(const Backend& backend, const ImageBuffer& stego, std::size_t user, std::uint64_t priv_seed,
                    const StegoConfig& cfg) {
    return reveal(backend, stego, user, priv_seed, cfg, refgen(backend, cfg.pub_seed, cfg.prompt, cfg));
}

} // namespace midas
