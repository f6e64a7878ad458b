#pragma once

#include "midas/tensor.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace midas {

/// Base training schedule the sampling schedule is subsampled from.
struct BaseSchedule {
    int train_steps = 1000;
    double beta_start = 0.00085;
    double beta_end = 0.012;
};

/// T-step DDIM schedule. alpha_bar[0] = 1 and alpha_bar[t] for t >= 1 is the
/// base cumulative product at training step train_step(t).
class DiffusionSchedule {
public:
    DiffusionSchedule(int steps, double xi, BaseSchedule base = {});

    int steps() const noexcept { return steps_; }
    double xi() const noexcept { return xi_; }
    const BaseSchedule& base() const noexcept { return base_; }

    /// floor(xi * T): the last step index of the partial run [0, xi T].
    int active_steps() const noexcept;
    /// Same alphas, different partial-run fraction.
    DiffusionSchedule with_xi(double xi) const;

    double alpha_bar(int t) const;
    const std::vector<double>& alpha_bars() const noexcept { return alpha_bar_; }
    /// Training-schedule index queried for step t >= 1: (t - 1) * (train_steps / T).
    int train_step(int t) const;

private:
    int steps_;
    double xi_;
    BaseSchedule base_;
    std::vector<double> alpha_bar_;
};

/// Rejects T < 1 and xi outside (0, 1].
DiffusionSchedule make_schedule(int steps, double xi, BaseSchedule base = {});

/// Conditioning passed to the denoiser. An empty prompt is the null-text.
struct Condition {
    std::string prompt;
    std::optional<Latent> ref_latent;
    double ref_weight = 0.0;

    static Condition null_text() { return {}; }
    static Condition with_prompt(std::string p) { return Condition{std::move(p), std::nullopt, 0.0}; }
};

/// What the denoiser is told about the step it is asked to evaluate.
struct Timestep {
    int index = 0;         ///< sampling step t in [1, T]
    int train_step = 0;    ///< index into the base training schedule
    double alpha_bar = 1.0;
};

/// Noise-prediction backend. predict() must return a tensor of the input's
/// shape and be deterministic for identical inputs.
class NoisePredictor {
public:
    virtual ~NoisePredictor() = default;
    virtual Latent predict(const Latent& z, const Timestep& step, const Condition& cond) const = 0;
    /// True when predict() may be called from several threads at once.
    virtual bool concurrency_safe() const noexcept { return false; }
};

Timestep timestep_of(const DiffusionSchedule& sched, int t);

/// One deterministic (eta = 0) DDIM update from step t to t - 1.
Latent ddim_step(const Latent& z_t, int t, const NoisePredictor& pred, const Condition& cond,
                 const DiffusionSchedule& sched);
/// Approximate inverse of ddim_step: maps z_{t-1} to z_t using the noise
/// predicted at z_{t-1}.
Latent ddim_invert_step(const Latent& z_prev, int t, const NoisePredictor& pred, const Condition& cond,
                        const DiffusionSchedule& sched);

/// Steps from `from` down to `to` (from >= to).
Latent ddim_denoise(Latent z, int from, int to, const NoisePredictor& pred, const Condition& cond,
                    const DiffusionSchedule& sched);
/// Steps from `from` up to `to` (from <= to).
Latent ddim_invert(Latent z, int from, int to, const NoisePredictor& pred, const Condition& cond,
                   const DiffusionSchedule& sched);

/// EDICT coupled latents (x, y).
struct LatentPair {
    Latent x;
    Latent y;

    static LatentPair twin(const Latent& z) { return {z, z}; }
};

/// EDICT denoising from step `from` down to `to`. Per step t:
///   x <- a x + b eps(y);  y <- a y + b eps(x);
///   x <- p x + (1-p) y;   y <- p y + (1-p) x
/// with a = sqrt(ab_{t-1}/ab_t), b = sqrt(1-ab_{t-1}) - sqrt(ab_{t-1}(1-ab_t)/ab_t).
/// Requires 0.5 < p <= 1.
LatentPair edict_denoise(LatentPair pair, int from, int to, const NoisePredictor& pred, const Condition& cond,
                         const DiffusionSchedule& sched, double p);
/// Exact algebraic inverse of edict_denoise, from step `from` up to `to`.
LatentPair edict_invert(LatentPair pair, int from, int to, const NoisePredictor& pred, const Condition& cond,
                        const DiffusionSchedule& sched, double p);

/// Closed-form optimal noise predictor for the data prior N(mu_c, sigma0^2 I).
///
/// mu_c is zero for the null-text prompt; otherwise a smooth per-channel
/// pattern seeded by the prompt's FNV-1a hash, blended toward the reference
/// latent by ref_weight.
class ToyPredictor final : public NoisePredictor {
public:
    explicit ToyPredictor(double sigma0 = 0.5) : sigma0_(sigma0) {}

    Latent predict(const Latent& z, const Timestep& step, const Condition& cond) const override;
    bool concurrency_safe() const noexcept override { return true; }

    double sigma0() const noexcept { return sigma0_; }
    /// The prior mean used for `cond` at the given latent shape.
    Latent prior_mean(Shape shape, const Condition& cond) const;

private:
    double sigma0_;
};

/// Free-function form of ToyPredictor::predict with sigma0 = 0.5.
Latent toy_predict(const Latent& z, const Timestep& step, const Condition& cond);

} // namespace midas
