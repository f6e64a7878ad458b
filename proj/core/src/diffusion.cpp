#include "midas/diffusion.hpp"

#include "midas/errors.hpp"
#include "midas/rng.hpp"

#include <cmath>
#include <numbers>

namespace midas {

DiffusionSchedule::DiffusionSchedule(int steps, double xi, BaseSchedule base)
    : steps_(steps), xi_(xi), base_(base) {
    if (steps < 1) throw ConfigError("schedule needs at least one step");
    if (!(xi > 0.0 && xi <= 1.0)) throw ConfigError("partial-run fraction must lie in (0, 1]");
    if (base.train_steps < steps) throw ConfigError("cannot subsample more steps than the base schedule has");

    // Scaled-linear betas: sqrt(beta) evenly spaced over the training steps.
    const double lo = std::sqrt(base.beta_start);
    const double hi = std::sqrt(base.beta_end);
    std::vector<double> cumulative(static_cast<std::size_t>(base.train_steps));
    double prod = 1.0;
    for (int i = 0; i < base.train_steps; ++i) {
        const double s = base.train_steps == 1 ? lo : lo + (hi - lo) * i / (base.train_steps - 1);
        prod *= 1.0 - s * s;
        cumulative[static_cast<std::size_t>(i)] = prod;
    }

    alpha_bar_.resize(static_cast<std::size_t>(steps) + 1);
    alpha_bar_[0] = 1.0;
    for (int t = 1; t <= steps; ++t) alpha_bar_[static_cast<std::size_t>(t)] = cumulative[train_step(t)];
}

int DiffusionSchedule::active_steps() const noexcept {
    return static_cast<int>(std::floor(xi_ * steps_ + 1e-9));
}

DiffusionSchedule DiffusionSchedule::with_xi(double xi) const { return DiffusionSchedule(steps_, xi, base_); }

double DiffusionSchedule::alpha_bar(int t) const {
    if (t < 0 || t > steps_) throw ConfigError("step index " + std::to_string(t) + " outside schedule");
    return alpha_bar_[static_cast<std::size_t>(t)];
}

int DiffusionSchedule::train_step(int t) const { return (t - 1) * (base_.train_steps / steps_); }

DiffusionSchedule make_schedule(int steps, double xi, BaseSchedule base) {
    return DiffusionSchedule(steps, xi, base);
}

Timestep timestep_of(const DiffusionSchedule& sched, int t) {
    return Timestep{t, t >= 1 ? sched.train_step(t) : 0, sched.alpha_bar(t)};
}

namespace {

void check_step(const DiffusionSchedule& sched, int t) {
    if (t < 1 || t > sched.steps()) {
        throw ConfigError("sampling step " + std::to_string(t) + " outside [1, " + std::to_string(sched.steps()) +
                          "]");
    }
}

Latent predict_checked(const NoisePredictor& pred, const Latent& z, const Timestep& step, const Condition& cond) {
    Latent eps = pred.predict(z, step, cond);
    if (eps.shape() != z.shape()) {
        throw DimensionError("noise predictor returned " + eps.shape().str() + " for input " + z.shape().str());
    }
    return eps;
}

// Affine DDIM transfer between two noise levels with a fixed noise estimate:
// z_to = sqrt(ab_to) * (z_from - sqrt(1 - ab_from) eps) / sqrt(ab_from) + sqrt(1 - ab_to) eps.
Latent transfer(const Latent& z, const Latent& eps, double ab_from, double ab_to) {
    const double a = std::sqrt(ab_to / ab_from);
    const double b = std::sqrt(1.0 - ab_to) - std::sqrt(ab_to * (1.0 - ab_from) / ab_from);
    return lincomb(a, z, b, eps);
}

} // namespace

Latent ddim_step(const Latent& z_t, int t, const NoisePredictor& pred, const Condition& cond,
                 const DiffusionSchedule& sched) {
    check_step(sched, t);
    const Latent eps = predict_checked(pred, z_t, timestep_of(sched, t), cond);
    return transfer(z_t, eps, sched.alpha_bar(t), sched.alpha_bar(t - 1));
}

Latent ddim_invert_step(const Latent& z_prev, int t, const NoisePredictor& pred, const Condition& cond,
                        const DiffusionSchedule& sched) {
    check_step(sched, t);
    const Latent eps = predict_checked(pred, z_prev, timestep_of(sched, t), cond);
    return transfer(z_prev, eps, sched.alpha_bar(t - 1), sched.alpha_bar(t));
}

Latent ddim_denoise(Latent z, int from, int to, const NoisePredictor& pred, const Condition& cond,
                    const DiffusionSchedule& sched) {
    if (from < to) throw ConfigError("denoising runs from a higher step to a lower one");
    for (int t = from; t > to; --t) z = ddim_step(z, t, pred, cond, sched);
    return z;
}

Latent ddim_invert(Latent z, int from, int to, const NoisePredictor& pred, const Condition& cond,
                   const DiffusionSchedule& sched) {
    if (from > to) throw ConfigError("inversion runs from a lower step to a higher one");
    for (int t = from + 1; t <= to; ++t) z = ddim_invert_step(z, t, pred, cond, sched);
    return z;
}

namespace {

void check_mixing(double p) {
    if (!(p > 0.5 && p <= 1.0)) throw ConfigError("EDICT mixing coefficient must lie in (0.5, 1]");
}

void check_pair(const LatentPair& pair) {
    if (pair.x.shape() != pair.y.shape()) {
        throw DimensionError("EDICT tracks differ in shape: " + pair.x.shape().str() + " vs " +
                             pair.y.shape().str());
    }
}

struct EdictCoefficients {
    double a;
    double b;
};

EdictCoefficients edict_coefficients(const DiffusionSchedule& sched, int t) {
    const double ab_t = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    return {std::sqrt(ab_prev / ab_t), std::sqrt(1.0 - ab_prev) - std::sqrt(ab_prev * (1.0 - ab_t) / ab_t)};
}

} // namespace

LatentPair edict_denoise(LatentPair pair, int from, int to, const NoisePredictor& pred, const Condition& cond,
                         const DiffusionSchedule& sched, double p) {
    check_mixing(p);
    check_pair(pair);
    if (from < to) throw ConfigError("denoising runs from a higher step to a lower one");
    for (int t = from; t > to; --t) {
        check_step(sched, t);
        const auto [a, b] = edict_coefficients(sched, t);
        const Timestep step = timestep_of(sched, t);
        pair.x = lincomb(a, pair.x, b, predict_checked(pred, pair.y, step, cond));
        pair.y = lincomb(a, pair.y, b, predict_checked(pred, pair.x, step, cond));
        pair.x = lincomb(p, pair.x, 1.0 - p, pair.y);
        pair.y = lincomb(p, pair.y, 1.0 - p, pair.x);
    }
    return pair;
}

LatentPair edict_invert(LatentPair pair, int from, int to, const NoisePredictor& pred, const Condition& cond,
                        const DiffusionSchedule& sched, double p) {
    check_mixing(p);
    check_pair(pair);
    if (from > to) throw ConfigError("inversion runs from a lower step to a higher one");
    for (int t = from + 1; t <= to; ++t) {
        check_step(sched, t);
        const auto [a, b] = edict_coefficients(sched, t);
        const Timestep step = timestep_of(sched, t);
        pair.y = lincomb(1.0 / p, pair.y, -(1.0 - p) / p, pair.x);
        pair.x = lincomb(1.0 / p, pair.x, -(1.0 - p) / p, pair.y);
        pair.y = lincomb(1.0 / a, pair.y, -b / a, predict_checked(pred, pair.x, step, cond));
        pair.x = lincomb(1.0 / a, pair.x, -b / a, predict_checked(pred, pair.y, step, cond));
    }
    return pair;
}

Latent ToyPredictor::prior_mean(Shape shape, const Condition& cond) const {
    Latent mu(shape);
    if (!cond.prompt.empty()) {
        // Two random low-frequency cosines per channel plus an offset.
        SplitMix64 rng(fnv1a64(cond.prompt));
        const double h = static_cast<double>(shape.height);
        const double w = static_cast<double>(shape.width);
        for (std::size_t c = 0; c < shape.channels; ++c) {
            const double offset = 0.2 * (2.0 * rng.uniform() - 1.0);
            double amp[2], fy[2], fx[2], phase[2];
            for (int k = 0; k < 2; ++k) {
                amp[k] = 0.35 * (0.5 + 0.5 * rng.uniform());
                fy[k] = static_cast<double>(rng.below(3));
                fx[k] = static_cast<double>(rng.below(3));
                phase[k] = 2.0 * std::numbers::pi * rng.uniform();
            }
            for (std::size_t y = 0; y < shape.height; ++y) {
                for (std::size_t x = 0; x < shape.width; ++x) {
                    double v = offset;
                    for (int k = 0; k < 2; ++k) {
                        v += amp[k] * std::cos(std::numbers::pi * (fy[k] * (y + 0.5) / h + fx[k] * (x + 0.5) / w) +
                                               phase[k]);
                    }
                    mu.at(c, y, x) = static_cast<float>(v);
                }
            }
        }
    }
    if (cond.ref_latent && cond.ref_weight > 0.0) {
        if (cond.ref_latent->shape() != shape) {
            throw DimensionError("reference latent " + cond.ref_latent->shape().str() + " does not match " +
                                 shape.str());
        }
        mu = lincomb(1.0 - cond.ref_weight, mu, cond.ref_weight, *cond.ref_latent);
    }
    return mu;
}

Latent ToyPredictor::predict(const Latent& z, const Timestep& step, const Condition& cond) const {
    const double ab = step.alpha_bar;
    if (!(ab < 1.0)) throw ConfigError("toy predictor is undefined at alpha_bar = 1 (step 0)");
    const double s2 = sigma0_ * sigma0_;
    const double sqrt_ab = std::sqrt(ab);
    const double gain = s2 * sqrt_ab / (ab * s2 + 1.0 - ab);
    const double inv_noise = 1.0 / std::sqrt(1.0 - ab);

    const Latent mu = prior_mean(z.shape(), cond);
    Latent eps(z.shape());
    auto out = eps.values();
    auto zs = z.values();
    auto ms = mu.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x0 = ms[i] + gain * (zs[i] - sqrt_ab * ms[i]);
        out[i] = static_cast<float>((zs[i] - sqrt_ab * x0) * inv_noise);
    }
    return eps;
}

Latent toy_predict(const Latent& z, const Timestep& step, const Condition& cond) {
    return ToyPredictor(0.5).predict(z, step, cond);
}

} // namespace midas
