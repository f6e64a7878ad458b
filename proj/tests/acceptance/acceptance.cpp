// One PASS/FAIL line per acceptance criterion. With no argument every
// criterion runs; otherwise only the named ones. Exit status is nonzero when
// any selected criterion fails.

#include "echo_fixture.hpp"
#include "support/cli_fixtures.hpp"
#include "support/support.hpp"

#include "midas/backend.hpp"
#include "midas/channel.hpp"
#include "midas/keymech.hpp"
#include "midas/metrics.hpp"
#include "midas/pipeline.hpp"
#include "midas/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

using namespace midas;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

std::vector<float> normals(std::size_t d, std::uint64_t seed) {
    SplitMix64 g(seed);
    std::vector<float> z(d);
    for (auto& v : z) v = static_cast<float>(g.normal());
    return z;
}

double l2(std::span<const float> z) {
    double s = 0.0;
    for (float v : z) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

Verdict key_algebra() {
    const auto start = Clock::now();
    double ortho = 0.0, round_trip = 0.0, norm_rel = 0.0;
    for (std::size_t d : {64u, 1024u, 4096u}) {
        for (double gamma : {0.0, 0.25, 0.5, 1.0}) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                const OrthoKey key = build_random_basis(d, gamma, seed);
                ortho = std::max(ortho, orthonormality_error(key));
                const auto z = normals(d, 1000 + seed);
                const auto enc = ortho_apply(key, z);
                const auto back = ortho_inverse(key, enc);
                for (std::size_t i = 0; i < d; ++i) {
                    round_trip = std::max(round_trip, std::abs(static_cast<double>(back[i]) - z[i]));
                }
                norm_rel = std::max(norm_rel, std::abs(l2(enc) - l2(z)) / l2(z));
            }
        }
    }
    const double t = seconds_since(start);
    Verdict v;
    v.pass = ortho < 1e-4 && round_trip < 1e-5 && norm_rel < 1e-5 && t < 30.0;
    v.detail = "max |QQ^T-I| " + fmt("%.2e", ortho) + " (< 1e-4), round trip " + fmt("%.2e", round_trip) +
               " (< 1e-5), norm " + fmt("%.2e", norm_rel) + " (< 1e-5), " + fmt("%.1f", t) + " s (< 30 s)";
    return v;
}

Verdict fusion_inverse() {
    const auto start = Clock::now();
    const Shape shape{4, 16, 16};
    const double alphas[] = {0.5, 0.95, 1.0};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const OrthoKey key = build_random_basis(shape.size(), 0.5, 500 + i);
        const Latent z = gaussian_latent(shape, 2 * i);
        const Latent ref = gaussian_latent(shape, 2 * i + 1);
        const double alpha = alphas[i % 3];
        worst = std::max(worst, max_abs_diff(decompose(fuse(z, ref, key, alpha), ref, key, alpha), z));
    }
    const double t = seconds_since(start);
    return {worst < 1e-5 && t < 5.0,
            "100 triples, max-abs " + fmt("%.2e", worst) + " (< 1e-5), " + fmt("%.2f", t) + " s (< 5 s)"};
}

Verdict edict_exactness() {
    const auto start = Clock::now();
    const auto toy = make_toy_backend();
    const StegoConfig cfg = StegoConfig::defaults_for(2);
    const auto sched = make_schedule(cfg.steps, cfg.xi_priv);
    const int k_priv = static_cast<int>(std::floor(cfg.xi_priv * cfg.steps + 1e-9));
    const int k_pub = static_cast<int>(std::floor(cfg.xi_pub * cfg.steps + 1e-9));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Latent z = gaussian_latent(toy.latent, 9000 + i);
        Condition cond = Condition::with_prompt("a photo of a mountain lake");
        cond.ref_latent = gaussian_latent(toy.latent, 9100 + i);
        cond.ref_weight = cfg.ref_weight;
        for (auto [window, c] : {std::pair{k_priv, Condition::null_text()}, std::pair{k_pub, cond}}) {
            const LatentPair up = edict_invert(LatentPair::twin(z), 0, window, *toy.predictor, c, sched, cfg.edict_p);
            const LatentPair back = edict_denoise(up, window, 0, *toy.predictor, c, sched, cfg.edict_p);
            worst = std::max({worst, max_abs_diff(back.x, z), max_abs_diff(back.y, z)});
        }
    }
    const double t = seconds_since(start);
    return {worst < 1e-4 && t < 60.0, "20 latents over the private and public windows, max-abs " +
                                          fmt("%.2e", worst) + " (< 1e-4), " + fmt("%.2f", t) + " s (< 60 s)"};
}

struct Trial {
    StegoConfig cfg;
    std::vector<ImageBuffer> secrets;
};

Trial trial(int t) {
    Trial tr{StegoConfig::defaults_for(2), {}};
    tr.cfg.priv_seeds = {1000u + 2u * t, 1001u + 2u * t};
    tr.cfg.pub_seed = 77 + t;
    tr.cfg.prompt = "a photo of a mountain lake";
    tr.secrets = {test::corpus_image(t % 8), test::corpus_image((t + 3) % 8)};
    return tr;
}

constexpr int kTrials = 20;

Verdict access_control() {
    const auto start = Clock::now();
    const Backend backend = make_toy_backend();
    double pc = 0, pw = 0, cc = 0, cw = 0, lc = 0, lw = 0;
    int n_c = 0, n_w = 0;
    for (int t = 0; t < kTrials; ++t) {
        const Trial tr = trial(t);
        const Reference ref = refgen(backend, tr.cfg.pub_seed, tr.cfg.prompt, tr.cfg);
        const HideResult hidden = hide(backend, tr.secrets, tr.cfg, ref);
        for (std::size_t u = 1; u <= 2; ++u) {
            const RevealReport r = reveal(backend, hidden.stego, u, tr.cfg.priv_seeds[u - 1], tr.cfg, ref);
            const RevealReport exact =
                reveal_latent(backend, hidden.trace.stego_latent, u, tr.cfg.priv_seeds[u - 1], tr.cfg, ref);
            for (std::size_t j = 0; j < 2; ++j) {
                const double p = psnr(r.segments[j].image, tr.secrets[j]);
                const double c = latent_corr(r.segments[j].noisy, hidden.trace.z_sec[j]);
                const double l = latent_corr(exact.segments[j].noisy, hidden.trace.z_sec[j]);
                if (j + 1 == u) {
                    pc += p, cc += c, lc += l, ++n_c;
                } else {
                    pw += p, cw += c, lw += l, ++n_w;
                }
            }
        }
    }
    const double t = seconds_since(start);
    const double psnr_gap = pc / n_c - pw / n_w;
    const double corr_gap = cc / n_c - cw / n_w;
    return {psnr_gap >= 6.0 && corr_gap >= 0.5 && t < 300.0,
            "PSNR correct " + fmt("%.2f", pc / n_c) + " vs wrong " + fmt("%.2f", pw / n_w) + " dB, gap " +
                fmt("%.2f", psnr_gap) + " (>= 6); latent corr " + fmt("%.3f", cc / n_c) + " vs " +
                fmt("%.3f", cw / n_w) + ", gap " + fmt("%.3f", corr_gap) + " (>= 0.5); " +
                "corr gap without the image round trip " + fmt("%.3f", lc / n_c - lw / n_w) + "; " +
                fmt("%.1f", t) + " s (< 300 s)"};
}

// Inverts each corpus image to the private window, encrypts its first K
// latent channels at full strength, denoises, and scores S against the
// original.
Verdict structural_ordering() {
    const auto start = Clock::now();
    const Backend backend = make_toy_backend();
    const auto& pred = *backend.predictor;
    const auto sched = make_schedule(50, 0.4);
    const int window = sched.active_steps();
    const Shape shape = backend.latent;
    const std::size_t plane = shape.height * shape.width;

    double rb[5] = {}, nf[5] = {};
    for (int i = 0; i < test::kCorpusSize; ++i) {
        const ImageBuffer img = test::corpus_image(i);
        const Latent z = ddim_invert(backend.codec->encode(img), 0, window, pred, {}, sched);
        for (std::size_t k = 0; k <= 4; ++k) {
            const std::size_t d = k * plane;
            Latent enc_rb = z;
            Latent enc_nf = z;
            if (k > 0) {
                const std::span<const float> head(z.values().data(), d);
                const auto mixed = ortho_apply(build_random_basis(d, 1.0, 31 + i), head);
                const auto flipped = flip_apply(build_flip(d, 31 + i), head);
                std::copy(mixed.begin(), mixed.end(), enc_rb.values().begin());
                std::copy(flipped.begin(), flipped.end(), enc_nf.values().begin());
            }
            const auto score = [&](const Latent& e) {
                return s_component(img, backend.codec->decode(ddim_denoise(e, window, 0, pred, {}, sched)));
            };
            rb[k] += score(enc_rb) / test::kCorpusSize;
            nf[k] += score(enc_nf) / test::kCorpusSize;
        }
    }
    const double t = seconds_since(start);
    bool pass = rb[0] == nf[0] && t < 120.0;
    std::string rows_rb = "Random Basis", rows_nf = "Noise Flip";
    for (int k = 0; k <= 4; ++k) {
        if (k > 0) pass = pass && rb[k] <= rb[k - 1] && nf[k] <= nf[k - 1] && rb[k] <= nf[k];
        rows_rb += " " + fmt("%.3f", rb[k]);
        rows_nf += " " + fmt("%.3f", nf[k]);
    }
    return {pass, "S for K=0..4: " + rows_nf + " | " + rows_rb + "; " + fmt("%.1f", t) + " s (< 120 s)"};
}

Verdict robustness() {
    const auto start = Clock::now();
    const Backend backend = make_toy_backend();
    double clean = 0.0, noisy = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        Trial tr = trial(t);
        const Reference ref = refgen(backend, tr.cfg.pub_seed, tr.cfg.prompt, tr.cfg);
        const HideResult hidden = hide(backend, tr.secrets, tr.cfg, ref);
        StegoConfig extra = tr.cfg;
        extra.extra_denoise_steps = 5;
        const ImageBuffer received = apply_gaussian(hidden.stego, 5.0, 4000 + t);
        for (std::size_t u = 1; u <= 2; ++u) {
            const auto seed = tr.cfg.priv_seeds[u - 1];
            clean += psnr(reveal(backend, hidden.stego, u, seed, tr.cfg, ref).segments[u - 1].image,
                          tr.secrets[u - 1]);
            noisy += psnr(reveal(backend, received, u, seed, extra, ref).segments[u - 1].image, tr.secrets[u - 1]);
        }
    }
    clean /= 2 * kTrials;
    noisy /= 2 * kTrials;
    const double t = seconds_since(start);
    return {std::abs(clean - noisy) <= 4.0 && t < 300.0,
            "correct-key PSNR clean " + fmt("%.2f", clean) + " dB, gaussian sigma 5 + 5 extra steps " +
                fmt("%.2f", noisy) + " dB, drop " + fmt("%.2f", clean - noisy) + " (within 4 dB); " +
                fmt("%.1f", t) + " s (< 300 s)"};
}

Verdict determinism() {
    test::TempDir a("acc-a");
    test::TempDir b("acc-b");
    std::size_t fixtures = 0;
    for (const auto* dir : {&a, &b}) {
        const auto list = test::cli_fixtures(dir->path());
        fixtures = list.size();
        for (const auto& f : list) {
            const auto r = test::run_cli(f.args);
            if (r.code != 0) return {false, "fixture " + f.name + " exited " + std::to_string(r.code) + ": " + r.err};
        }
    }
    const auto first = test::snapshot(a.path());
    const auto second = test::snapshot(b.path());
    std::size_t compared = 0;
    for (const auto& [name, bytes] : first) {
        if (name == "pairs.csv" || name == "hide.cfg") continue;
        const auto it = second.find(name);
        if (it == second.end() || it->second != bytes) return {false, name + " differs between runs"};
        ++compared;
    }
    return {compared > 0 && first.size() == second.size(),
            std::to_string(fixtures) + " fixtures, " + std::to_string(compared) + " output files byte-identical"};
}

Verdict backend_protocol() {
    SplitMix64 rng(2718);
    int round_trips = 0;
    for (int i = 0; i < 200; ++i) {
        BackendRequest req;
        req.op = "predict_noise";
        req.id = rng.next() >> 11;
        const std::size_t n = 1 + rng.below(i == 0 ? (1u << 22) : 4096);
        TensorPayload t{{n}, std::vector<float>(n)};
        for (auto& v : t.data) v = static_cast<float>(rng.normal());
        req.tensor = t;
        req.timestep = static_cast<int>(rng.below(1000));
        req.prompt = "p" + std::to_string(i);
        const BackendRequest back = decode_request(encode_request(req));
        if (!(back == req)) return {false, "request " + std::to_string(i) + " did not round trip"};
        BackendResponse resp;
        resp.id = req.id;
        resp.tensor = t;
        if (!(decode_response(encode_response(resp)) == resp)) {
            return {false, "response " + std::to_string(i) + " did not round trip"};
        }
        ++round_trips;
    }

    std::ifstream in(test::data_dir() / "echo_transcript.jsonl");
    std::vector<std::pair<std::string, std::string>> exchanges;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("> ", 0) == 0) exchanges.emplace_back(line.substr(2), "");
        if (line.rfind("< ", 0) == 0 && !exchanges.empty()) exchanges.back().second = line.substr(2);
    }
    if (exchanges.empty()) return {false, "golden transcript missing"};
    echo::Server server;
    auto session = Session::connect(server.address());
    for (const auto& [request, response] : exchanges) {
        if (echo::respond(request) != response) return {false, "fixture answer differs from the transcript"};
        if (encode_request(decode_request(request)) != request) return {false, "request frame not byte-exact"};
        const BackendResponse expected = decode_response(response);
        try {
            if (encode_response(session->call(decode_request(request))) != response) {
                return {false, "live answer differs from the transcript"};
            }
            if (expected.error_code) return {false, "expected a server error"};
        } catch (const ServerError& e) {
            if (!expected.error_code || e.code() != *expected.error_code) return {false, e.what()};
        }
    }
    return {true, std::to_string(round_trips) + " randomized frame round trips (up to 16 MB), " +
                      std::to_string(exchanges.size()) + " golden exchanges byte-exact, offline and live"};
}

struct Criterion {
    const char* name;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"key_algebra", key_algebra},
        {"fusion_inverse", fusion_inverse},
        {"edict_exactness", edict_exactness},
        {"access_control", access_control},
        {"structural_ordering", structural_ordering},
        {"robustness", robustness},
        {"determinism", determinism},
        {"backend_protocol", backend_protocol},
    };
    std::vector<std::string> selected(argv + 1, argv + argc);
    bool all_pass = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : 1;
}
