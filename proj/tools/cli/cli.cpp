#include "cli.hpp"

#include "midas/backend.hpp"
#include "midas/channel.hpp"
#include "midas/errors.hpp"
#include "midas/image_io.hpp"
#include "midas/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace midas::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kKnownKeys = {
    // paths and job inputs
    "secrets", "out", "latent_out", "stego", "outdir", "reference", "metrics", "pairs",
    // keys and public resources
    "priv_seeds", "priv_seed", "pub_seed", "prompt", "user", "count", "backend", "size",
    // channel
    "degrade", "noise_seed", "extra_denoise",
    // sweep
    "param", "values",
    // pipeline knobs
    "steps", "xi_priv", "xi_pub", "alpha", "gamma_priv", "gamma_fuse", "edict_p", "smoothing_steps",
    "joint_denoise", "sampler", "ref_weight", "guidance"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string kebab(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

bool has(const Settings& s, const std::string& key) { return s.count(key) > 0 && !s.at(key).empty(); }

const std::string& require(const Settings& s, const std::string& key) {
    if (!has(s, key)) throw UsageError("missing required --" + kebab(key));
    return s.at(key);
}

std::string get_or(const Settings& s, const std::string& key, const std::string& fallback) {
    return has(s, key) ? s.at(key) : fallback;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw UsageError("invalid value '" + text + "' for " + kebab(key));
    return value;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw UsageError("invalid value '" + text + "' for " + kebab(key));
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw UsageError("invalid value '" + text + "' for " + kebab(key) + " (expected true or false)");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(text)) seeds.push_back(parse_number<std::uint64_t>(key, item));
    return seeds;
}

} // namespace

const std::vector<std::string>& known_keys() { return kKnownKeys; }

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(std::move(item));
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(std::move(item));
    return out;
}

Settings parse_config(std::istream& in, const std::string& source) {
    Settings s;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = source + ":" + std::to_string(number);
        if (eq == std::string::npos) throw UsageError(where + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            throw UsageError(where + ": unknown key '" + key + "'");
        }
        std::string value = trim(body.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        s[key] = value;
    }
    return s;
}

Settings load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

StegoConfig stego_config(const Settings& s, std::size_t n) {
    StegoConfig cfg = StegoConfig::defaults_for(n);
    if (has(s, "steps")) cfg.steps = parse_number<int>("steps", s.at("steps"));
    if (has(s, "xi_priv")) cfg.xi_priv = parse_real("xi_priv", s.at("xi_priv"));
    if (has(s, "xi_pub")) cfg.xi_pub = parse_real("xi_pub", s.at("xi_pub"));
    if (has(s, "alpha")) cfg.alpha = parse_real("alpha", s.at("alpha"));
    if (has(s, "gamma_priv")) cfg.gamma_priv = parse_real("gamma_priv", s.at("gamma_priv"));
    if (has(s, "gamma_fuse")) cfg.gamma_fuse = parse_real("gamma_fuse", s.at("gamma_fuse"));
    if (has(s, "edict_p")) cfg.edict_p = parse_real("edict_p", s.at("edict_p"));
    if (has(s, "smoothing_steps")) cfg.smoothing_steps = parse_number<int>("smoothing_steps", s.at("smoothing_steps"));
    if (has(s, "extra_denoise")) cfg.extra_denoise_steps = parse_number<int>("extra_denoise", s.at("extra_denoise"));
    if (has(s, "joint_denoise")) cfg.joint_denoise = parse_bool("joint_denoise", s.at("joint_denoise"));
    if (has(s, "ref_weight")) cfg.ref_weight = parse_real("ref_weight", s.at("ref_weight"));
    if (has(s, "guidance")) cfg.guidance = parse_real("guidance", s.at("guidance"));
    if (has(s, "pub_seed")) cfg.pub_seed = parse_number<std::uint64_t>("pub_seed", s.at("pub_seed"));
    if (has(s, "priv_seeds")) cfg.priv_seeds = parse_seeds("priv_seeds", s.at("priv_seeds"));
    if (s.count("prompt")) cfg.prompt = s.at("prompt");
    if (has(s, "sampler")) {
        const std::string& v = s.at("sampler");
        if (v == "edict") {
            cfg.sampler = Sampler::edict;
        } else if (v == "ddim") {
            cfg.sampler = Sampler::ddim;
        } else {
            throw UsageError("invalid value '" + v + "' for sampler (expected edict or ddim)");
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

namespace {

// Image side used by refgen on the toy backend when --size is absent.
constexpr std::size_t kDefaultToySide = 64;

// A zero size means "whatever the backend works on".
Backend open_backend(const Settings& s, std::size_t width, std::size_t height) {
    const std::string address = resolve_backend_address(get_or(s, "backend", ""));
    if (address.empty() || address == "toy") {
        if (width == 0 && height == 0) width = height = kDefaultToySide;
        if (width == 0 || height == 0 || width % ToyCodec::kScale != 0 || height % ToyCodec::kScale != 0) {
            throw UsageError("toy backend needs image sides divisible by " + std::to_string(ToyCodec::kScale) +
                             ", got " + std::to_string(width) + "x" + std::to_string(height));
        }
        return Backend{std::make_shared<ToyPredictor>(), std::make_shared<ToyCodec>(),
                       Shape{ToyCodec::kChannels, height / ToyCodec::kScale, width / ToyCodec::kScale}};
    }
    const double guidance = has(s, "guidance") ? parse_real("guidance", s.at("guidance")) : 7.5;
    Backend backend = make_remote_backend(address, guidance);
    if (width != 0 && (backend.image_width() != width || backend.image_height() != height)) {
        throw UsageError("backend works on " + std::to_string(backend.image_width()) + "x" +
                         std::to_string(backend.image_height()) + " images, got " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
    return backend;
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw UsageError("size must look like 64x64, got '" + text + "'");
    return {parse_number<std::size_t>("size", text.substr(0, x)), parse_number<std::size_t>("size", text.substr(x + 1))};
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void ensure_parent(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
}

void write_csv(const std::string& path, std::span<const MetricReport> rows) {
    ensure_parent(path);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_metrics_csv(out, rows);
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ImageBuffer> read_images(const std::vector<std::string>& paths) {
    std::vector<ImageBuffer> images;
    for (const auto& p : paths) images.push_back(read_png(p));
    for (std::size_t i = 1; i < images.size(); ++i) {
        if (images[i].width != images[0].width || images[i].height != images[0].height) {
            throw UsageError("secret '" + paths[i] + "' is " + std::to_string(images[i].width) + "x" +
                             std::to_string(images[i].height) + " but '" + paths[0] + "' is " +
                             std::to_string(images[0].width) + "x" + std::to_string(images[0].height));
        }
    }
    return images;
}

StegoConfig hide_config(const Settings& s, std::size_t n) {
    const auto seeds = parse_seeds("priv_seeds", require(s, "priv_seeds"));
    if (seeds.size() != n) {
        throw UsageError("got " + std::to_string(seeds.size()) + " private seeds for " + std::to_string(n) +
                         " secrets; --priv-seeds needs one seed per secret");
    }
    require(s, "pub_seed");
    try {
        split_factors(n);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return stego_config(s, n);
}

int cmd_hide(const Settings& s, std::ostream& out) {
    const auto paths = split_list(require(s, "secrets"));
    if (paths.empty()) throw UsageError("--secrets needs at least one image");
    const StegoConfig cfg = hide_config(s, paths.size());
    const std::string target = require(s, "out");
    const auto secrets = read_images(paths);
    const Backend backend = open_backend(s, secrets[0].width, secrets[0].height);

    const Reference ref = refgen(backend, cfg.pub_seed, cfg.prompt, cfg);
    const HideResult result = hide(backend, secrets, cfg, ref);
    ensure_parent(target);
    write_png(target, result.stego);
    if (has(s, "latent_out")) {
        ensure_parent(s.at("latent_out"));
        write_latent(s.at("latent_out"), result.trace.stego_latent);
    }
    out << "hid " << secrets.size() << " secret(s) in " << target << " (" << result.stego.width << "x"
        << result.stego.height << ")\n";
    return kOk;
}

int cmd_reveal(const Settings& s, std::ostream& out) {
    const std::size_t n = has(s, "count") ? parse_number<std::size_t>("count", s.at("count")) : 2;
    Settings local = s;
    local.erase("priv_seeds");
    StegoConfig cfg = stego_config(local, n);
    require(s, "pub_seed");
    const auto user = parse_number<std::size_t>("user", require(s, "user"));
    if (user < 1 || user > n) {
        throw UsageError("--user " + std::to_string(user) + " outside [1, " + std::to_string(n) + "]");
    }
    const auto seed = parse_number<std::uint64_t>("priv_seed", require(s, "priv_seed"));
    const std::string outdir = require(s, "outdir");

    ImageBuffer stego = read_png(require(s, "stego"));
    Degradation degradation;
    try {
        degradation = Degradation::parse(get_or(s, "degrade", "none"));
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const auto noise_seed = parse_number<std::uint64_t>("noise_seed", get_or(s, "noise_seed", "0"));
    stego = apply_degradation(stego, degradation, noise_seed);

    const Backend backend = open_backend(s, stego.width, stego.height);
    const Reference ref = refgen(backend, cfg.pub_seed, cfg.prompt, cfg);
    const RevealReport report = reveal(backend, stego, user, seed, cfg, ref);

    ensure_dir(outdir);
    for (const auto& seg : report.segments) {
        write_png((fs::path(outdir) / ("seg" + std::to_string(seg.index) + ".png")).string(), seg.image);
    }
    out << "user " << user << ": wrote " << report.segments.size() << " reconstruction(s) to " << outdir << "\n";

    if (has(s, "reference")) {
        const auto refs = split_list(s.at("reference"));
        if (refs.size() != n) {
            throw UsageError("got " + std::to_string(refs.size()) + " reference images for " + std::to_string(n) +
                             " segments");
        }
        std::vector<MetricReport> rows;
        for (std::size_t j = 0; j < n; ++j) {
            const ImageBuffer original = read_png(refs[j]);
            const auto& seg = report.segments[j];
            const Latent truth = backend.codec->encode(downsample(original, cfg.n1, cfg.n2));
            rows.push_back(measure("seg" + std::to_string(j + 1), original, seg.image, truth, seg.clean));
            out << "  seg" << j + 1 << (j + 1 == user ? " (designated)" : "") << ": PSNR " << rows.back().psnr
                << " dB, SSIM " << rows.back().ssim << "\n";
        }
        write_csv(get_or(s, "metrics", (fs::path(outdir) / "metrics.csv").string()), rows);
    }
    return kOk;
}

int cmd_refgen(const Settings& s, std::ostream& out) {
    StegoConfig cfg = stego_config(s, 1);
    require(s, "pub_seed");
    const std::string target = require(s, "out");
    const auto [w, h] = has(s, "size") ? parse_size(s.at("size")) : std::pair<std::size_t, std::size_t>{0, 0};
    const Backend backend = open_backend(s, w, h);
    const Reference ref = refgen(backend, cfg.pub_seed, cfg.prompt, cfg);
    ensure_parent(target);
    write_png(target, ref.image);
    if (has(s, "latent_out")) {
        ensure_parent(s.at("latent_out"));
        write_latent(s.at("latent_out"), ref.noisy);
    }
    out << "wrote reference image " << target << "\n";
    return kOk;
}

int cmd_eval(const Settings& s, std::ostream& out) {
    const std::string manifest = require(s, "pairs");
    const std::string target = require(s, "out");
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open manifest '" + manifest + "'");
    const fs::path base = fs::path(manifest).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };

    std::vector<MetricReport> rows;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(body);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
        if (fields.size() != 3) {
            throw UsageError(manifest + ":" + std::to_string(number) + ": expected 'name,reference,test'");
        }
        const ImageBuffer a = read_png(resolve(fields[1]));
        const ImageBuffer b = read_png(resolve(fields[2]));
        if (a.width != b.width || a.height != b.height) {
            throw UsageError(manifest + ":" + std::to_string(number) + ": images differ in size");
        }
        const Backend backend = open_backend(s, a.width, a.height);
        rows.push_back(measure(fields[0], a, b, backend.codec->encode(a), backend.codec->encode(b)));
    }
    write_csv(target, rows);
    out << "evaluated " << rows.size() << " pair(s) into " << target << "\n";
    return kOk;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
    const std::string param = require(s, "param");
    if (param != "alpha" && param != "gamma_priv" && param != "gamma_fuse") {
        throw UsageError("--param must be alpha, gamma_priv or gamma_fuse, got '" + param + "'");
    }
    std::vector<double> values;
    for (const auto& v : split_list(require(s, "values"))) values.push_back(parse_real("values", v));
    if (values.empty()) throw UsageError("--values needs at least one value");

    const auto paths = split_list(require(s, "secrets"));
    if (paths.empty()) throw UsageError("--secrets needs at least one image");
    const StegoConfig base = hide_config(s, paths.size());
    const std::string target = require(s, "out");
    const auto secrets = read_images(paths);
    const Backend backend = open_backend(s, secrets[0].width, secrets[0].height);
    const Reference ref = refgen(backend, base.pub_seed, base.prompt, base);

    std::ostringstream csv;
    csv << std::fixed << std::setprecision(6);
    csv << "param,value,stego_psnr_vs_ref,stego_ssim_vs_ref,correct_psnr,correct_ssim,wrong_psnr,correct_corr,"
           "wrong_corr\n";
    for (double value : values) {
        StegoConfig cfg = base;
        (param == "alpha" ? cfg.alpha : param == "gamma_priv" ? cfg.gamma_priv : cfg.gamma_fuse) = value;
        try {
            cfg.validate();
        } catch (const ConfigError& e) {
            throw UsageError(e.what());
        }
        const HideResult hidden = hide(backend, secrets, cfg, ref);
        double cp = 0, cs = 0, cc = 0, wp = 0, wc = 0;
        std::size_t wrong = 0;
        for (std::size_t u = 1; u <= cfg.n; ++u) {
            const RevealReport r = reveal(backend, hidden.stego, u, cfg.priv_seeds[u - 1], cfg, ref);
            for (std::size_t j = 0; j < cfg.n; ++j) {
                const double p = psnr(r.segments[j].image, secrets[j]);
                const double c = latent_corr(r.segments[j].noisy, hidden.trace.z_sec[j]);
                if (j + 1 == u) {
                    cp += p;
                    cs += ssim(r.segments[j].image, secrets[j]);
                    cc += c;
                } else {
                    wp += p;
                    wc += c;
                    ++wrong;
                }
            }
        }
        const double n = static_cast<double>(cfg.n);
        const double nw = wrong > 0 ? static_cast<double>(wrong) : 1.0;
        csv << param << ',' << value << ',' << psnr(hidden.stego, ref.image) << ',' << ssim(hidden.stego, ref.image)
            << ',' << cp / n << ',' << cs / n << ',' << wp / nw << ',' << cc / n << ',' << wc / nw << '\n';
        out << param << " = " << value << ": correct PSNR " << cp / n << " dB\n";
    }
    ensure_parent(target);
    std::ofstream file(target);
    if (!file) throw IoError("cannot open '" + target + "' for writing");
    file << csv.str();
    if (!file) throw IoError("failed writing '" + target + "'");
    return kOk;
}

struct Command {
    explicit Command(CLI::App* a) : app(a) {}

    CLI::App* app;
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::string>> lists;
    std::string config;

    void scalar(const std::string& key, const std::string& help) {
        app->add_option("--" + kebab(key), scalars[key], help);
    }
    void list(const std::string& key, const std::string& help) {
        app->add_option("--" + kebab(key), lists[key], help)->expected(1, -1);
    }
    void knobs() {
        scalar("backend", "toy (default) or [tcp:]host:port; falls back to MIDAS_BACKEND");
        scalar("steps", "sampling steps T");
        scalar("xi_priv", "private-stage fraction of T");
        scalar("xi_pub", "public-stage fraction of T");
        scalar("alpha", "fusion weight");
        scalar("gamma_priv", "private key strength");
        scalar("gamma_fuse", "public fusion key strength");
        scalar("edict_p", "EDICT mixing coefficient");
        scalar("smoothing_steps", "DDIM smoothing steps after encryption");
        scalar("joint_denoise", "true to denoise all segments jointly");
        scalar("sampler", "edict or ddim");
        scalar("ref_weight", "reference-latent weight in the public condition");
        scalar("guidance", "guidance scale forwarded to remote backends");
        app->add_option("--config", config, "key = value file; flags override it");
    }

    Settings settings() const {
        Settings s = config.empty() ? Settings{} : load_config(config);
        for (const auto& [key, value] : scalars) {
            if (app->count("--" + kebab(key)) > 0) s[key] = value;
        }
        for (const auto& [key, values] : lists) {
            if (app->count("--" + kebab(key)) == 0) continue;
            std::string joined;
            for (const auto& v : values) joined += (joined.empty() ? "" : " ") + v;
            s[key] = joined;
        }
        return s;
    }
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coverless multi-image steganography with per-user access control"};
    app.name("midas");
    app.require_subcommand(1);

    Command hide_cmd(app.add_subcommand("hide", "Hide N secret images in one stego image"));
    hide_cmd.list("secrets", "secret PNG images, one per user");
    hide_cmd.list("priv_seeds", "one private seed per secret");
    hide_cmd.scalar("pub_seed", "public seed");
    hide_cmd.scalar("prompt", "public prompt");
    hide_cmd.scalar("out", "stego PNG to write");
    hide_cmd.scalar("latent_out", "also write the stego latent");
    hide_cmd.knobs();

    Command reveal_cmd(app.add_subcommand("reveal", "Reconstruct every segment with one user's key"));
    reveal_cmd.scalar("stego", "stego PNG");
    reveal_cmd.scalar("user", "designated user index i (1-based)");
    reveal_cmd.scalar("priv_seed", "the user's private seed");
    reveal_cmd.scalar("pub_seed", "public seed");
    reveal_cmd.scalar("prompt", "public prompt");
    reveal_cmd.scalar("count", "number of hidden secrets N (default 2)");
    reveal_cmd.scalar("outdir", "directory for seg<j>.png");
    reveal_cmd.scalar("degrade", "channel before reveal: none, gaussian:<sigma> or jpeg:<quality>");
    reveal_cmd.scalar("noise_seed", "seed of the gaussian channel noise");
    reveal_cmd.scalar("extra_denoise", "denoising steps applied to the received latent");
    reveal_cmd.list("reference", "original secrets, for a metrics CSV");
    reveal_cmd.scalar("metrics", "metrics CSV path (default <outdir>/metrics.csv)");
    reveal_cmd.knobs();

    Command refgen_cmd(app.add_subcommand("refgen", "Render the public reference image"));
    refgen_cmd.scalar("pub_seed", "public seed");
    refgen_cmd.scalar("prompt", "public prompt");
    refgen_cmd.scalar("out", "PNG to write");
    refgen_cmd.scalar("size", "image size WxH (default 64x64 on toy, the backend size otherwise)");
    refgen_cmd.scalar("latent_out", "also write the reference latent z_ref");
    refgen_cmd.knobs();

    Command eval_cmd(app.add_subcommand("eval", "Score reconstruction pairs"));
    eval_cmd.scalar("pairs", "manifest of 'name,reference,test' lines");
    eval_cmd.scalar("out", "CSV to write (name,psnr,ssim,s,corr)");
    eval_cmd.scalar("backend", "codec used for the latent correlation");
    eval_cmd.app->add_option("--config", eval_cmd.config, "key = value file; flags override it");

    Command sweep_cmd(app.add_subcommand("sweep", "Hide and reveal over a range of one parameter"));
    sweep_cmd.scalar("param", "alpha, gamma_priv or gamma_fuse");
    sweep_cmd.list("values", "values to try");
    sweep_cmd.list("secrets", "secret PNG images");
    sweep_cmd.list("priv_seeds", "one private seed per secret");
    sweep_cmd.scalar("pub_seed", "public seed");
    sweep_cmd.scalar("prompt", "public prompt");
    sweep_cmd.scalar("out", "CSV to write");
    sweep_cmd.knobs();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (hide_cmd.app->parsed()) return cmd_hide(hide_cmd.settings(), out);
        if (reveal_cmd.app->parsed()) return cmd_reveal(reveal_cmd.settings(), out);
        if (refgen_cmd.app->parsed()) return cmd_refgen(refgen_cmd.settings(), out);
        if (eval_cmd.app->parsed()) return cmd_eval(eval_cmd.settings(), out);
        if (sweep_cmd.app->parsed()) return cmd_sweep(sweep_cmd.settings(), out);
    } catch (const UsageError& e) {
        err << "midas: " << e.what() << "\n";
        return kUsage;
    } catch (const BackendError& e) {
        err << "midas: backend: " << e.what() << "\n";
        return kBackend;
    } catch (const IoError& e) {
        err << "midas: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << "midas: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace midas::cli
