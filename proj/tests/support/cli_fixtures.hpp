#pragma once

#include "support/support.hpp"

#include "cli.hpp"

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace midas::test {

struct CliFixture {
    std::string name;
    std::vector<std::string> args;
};

/// The standard CLI scenarios, writing every output below `dir`.
inline std::vector<CliFixture> cli_fixtures(const std::filesystem::path& dir) {
    const std::string corpus = (data_dir() / "corpus").string();
    const std::string s1 = corpus + "/img0.png";
    const std::string s2 = corpus + "/img3.png";
    const std::string stego = (dir / "stego.png").string();
    write_file(dir / "pairs.csv", "first," + s1 + ",user1/seg1.png\nsecond," + s2 + ",user2/seg2.png\n");
    write_file(dir / "hide.cfg", "# shared settings\nprompt = \"a photo of a mountain lake\"\npub_seed = 77\n");
    const std::string cfg = (dir / "hide.cfg").string();
    return {
        {"hide", {"hide", "--config", cfg, "--secrets", s1, s2, "--priv-seeds", "1000", "1001", "--out", stego,
                  "--latent-out", (dir / "stego.mlat").string()}},
        {"reveal-user1", {"reveal", "--config", cfg, "--stego", stego, "--user", "1", "--priv-seed", "1000",
                          "--outdir", (dir / "user1").string(), "--reference", s1, s2}},
        {"reveal-user2", {"reveal", "--config", cfg, "--stego", stego, "--user", "2", "--priv-seed", "1001",
                          "--outdir", (dir / "user2").string()}},
        {"reveal-noisy", {"reveal", "--config", cfg, "--stego", stego, "--user", "1", "--priv-seed", "1000",
                          "--outdir", (dir / "noisy").string(), "--degrade", "gaussian:5", "--noise-seed", "3",
                          "--extra-denoise", "5", "--reference", s1, s2}},
        {"reveal-jpeg", {"reveal", "--config", cfg, "--stego", stego, "--user", "2", "--priv-seed", "1001",
                         "--outdir", (dir / "jpeg").string(), "--degrade", "jpeg:70"}},
        {"refgen", {"refgen", "--config", cfg, "--out", (dir / "ref.png").string(), "--latent-out",
                    (dir / "ref.mlat").string()}},
        {"eval", {"eval", "--pairs", (dir / "pairs.csv").string(), "--out", (dir / "eval.csv").string()}},
        {"sweep", {"sweep", "--config", cfg, "--param", "alpha", "--values", "0.8,0.95", "--secrets", s1, s2,
                   "--priv-seeds", "1000", "1001", "--out", (dir / "sweep.csv").string()}},
    };
}

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

/// Relative path -> contents for every regular file below `dir`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).string()] = read_file(e.path());
    }
    return files;
}

} // namespace midas::test
