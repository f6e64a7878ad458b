#include "doctest.h"

#include "echo_fixture.hpp"
#include "support/cli_fixtures.hpp"

#include "midas/image_io.hpp"
#include "midas/metrics.hpp"

#include <cstdlib>
#include <sstream>

using namespace midas;
using test::run_cli;

TEST_SUITE("cli") {

TEST_CASE("config files parse with comments and quotes") {
    std::istringstream in("# comment\n\nalpha = 0.9  # trailing\nprompt = \"a cat, sitting\"\npriv_seeds = 1, 2\n");
    const cli::Settings s = cli::parse_config(in, "t.cfg");
    CHECK(s.at("alpha") == "0.9");
    CHECK(s.at("prompt") == "a cat, sitting");
    CHECK(cli::split_list(s.at("priv_seeds")) == std::vector<std::string>{"1", "2"});
}

TEST_CASE("unknown config keys name the line") {
    std::istringstream in("alpha = 0.9\nbogus = 1\n");
    CHECK_THROWS_WITH_AS(cli::parse_config(in, "t.cfg"), "t.cfg:2: unknown key 'bogus'", cli::UsageError);
    std::istringstream no_eq("alpha 0.9\n");
    CHECK_THROWS_AS(cli::parse_config(no_eq, "t.cfg"), cli::UsageError);
}

TEST_CASE("settings map onto the stego configuration") {
    const cli::Settings s{{"alpha", "0.8"}, {"gamma_priv", "0.3"}, {"sampler", "ddim"}, {"joint_denoise", "false"}};
    const StegoConfig cfg = cli::stego_config(s, 4);
    CHECK(cfg.alpha == 0.8);
    CHECK(cfg.gamma_priv == 0.3);
    CHECK(cfg.sampler == Sampler::ddim);
    CHECK_FALSE(cfg.joint_denoise);
    CHECK(cfg.n1 == 2);
    CHECK(cfg.n2 == 2);
    CHECK_THROWS_AS(cli::stego_config({{"alpha", "abc"}}, 2), cli::UsageError);
}

TEST_CASE("every fixture runs and writes its outputs") {
    test::TempDir dir("cli");
    for (const auto& f : test::cli_fixtures(dir.path())) {
        const auto r = run_cli(f.args);
        INFO(f.name << ": " << r.err);
        CHECK(r.code == cli::kOk);
    }
    CHECK(read_png(dir / "stego.png").width == 64);
    for (const char* p : {"user1/seg1.png", "user1/seg2.png", "user1/metrics.csv", "noisy/metrics.csv",
                          "jpeg/seg2.png", "ref.png", "ref.mlat", "stego.mlat", "eval.csv", "sweep.csv"}) {
        CHECK_MESSAGE(std::filesystem::exists(dir.path() / p), p);
    }
    const ImageBuffer s1 = test::corpus_image(0);
    CHECK(psnr(read_png(dir / "user1/seg1.png"), s1) - psnr(read_png(dir / "user2/seg1.png"), s1) >= 6.0);
    const std::string metrics = test::read_file(dir.path() / "noisy/metrics.csv");
    CHECK(metrics.rfind("name,psnr,ssim,s,corr\n", 0) == 0);
    CHECK(metrics.find("nan") == std::string::npos);
    const std::string sweep = test::read_file(dir.path() / "sweep.csv");
    CHECK(sweep.find("alpha,0.800000") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs") {
    test::TempDir a("cli-a");
    test::TempDir b("cli-b");
    for (const auto* dir : {&a, &b}) {
        for (const auto& f : test::cli_fixtures(dir->path())) REQUIRE(run_cli(f.args).code == cli::kOk);
    }
    const auto first = test::snapshot(a.path());
    const auto second = test::snapshot(b.path());
    REQUIRE(first.size() == second.size());
    for (const auto& [name, bytes] : first) {
        INFO(name);
        CHECK(second.count(name) == 1);
        if (name == "pairs.csv") continue;
        CHECK(second.at(name) == bytes);
    }
}

TEST_CASE("seed count must match the secret count") {
    const std::string s = (test::data_dir() / "corpus" / "img0.png").string();
    const auto r = run_cli({"hide", "--secrets", s, s, "--priv-seeds", "1", "--pub-seed", "2", "--out", "x.png"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("got 1 private seeds for 2 secrets") != std::string::npos);
}

TEST_CASE("flags override the config file") {
    test::TempDir dir("override");
    test::write_file(dir.path() / "c.cfg", "priv_seeds = 1\npub_seed = 2\n");
    const std::string s = (test::data_dir() / "corpus" / "img0.png").string();
    const std::string cfg = dir / "c.cfg";
    CHECK(run_cli({"hide", "--config", cfg, "--secrets", s, s, "--out", dir / "x.png"}).code == cli::kUsage);
    CHECK(run_cli({"hide", "--config", cfg, "--secrets", s, s, "--priv-seeds", "1", "2", "--out", dir / "x.png"})
              .code == cli::kOk);
}

TEST_CASE("bad config files are usage errors") {
    test::TempDir dir("badcfg");
    test::write_file(dir.path() / "c.cfg", "alpha = 0.9\nbogus = 1\n");
    const auto r = run_cli({"refgen", "--config", dir / "c.cfg", "--pub-seed", "1", "--out", dir / "r.png"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("c.cfg:2: unknown key 'bogus'") != std::string::npos);
}

TEST_CASE("exit codes") {
    test::TempDir dir("codes");
    CHECK(run_cli({"--help"}).code == cli::kOk);
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"hide", "--no-such-flag"}).code == cli::kUsage);
    CHECK(run_cli({"refgen", "--pub-seed", "1", "--out", dir / "r.png", "--alpha", "2"}).code == cli::kUsage);
    CHECK(run_cli({"reveal", "--stego", dir / "missing.png", "--user", "1", "--priv-seed", "1", "--pub-seed", "1",
                   "--outdir", dir / "o"})
              .code == cli::kIo);
    CHECK(run_cli({"refgen", "--config", dir / "missing.cfg", "--out", dir / "r.png"}).code == cli::kIo);

    std::uint16_t port = 0;
    {
        echo::Server server;
        port = server.port();
    }
    const auto r = run_cli({"refgen", "--pub-seed", "1", "--out", dir / "r.png", "--backend",
                            "127.0.0.1:" + std::to_string(port)});
    CHECK(r.code == cli::kBackend);
}

TEST_CASE("the backend address can come from the environment") {
    test::TempDir dir("env");
    echo::Server server;
    ::setenv("MIDAS_BACKEND", server.address().c_str(), 1);
    const auto r = run_cli({"refgen", "--pub-seed", "1", "--out", dir / "r.png", "--backend", "",
                            "--steps", "10"});
    ::unsetenv("MIDAS_BACKEND");
    INFO(r.err);
    REQUIRE(r.code == cli::kOk);
    const ImageBuffer img = read_png(dir / "r.png");
    CHECK(img.width == 512);
    CHECK(img == ImageBuffer(512, 512, 128));
    CHECK(server.requests_served() > 0);
}

}
