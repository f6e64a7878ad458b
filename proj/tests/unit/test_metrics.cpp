#include "doctest.h"

#include "support/support.hpp"

#include "midas/errors.hpp"
#include "midas/metrics.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace midas;

TEST_SUITE("metrics") {

TEST_CASE("psnr of identical images is capped") {
    const ImageBuffer img = test::corpus_image(1);
    CHECK(psnr(img, img) == kPsnrCap);
}

TEST_CASE("psnr for a uniform error of 5") {
    const ImageBuffer a(16, 16, 100);
    const ImageBuffer b(16, 16, 105);
    CHECK(psnr(a, b) == doctest::Approx(34.151404).epsilon(1e-7));
}

TEST_CASE("ssim and S are one on identical images") {
    const ImageBuffer img = test::natural_image();
    CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s_component(img, img) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim, S and psnr match the oracle") {
    const ImageBuffer nat = test::natural_image();
    const ImageBuffer pert = test::perturbed(nat);
    const ImageBuffer other = test::corpus_image(0);
    CHECK(ssim(nat, pert) == doctest::Approx(0.9747696869).epsilon(1e-9));
    CHECK(s_component(nat, pert) == doctest::Approx(0.9735283692).epsilon(1e-9));
    CHECK(ssim(nat, other) == doctest::Approx(0.2888653612).epsilon(1e-9));
    CHECK(s_component(nat, other) == doctest::Approx(0.2790718773).epsilon(1e-9));
    CHECK(psnr(nat, pert) == doctest::Approx(32.7933605660).epsilon(1e-10));
}

TEST_CASE("metrics are symmetric") {
    const ImageBuffer a = test::corpus_image(2);
    const ImageBuffer b = test::corpus_image(5);
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    CHECK(s_component(a, b) == doctest::Approx(s_component(b, a)).epsilon(1e-12));
}

TEST_CASE("metrics reject mismatched or tiny images") {
    const ImageBuffer a(16, 16);
    const ImageBuffer b(16, 8);
    CHECK_THROWS_AS(psnr(a, b), DimensionError);
    CHECK_THROWS_AS(ssim(a, b), DimensionError);
    const ImageBuffer tiny(4, 4);
    CHECK_THROWS_AS(ssim(tiny, tiny), DimensionError);
    CHECK_THROWS_AS(s_component(tiny, tiny), DimensionError);
}

TEST_CASE("pearson correlation") {
    const std::vector<float> x{1, 2, 3, 4, 5};
    const std::vector<float> neg{-1, -2, -3, -4, -5};
    const std::vector<float> flat{2, 2, 2, 2, 2};
    CHECK(pearson(x, x) == doctest::Approx(1.0));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0));
    CHECK(pearson(x, flat) == 0.0);
    const std::vector<float> short_one{1, 2};
    CHECK_THROWS_AS(pearson(x, short_one), DimensionError);
}

TEST_CASE("metric rows are written as CSV") {
    const ImageBuffer a = test::corpus_image(0);
    const Latent z = gaussian_latent(Shape{4, 2, 2}, 1);
    const std::vector<MetricReport> rows{measure("same", a, a, z, z)};
    CHECK(rows[0].psnr == kPsnrCap);
    CHECK(rows[0].corr == doctest::Approx(1.0));
    std::ostringstream out;
    write_metrics_csv(out, rows);
    const std::string text = out.str();
    CHECK(text.rfind("name,psnr,ssim,s,corr\n", 0) == 0);
    CHECK(text.find("same,99") != std::string::npos);
}

}
