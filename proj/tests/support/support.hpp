#pragma once

#include "midas/image_io.hpp"
#include "midas/tensor.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace midas::test {

inline std::filesystem::path data_dir() { return MIDAS_TEST_DATA; }

inline ImageBuffer natural_image() { return read_png((data_dir() / "natural.png").string()); }

inline ImageBuffer corpus_image(int i) {
    return read_png((data_dir() / "corpus" / ("img" + std::to_string(i) + ".png")).string());
}

inline constexpr int kCorpusSize = 8;

/// Same formula as the Python oracle: ((7x + 13y) mod 21) - 10 on every channel.
inline ImageBuffer perturbed(const ImageBuffer& img) {
    ImageBuffer out = img;
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const int delta = static_cast<int>((x * 7 + y * 13) % 21) - 10;
            for (std::size_t c = 0; c < 3; ++c) {
                const int v = img.at(y, x, c) + delta;
                out.at(y, x, c) = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
            }
        }
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("midas-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace midas::test
