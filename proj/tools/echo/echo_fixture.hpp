#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace midas::echo {

/// How the fixture misbehaves, if at all.
enum class Mode {
    normal,     ///< protocol-conformant answers
    malformed,  ///< every answer is a truncated JSON line
    wrong_id,   ///< answers carry id + 1
};

Mode parse_mode(const std::string& text);

/// Latent advertised by the fixture: 4 x 64 x 64 with 8x spatial scale.
inline constexpr std::size_t kChannels = 4;
inline constexpr std::size_t kSide = 64;
inline constexpr std::size_t kScale = 8;
inline constexpr float kMidGray = 128.0f;

/// Answer to one request frame (without the newline).
///
/// info           protocol 1, latent [4, 64, 64], scale 8, SD-1.5 schedule
/// predict_noise  the request tensor, unchanged
/// encode         zeros of shape [4, H/8, W/8] for an [H, W, 3] image
/// decode         mid-gray [8H, 8W, 3] image for a [C, H, W] latent
/// anything else  an error object; unparseable input gets id 0
std::string respond(std::string_view request, Mode mode = Mode::normal);

/// Loopback TCP server answering each newline-terminated frame with respond().
class Server {
public:
    explicit Server(Mode mode = Mode::normal, std::uint16_t port = 0);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    std::string address() const { return "127.0.0.1:" + std::to_string(port_); }
    /// Frames received so far across all connections.
    std::size_t requests_served() const noexcept { return served_.load(); }
    void stop();

private:
    void accept_loop();
    void serve(int fd);

    Mode mode_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{true};
    std::atomic<std::size_t> served_{0};
    std::thread acceptor_;
    std::mutex workers_mutex_;
    std::vector<std::thread> workers_;
    std::vector<int> client_fds_;
};

} // namespace midas::echo
