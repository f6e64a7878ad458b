#include "echo_fixture.hpp"

#include "midas/backend.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace midas::echo {

Mode parse_mode(const std::string& text) {
    if (text == "normal") return Mode::normal;
    if (text == "malformed") return Mode::malformed;
    if (text == "wrong-id") return Mode::wrong_id;
    throw std::invalid_argument("unknown echo mode '" + text + "' (normal, malformed, wrong-id)");
}

namespace {

BackendResponse error_response(std::uint64_t id, std::string code, std::string message) {
    BackendResponse resp;
    resp.id = id;
    resp.error_code = std::move(code);
    resp.error_message = std::move(message);
    return resp;
}

BackendResponse answer(const BackendRequest& req) {
    BackendResponse resp;
    resp.id = req.id;
    if (req.op == "info") {
        BackendInfo info;
        info.latent = Shape{kChannels, kSide, kSide};
        info.scale = kScale;
        info.concurrency_safe = false;
        resp.info = info;
    } else if (req.op == "predict_noise") {
        if (!req.tensor) return error_response(req.id, "missing_tensor", "predict_noise needs a tensor");
        resp.tensor = req.tensor;
    } else if (req.op == "encode") {
        if (!req.tensor || req.tensor->shape.size() != 3 || req.tensor->shape[2] != 3) {
            return error_response(req.id, "bad_shape", "encode needs an [H, W, 3] image tensor");
        }
        const auto& s = req.tensor->shape;
        TensorPayload t{{kChannels, s[0] / kScale, s[1] / kScale}, {}};
        t.data.assign(t.element_count(), 0.0f);
        resp.tensor = std::move(t);
    } else if (req.op == "decode") {
        if (!req.tensor || req.tensor->shape.size() != 3) {
            return error_response(req.id, "bad_shape", "decode needs a [C, H, W] latent tensor");
        }
        const auto& s = req.tensor->shape;
        TensorPayload t{{s[1] * kScale, s[2] * kScale, 3}, {}};
        t.data.assign(t.element_count(), kMidGray);
        resp.tensor = std::move(t);
    } else {
        return error_response(req.id, "unknown_op", "unknown op '" + req.op + "'");
    }
    return resp;
}

} // namespace

std::string respond(std::string_view request, Mode mode) {
    BackendResponse resp;
    try {
        const BackendRequest req = decode_request(request);
        resp = answer(req);
    } catch (const ProtocolError& e) {
        resp = error_response(0, "bad_request", e.what());
    }
    if (mode == Mode::wrong_id) resp.id += 1;
    std::string line = encode_response(resp);
    if (mode == Mode::malformed) line = line.substr(0, line.size() / 2);
    return line;
}

Server::Server(Mode mode, std::uint16_t port) : mode_(mode) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(listen_fd_, 16) != 0) {
        const std::string err = std::strerror(errno);
        ::close(listen_fd_);
        throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + err);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
}

Server::~Server() { stop(); }

void Server::stop() {
    if (!running_.exchange(false)) return;
    if (acceptor_.joinable()) acceptor_.join();
    ::close(listen_fd_);
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(workers_mutex_);
        for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    for (auto& w : workers) w.join();
    std::lock_guard lock(workers_mutex_);
    for (int fd : client_fds_) ::close(fd);
    client_fds_.clear();
}

void Server::accept_loop() {
    while (running_) {
        pollfd p{listen_fd_, POLLIN, 0};
        if (::poll(&p, 1, 50) <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard lock(workers_mutex_);
        client_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve(fd); });
    }
}

void Server::serve(int fd) {
    std::string buffer;
    char chunk[65536];
    for (;;) {
        const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t start = 0;
        for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n', start)) {
            std::string out = respond(std::string_view(buffer).substr(start, nl - start), mode_);
            out += '\n';
            ++served_;
            std::size_t sent = 0;
            while (sent < out.size()) {
                const ssize_t m = ::send(fd, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
                if (m < 0 && errno == EINTR) continue;
                if (m <= 0) return;
                sent += static_cast<std::size_t>(m);
            }
            start = nl + 1;
        }
        buffer.erase(0, start);
    }
}

} // namespace midas::echo
