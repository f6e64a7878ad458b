#include "midas/backend.hpp"

#include <json.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace midas {

using nlohmann::json;

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr std::size_t kMaxFrame = std::size_t{1} << 30;

constexpr std::array<int, 256> make_reverse() {
    std::array<int, 256> r{};
    for (auto& v : r) v = -1;
    for (int i = 0; i < 64; ++i) r[static_cast<unsigned char>(kAlphabet[i])] = i;
    return r;
}

constexpr auto kReverse = make_reverse();

} // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8 | bytes[i + 2];
        out += kAlphabet[v >> 18 & 63];
        out += kAlphabet[v >> 12 & 63];
        out += kAlphabet[v >> 6 & 63];
        out += kAlphabet[v & 63];
    }
    if (const std::size_t rest = bytes.size() - i; rest > 0) {
        std::uint32_t v = bytes[i] << 16;
        if (rest == 2) v |= bytes[i + 1] << 8;
        out += kAlphabet[v >> 18 & 63];
        out += kAlphabet[v >> 12 & 63];
        out += rest == 2 ? kAlphabet[v >> 6 & 63] : '=';
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) throw ProtocolError("base64 length is not a multiple of 4", text.size());
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int v[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=' && i + 4 == text.size() && k >= 2) {
                v[k] = 0;
                ++pad;
                continue;
            }
            if (pad > 0) throw ProtocolError("base64 padding in the middle of a quantum", i + k);
            v[k] = kReverse[static_cast<unsigned char>(c)];
            if (v[k] < 0) throw ProtocolError("invalid base64 character", i + k);
        }
        const std::uint32_t word = static_cast<std::uint32_t>(v[0] << 18 | v[1] << 12 | v[2] << 6 | v[3]);
        out.push_back(static_cast<std::uint8_t>(word >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>(word >> 8 & 0xFF));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(word & 0xFF));
    }
    return out;
}

std::size_t TensorPayload::element_count() const noexcept {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

namespace {

json tensor_to_json(const TensorPayload& t) {
    if (t.data.size() != t.element_count()) throw DimensionError("tensor payload size does not match its shape");
    std::vector<std::uint8_t> bytes(4 * t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(t.data[i]);
        for (int k = 0; k < 4; ++k) bytes[4 * i + k] = static_cast<std::uint8_t>(bits >> (8 * k));
    }
    return json{{"shape", t.shape}, {"data", base64_encode(bytes)}};
}

TensorPayload tensor_from_json(const json& j) {
    TensorPayload t;
    t.shape = j.at("shape").get<std::vector<std::size_t>>();
    const auto bytes = base64_decode(j.at("data").get<std::string>());
    if (bytes.size() != 4 * t.element_count()) {
        throw ProtocolError("tensor payload has " + std::to_string(bytes.size()) + " bytes, shape needs " +
                                std::to_string(4 * t.element_count()),
                            0);
    }
    t.data.resize(t.element_count());
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        std::uint32_t bits = 0;
        for (int k = 0; k < 4; ++k) bits |= static_cast<std::uint32_t>(bytes[4 * i + k]) << (8 * k);
        t.data[i] = std::bit_cast<float>(bits);
    }
    return t;
}

json parse_frame(std::string_view line) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("malformed frame: ") + e.what(), e.byte);
    }
}

template <typename Fn>
auto structured(Fn fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("frame does not follow the protocol: ") + e.what(), 0);
    }
}

} // namespace

std::string encode_request(const BackendRequest& req) {
    json j{{"id", req.id},         {"op", req.op},
           {"timestep", req.timestep}, {"prompt", req.prompt},
           {"ref_weight", req.ref_weight}, {"guidance", req.guidance}};
    if (req.tensor) j["tensor"] = tensor_to_json(*req.tensor);
    if (req.ref) j["ref"] = tensor_to_json(*req.ref);
    return j.dump();
}

BackendRequest decode_request(std::string_view line) {
    const json j = parse_frame(line);
    return structured([&] {
        BackendRequest req;
        req.id = j.at("id").get<std::uint64_t>();
        req.op = j.at("op").get<std::string>();
        req.timestep = j.value("timestep", 0);
        req.prompt = j.value("prompt", std::string{});
        req.ref_weight = j.value("ref_weight", 0.0);
        req.guidance = j.value("guidance", 0.0);
        if (j.contains("tensor")) req.tensor = tensor_from_json(j.at("tensor"));
        if (j.contains("ref")) req.ref = tensor_from_json(j.at("ref"));
        return req;
    });
}

std::string encode_response(const BackendResponse& resp) {
    json j{{"id", resp.id}};
    if (resp.tensor) j["tensor"] = tensor_to_json(*resp.tensor);
    if (resp.info) {
        const BackendInfo& i = *resp.info;
        j["info"] = json{{"protocol", i.protocol},
                         {"latent", {i.latent.channels, i.latent.height, i.latent.width}},
                         {"scale", i.scale},
                         {"schedule",
                          {{"train_steps", i.schedule.train_steps},
                           {"beta_start", i.schedule.beta_start},
                           {"beta_end", i.schedule.beta_end}}},
                         {"concurrency_safe", i.concurrency_safe}};
    }
    if (resp.error_code || resp.error_message) {
        j["error"] = json{{"code", resp.error_code.value_or("")}, {"message", resp.error_message.value_or("")}};
    }
    return j.dump();
}

BackendResponse decode_response(std::string_view line) {
    const json j = parse_frame(line);
    return structured([&] {
        BackendResponse resp;
        resp.id = j.at("id").get<std::uint64_t>();
        if (j.contains("tensor")) resp.tensor = tensor_from_json(j.at("tensor"));
        if (j.contains("info")) {
            const json& i = j.at("info");
            BackendInfo info;
            info.protocol = i.at("protocol").get<int>();
            const auto dims = i.at("latent").get<std::vector<std::size_t>>();
            if (dims.size() != 3) throw ProtocolError("info.latent must list C, H, W", 0);
            info.latent = Shape{dims[0], dims[1], dims[2]};
            info.scale = i.value("scale", std::size_t{8});
            if (i.contains("schedule")) {
                const json& s = i.at("schedule");
                info.schedule.train_steps = s.value("train_steps", 1000);
                info.schedule.beta_start = s.value("beta_start", 0.00085);
                info.schedule.beta_end = s.value("beta_end", 0.012);
            }
            info.concurrency_safe = i.value("concurrency_safe", false);
            resp.info = info;
        }
        if (j.contains("error")) {
            const json& e = j.at("error");
            resp.error_code = e.value("code", std::string{});
            resp.error_message = e.value("message", std::string{});
        }
        return resp;
    });
}

TensorPayload image_payload(const ImageBuffer& img) {
    TensorPayload t{{img.height, img.width, 3}, {}};
    t.data.assign(img.data.begin(), img.data.end());
    return t;
}

ImageBuffer payload_image(const TensorPayload& t) {
    if (t.shape.size() != 3 || t.shape[2] != 3) throw ProtocolError("image tensor must have shape [H, W, 3]", 0);
    ImageBuffer img(t.shape[1], t.shape[0]);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::isfinite(t.data[i]) ? t.data[i] : 0.0;
        img.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return img;
}

TensorPayload latent_payload(const Latent& z) {
    return TensorPayload{{z.shape().channels, z.shape().height, z.shape().width},
                         std::vector<float>(z.values().begin(), z.values().end())};
}

Latent payload_latent(const TensorPayload& t) {
    if (t.shape.size() != 3) throw ProtocolError("latent tensor must have shape [C, H, W]", 0);
    return Latent(Shape{t.shape[0], t.shape[1], t.shape[2]}, t.data);
}

Session::~Session() {
    if (fd_ >= 0) ::close(fd_);
}

std::shared_ptr<Session> Session::connect(const std::string& address) {
    std::string rest = address;
    if (rest.rfind("tcp:", 0) == 0) rest = rest.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
        throw ConnectionError("backend address must be host:port, got '" + address + "'");
    }
    const std::string host = rest.substr(0, colon);
    const std::string port = rest.substr(colon + 1);

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found); rc != 0) {
        throw ConnectionError("cannot resolve '" + address + "': " + ::gai_strerror(rc));
    }
    int fd = -1;
    int last_errno = 0;
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            last_errno = errno;
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        last_errno = errno;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) throw ConnectionError("cannot connect to '" + address + "': " + std::strerror(last_errno));
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return std::shared_ptr<Session>(new Session(fd));
}

std::string Session::read_line() {
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        if (buffer_.size() > kMaxFrame) throw ProtocolError("frame exceeds size limit", buffer_.size());
        char chunk[65536];
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n == 0) throw ConnectionError("backend closed the connection");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ConnectionError(std::string("read from backend failed: ") + std::strerror(errno));
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

BackendResponse Session::call(BackendRequest req) {
    std::lock_guard lock(mutex_);
    req.id = next_id_++;
    std::string frame = encode_request(req);
    frame += '\n';
    std::size_t sent = 0;
    while (sent < frame.size()) {
        const ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ConnectionError(std::string("write to backend failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
    BackendResponse resp = decode_response(read_line());
    if (resp.id != req.id) throw IdMismatchError(req.id, resp.id);
    if (resp.error_code || resp.error_message) {
        throw ServerError(resp.error_code.value_or(""), resp.error_message.value_or(""));
    }
    return resp;
}

BackendInfo Session::info() {
    BackendRequest req;
    req.op = "info";
    const BackendResponse resp = call(req);
    if (!resp.info) throw ProtocolError("info response carries no info object", 0);
    if (resp.info->protocol != kProtocolVersion) {
        throw BackendError("backend speaks protocol " + std::to_string(resp.info->protocol) + ", expected " +
                           std::to_string(kProtocolVersion));
    }
    return *resp.info;
}

std::string resolve_backend_address(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("MIDAS_BACKEND"); env != nullptr) return env;
    return {};
}

Latent RemotePredictor::predict(const Latent& z, const Timestep& step, const Condition& cond) const {
    BackendRequest req;
    req.op = "predict_noise";
    req.tensor = latent_payload(z);
    req.timestep = step.train_step;
    req.prompt = cond.prompt;
    req.guidance = guidance_;
    if (cond.ref_latent && cond.ref_weight > 0.0) {
        req.ref = latent_payload(*cond.ref_latent);
        req.ref_weight = cond.ref_weight;
    }
    const BackendResponse resp = session_->call(std::move(req));
    if (!resp.tensor) throw ProtocolError("predict_noise response carries no tensor", 0);
    Latent eps = payload_latent(*resp.tensor);
    if (eps.shape() != z.shape()) {
        throw DimensionError("backend returned noise of shape " + eps.shape().str() + " for " + z.shape().str());
    }
    return eps;
}

Latent RemoteCodec::encode(const ImageBuffer& img) const {
    BackendRequest req;
    req.op = "encode";
    req.tensor = image_payload(img);
    const BackendResponse resp = session_->call(std::move(req));
    if (!resp.tensor) throw ProtocolError("encode response carries no tensor", 0);
    return payload_latent(*resp.tensor);
}

ImageBuffer RemoteCodec::decode(const Latent& z) const {
    BackendRequest req;
    req.op = "decode";
    req.tensor = latent_payload(z);
    const BackendResponse resp = session_->call(std::move(req));
    if (!resp.tensor) throw ProtocolError("decode response carries no tensor", 0);
    return payload_image(*resp.tensor);
}

} // namespace midas
