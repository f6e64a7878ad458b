#pragma once

#include "midas/codec.hpp"
#include "midas/diffusion.hpp"
#include "midas/errors.hpp"
#include "midas/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace midas {

/// Version sent and expected in the "info" handshake.
inline constexpr int kProtocolVersion = 1;

class BackendError : public Error {
public:
    using Error::Error;
};

/// Connecting, reading or writing the socket failed.
class ConnectionError : public BackendError {
public:
    using BackendError::BackendError;
};

/// The peer sent a frame that is not valid protocol JSON.
class ProtocolError : public BackendError {
public:
    ProtocolError(const std::string& what, std::size_t byte_offset)
        : BackendError(what + " (at byte " + std::to_string(byte_offset) + ")"), offset_(byte_offset) {}
    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A response carried an id other than the one just sent.
class IdMismatchError : public BackendError {
public:
    IdMismatchError(std::uint64_t expected, std::uint64_t got)
        : BackendError("response id " + std::to_string(got) + " does not match request id " +
                       std::to_string(expected)),
          expected_(expected), got_(got) {}
    std::uint64_t expected() const noexcept { return expected_; }
    std::uint64_t got() const noexcept { return got_; }

private:
    std::uint64_t expected_;
    std::uint64_t got_;
};

/// The server answered with an error object.
class ServerError : public BackendError {
public:
    ServerError(std::string code, std::string message)
        : BackendError("server error [" + code + "]: " + message), code_(std::move(code)),
          message_(std::move(message)) {}
    const std::string& code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string code_;
    std::string message_;
};

/// Shape plus float32 values; on the wire the values are base64 of
/// little-endian bytes.
struct TensorPayload {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    std::size_t element_count() const noexcept;
    friend bool operator==(const TensorPayload&, const TensorPayload&) = default;
};

struct BackendInfo {
    int protocol = kProtocolVersion;
    Shape latent;
    std::size_t scale = 8;
    BaseSchedule schedule;
    bool concurrency_safe = false;

    friend bool operator==(const BackendInfo& a, const BackendInfo& b) {
        return a.protocol == b.protocol && a.latent == b.latent && a.scale == b.scale &&
               a.schedule.train_steps == b.schedule.train_steps && a.schedule.beta_start == b.schedule.beta_start &&
               a.schedule.beta_end == b.schedule.beta_end && a.concurrency_safe == b.concurrency_safe;
    }
};

struct BackendRequest {
    std::string op;  ///< "predict_noise" | "encode" | "decode" | "info"
    std::uint64_t id = 0;
    std::optional<TensorPayload> tensor;
    std::optional<TensorPayload> ref;
    int timestep = 0;
    std::string prompt;
    double ref_weight = 0.0;
    double guidance = 0.0;

    friend bool operator==(const BackendRequest&, const BackendRequest&) = default;
};

struct BackendResponse {
    std::uint64_t id = 0;
    std::optional<TensorPayload> tensor;
    std::optional<BackendInfo> info;
    std::optional<std::string> error_code;
    std::optional<std::string> error_message;

    friend bool operator==(const BackendResponse&, const BackendResponse&) = default;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// One JSON object without the trailing newline.
std::string encode_request(const BackendRequest& req);
BackendRequest decode_request(std::string_view line);
std::string encode_response(const BackendResponse& resp);
BackendResponse decode_response(std::string_view line);

/// Image tensors travel as [height, width, 3] samples on the 0..255 scale.
TensorPayload image_payload(const ImageBuffer& img);
ImageBuffer payload_image(const TensorPayload& t);
TensorPayload latent_payload(const Latent& z);
Latent payload_latent(const TensorPayload& t);

/// A connected stream socket speaking the protocol. One request is in flight
/// at a time; concurrent callers are serialized.
class Session {
public:
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Accepts "host:port" or "tcp:host:port".
    static std::shared_ptr<Session> connect(const std::string& address);

    /// Assigns the next id, sends, and waits for the matching response.
    /// Server-side error objects are raised as ServerError.
    BackendResponse call(BackendRequest req);

    BackendInfo info();

private:
    explicit Session(int fd) : fd_(fd) {}
    std::string read_line();

    int fd_;
    std::uint64_t next_id_ = 1;
    std::string buffer_;
    std::mutex mutex_;
};

/// Address from the flag when non-empty, else MIDAS_BACKEND, else empty.
std::string resolve_backend_address(const std::string& flag);

class RemotePredictor final : public NoisePredictor {
public:
    RemotePredictor(std::shared_ptr<Session> session, double guidance, bool concurrency_safe)
        : session_(std::move(session)), guidance_(guidance), concurrency_safe_(concurrency_safe) {}

    Latent predict(const Latent& z, const Timestep& step, const Condition& cond) const override;
    bool concurrency_safe() const noexcept override { return concurrency_safe_; }

private:
    std::shared_ptr<Session> session_;
    double guidance_;
    bool concurrency_safe_;
};

class RemoteCodec final : public LatentCodec {
public:
    RemoteCodec(std::shared_ptr<Session> session, BackendInfo info) : session_(std::move(session)), info_(info) {}

    Latent encode(const ImageBuffer& img) const override;
    ImageBuffer decode(const Latent& z) const override;
    std::size_t scale() const noexcept override { return info_.scale; }
    std::size_t channels() const noexcept override { return info_.latent.channels; }
    bool concurrency_safe() const noexcept override { return info_.concurrency_safe; }

private:
    std::shared_ptr<Session> session_;
    BackendInfo info_;
};

} // namespace midas
