#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "saltbio/audit.hpp"
#include "saltbio/auth_core.hpp"

namespace saltbio {

/// Line-oriented request/response channel to one peer.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Sends one request line (no trailing newline) and returns the response
  /// line. Throws Error(transport) if the peer cannot be reached.
  virtual std::string exchange(const std::string& request_line) = 0;
};

namespace wire {

inline constexpr int kVersion = 1;

/// Referral payload: derived quantities only, never the raw sample.
struct VerifyArgs {
  std::string user;
  BitString feature_bits;
  std::string password_digits;  // decimal; "0" when the password was invalid
  std::string salt_code;
  std::int64_t time = 0;
  Modality modality = Modality::fingerprint;
  std::string origin;  // id of the server the user is sitting at
};

std::string ping_request();
std::string verify_request(const VerifyArgs& args);

/// Strict schema check of a request line. Throws Error(format) for unknown or
/// missing keys, a bits_len that disagrees with feature_bits, or a wrong
/// version.
struct Request {
  std::string op;
  std::optional<VerifyArgs> verify;
};
Request parse_request(std::string_view line);

std::string ok_response(const AuthResult& result);
std::string ok_ping_response(const std::string& server_id);
std::string error_response(std::string_view code, std::string_view msg);

/// Decodes a verify_remote response. Throws Error(referral) carrying the
/// remote error code/message when ok is false, Error(format) when malformed.
AuthResult parse_verify_response(std::string_view line);

}  // namespace wire

/// One authentication server: its store, audit log, login procedure and
/// referral peers.
class ServerNode {
 public:
  ServerNode(std::string server_id, PipelineConfig cfg = {}, AuthPolicy policy = {}, StoreLimits limits = {},
             std::optional<std::filesystem::path> log_path = std::nullopt);

  ServerNode(const ServerNode&) = delete;
  ServerNode& operator=(const ServerNode&) = delete;

  const std::string& id() const noexcept { return id_; }
  TemplateStore& store() noexcept { return store_; }
  AuditLog& log() noexcept { return log_; }
  Authenticator& auth() noexcept { return auth_; }

  /// Throws Error(parameter) when peer_id names this node.
  void add_peer(const std::string& peer_id, std::shared_ptr<Transport> transport);
  bool has_peer(const std::string& peer_id) const;

  /// Login against the record homed on `home_server`. Verification runs on
  /// the home node; both nodes audit the attempt. Unknown peers raise
  /// Error(referral), unreachable ones Error(transport); both are audited
  /// here as ReferralFailed.
  AuthResult remote_login(const std::string& home_server, const std::string& user_id,
                          const BiometricSample& sample, std::string_view password, std::string_view salt_code,
                          std::int64_t unix_time);

  /// Serves one wire request line and returns the response line.
  std::string handle_line(std::string_view request_line);

  /// Header line plus the store lines.
  std::string export_store(std::int64_t now) const;
  /// All-or-nothing replacement of the store from an export artifact.
  std::size_t import_store(std::string_view artifact);

 private:
  std::string id_;
  TemplateStore store_;
  AuditLog log_;
  Authenticator auth_;
  mutable std::mutex peers_mu_;
  std::map<std::string, std::shared_ptr<Transport>> peers_;
};

/// In-process transport calling the target node directly.
class LoopbackTransport final : public Transport {
 public:
  explicit LoopbackTransport(ServerNode& target) : target_(target) {}
  std::string exchange(const std::string& request_line) override;

  /// Simulates an outage: exchange() throws Error(transport) while down.
  void set_down(bool down) { down_ = down; }

 private:
  ServerNode& target_;
  std::atomic<bool> down_{false};
};

/// "host:port" stream-socket transport; one connection per exchange.
class TcpTransport final : public Transport {
 public:
  TcpTransport(std::string host, std::uint16_t port) : host_(std::move(host)), port_(port) {}
  /// Parses "host:port".
  static std::shared_ptr<TcpTransport> from_address(std::string_view address);
  std::string exchange(const std::string& request_line) override;

 private:
  std::string host_;
  std::uint16_t port_;
};

/// Accept loop for a node: connections are handled one at a time, each
/// carrying any number of newline-terminated requests.
class TcpServer {
 public:
  /// Binds and listens; port 0 picks an ephemeral port.
  TcpServer(ServerNode& node, const std::string& host, std::uint16_t port);
  ~TcpServer();

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Runs until stop() is called.
  void serve();
  void stop();

 private:
  void handle_connection(int fd);

  ServerNode& node_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace saltbio
