#include "saltbio/federation.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <set>

#include "json.hpp"
#include "saltbio/error.hpp"
#include "saltbio/time.hpp"

namespace saltbio {

using nlohmann::json;

namespace wire {

namespace {

const std::set<std::string> kVerifyRequired = {"user", "feature_bits", "bits_len", "password_digits", "salt_code",
                                               "time"};
const std::set<std::string> kVerifyOptional = {"modality", "origin"};

json parse_json(std::string_view line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(Errc::format, std::string("malformed wire message: ") + e.what());
  }
}

}  // namespace

std::string ping_request() { return json{{"v", kVersion}, {"op", "ping"}, {"args", json::object()}}.dump(); }

std::string verify_request(const VerifyArgs& a) {
  json args = {
      {"user", a.user},
      {"feature_bits", a.feature_bits.str()},
      {"bits_len", a.feature_bits.size()},
      {"password_digits", a.password_digits},
      {"salt_code", a.salt_code},
      {"time", a.time},
      {"modality", to_string(a.modality)},
      {"origin", a.origin},
  };
  return json{{"v", kVersion}, {"op", "verify_remote"}, {"args", std::move(args)}}.dump();
}

Request parse_request(std::string_view line) {
  const json j = parse_json(line);
  if (!j.is_object() || j.size() != 3 || !j.contains("v") || !j.contains("op") || !j.contains("args")) {
    throw Error(Errc::format, "request must have exactly the keys v, op, args");
  }
  if (!j["v"].is_number_integer() || j["v"].get<int>() != kVersion) {
    throw Error(Errc::version, "unsupported protocol version");
  }
  if (!j["op"].is_string() || !j["args"].is_object()) throw Error(Errc::format, "bad op or args");
  Request req;
  req.op = j["op"].get<std::string>();
  const json& args = j["args"];
  if (req.op == "ping") {
    if (!args.empty()) throw Error(Errc::format, "ping takes no arguments");
    return req;
  }
  if (req.op != "verify_remote") throw Error(Errc::format, "unknown op " + req.op);

  for (const auto& [key, value] : args.items()) {
    if (!kVerifyRequired.contains(key) && !kVerifyOptional.contains(key)) {
      throw Error(Errc::format, "unexpected argument '" + key + "'");
    }
  }
  for (const auto& key : kVerifyRequired) {
    if (!args.contains(key)) throw Error(Errc::format, "missing argument '" + key + "'");
  }
  try {
    VerifyArgs a;
    a.user = args.at("user").get<std::string>();
    a.feature_bits = BitString::parse(args.at("feature_bits").get<std::string>());
    if (args.at("bits_len").get<std::size_t>() != a.feature_bits.size()) {
      throw Error(Errc::format, "bits_len does not match feature_bits");
    }
    a.password_digits = args.at("password_digits").get<std::string>();
    parse_decimal(a.password_digits);
    a.salt_code = args.at("salt_code").get<std::string>();
    a.time = args.at("time").get<std::int64_t>();
    if (args.contains("modality")) a.modality = modality_from_string(args.at("modality").get<std::string>());
    if (args.contains("origin")) a.origin = args.at("origin").get<std::string>();
    req.verify = std::move(a);
  } catch (const json::exception& e) {
    throw Error(Errc::format, std::string("bad argument type: ") + e.what());
  }
  return req;
}

std::string ok_response(const AuthResult& r) {
  json result = {
      {"outcome", to_string(r.outcome)},
      {"distance", r.distance ? json(*r.distance) : json(nullptr)},
      {"matched_reference", r.matched_reference ? json(*r.matched_reference) : json(nullptr)},
      {"template_value", r.template_value ? json(r.template_value->str()) : json(nullptr)},
  };
  return json{{"v", kVersion}, {"ok", true}, {"result", std::move(result)}}.dump();
}

std::string ok_ping_response(const std::string& server_id) {
  return json{{"v", kVersion}, {"ok", true}, {"result", {{"server", server_id}}}}.dump();
}

std::string error_response(std::string_view code, std::string_view msg) {
  return json{{"v", kVersion}, {"ok", false}, {"error", {{"code", code}, {"msg", msg}}}}.dump();
}

AuthResult parse_verify_response(std::string_view line) {
  const json j = parse_json(line);
  try {
    if (j.at("v").get<int>() != kVersion) throw Error(Errc::version, "unsupported protocol version");
    if (!j.at("ok").get<bool>()) {
      const auto& e = j.at("error");
      throw Error(Errc::referral,
                  "peer error " + e.at("code").get<std::string>() + ": " + e.at("msg").get<std::string>());
    }
    const json& r = j.at("result");
    AuthResult out;
    out.outcome = outcome_from_string(r.at("outcome").get<std::string>());
    if (!is_login_outcome(out.outcome)) throw Error(Errc::format, "peer returned a non-login outcome");
    if (!r.at("distance").is_null()) out.distance = r.at("distance").get<double>();
    if (!r.at("matched_reference").is_null()) out.matched_reference = r.at("matched_reference").get<std::size_t>();
    if (!r.at("template_value").is_null()) out.template_value = parse_decimal(r.at("template_value").get<std::string>());
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::format, std::string("malformed verify response: ") + e.what());
  }
}

}  // namespace wire

ServerNode::ServerNode(std::string server_id, PipelineConfig cfg, AuthPolicy policy, StoreLimits limits,
                       std::optional<std::filesystem::path> log_path)
    : id_(std::move(server_id)),
      store_(limits),
      log_(std::move(log_path)),
      auth_(id_, store_, log_, std::move(cfg), policy) {}

void ServerNode::add_peer(const std::string& peer_id, std::shared_ptr<Transport> transport) {
  if (peer_id == id_) throw Error(Errc::parameter, "a node cannot be its own peer");
  std::lock_guard lock(peers_mu_);
  peers_[peer_id] = std::move(transport);
}

bool ServerNode::has_peer(const std::string& peer_id) const {
  std::lock_guard lock(peers_mu_);
  return peers_.contains(peer_id);
}

AuthResult ServerNode::remote_login(const std::string& home_server, const std::string& user_id,
                                    const BiometricSample& sample, std::string_view password,
                                    std::string_view salt_code, std::int64_t unix_time) {
  if (home_server == id_) return auth_.login(user_id, sample, password, salt_code, unix_time);

  auto audit_failure = [&] {
    log_.append(AuthEvent{0, unix_time, id_, user_id, Outcome::referral_failed, "referral", false, home_server});
  };
  std::shared_ptr<Transport> peer;
  {
    std::lock_guard lock(peers_mu_);
    auto it = peers_.find(home_server);
    if (it != peers_.end()) peer = it->second;
  }
  if (!peer) {
    audit_failure();
    throw Error(Errc::referral, "unknown home server: " + home_server);
  }

  wire::VerifyArgs args;
  args.user = user_id;
  const FeatureTemplate probe = feature_bits(sample, auth_.policy().feature_length);
  args.feature_bits = probe.bits;
  args.modality = probe.modality;
  try {
    args.password_digits = ascii_digits(password).str();
  } catch (const Error&) {
    args.password_digits = "0";
  }
  args.salt_code = std::string(salt_code);
  args.time = unix_time;
  args.origin = id_;

  AuthResult result;
  try {
    result = wire::parse_verify_response(peer->exchange(wire::verify_request(args)));
  } catch (const Error&) {
    audit_failure();
    throw;
  }
  result.audit_seq =
      log_.append(AuthEvent{0, unix_time, id_, user_id, result.outcome, "referral", false, home_server});
  return result;
}

std::string ServerNode::handle_line(std::string_view request_line) {
  wire::Request req;
  try {
    req = wire::parse_request(request_line);
  } catch (const Error& e) {
    return wire::error_response(to_string(e.code()), e.what());
  }
  if (req.op == "ping") return wire::ok_ping_response(id_);

  const auto& a = *req.verify;
  VerifyRequest v;
  v.user_id = a.user;
  v.probe = FeatureTemplate{a.feature_bits, a.modality};
  const BigInt digits = parse_decimal(a.password_digits);
  if (digits != 0) v.password_digits = digits;
  v.salt_code = a.salt_code;
  v.unix_time = a.time;
  try {
    const auto result = auth_.verify(v, AuditContext{"referral:" + a.origin, false, std::nullopt});
    return wire::ok_response(result);
  } catch (const Error& e) {
    return wire::error_response(to_string(e.code()), e.what());
  }
}

namespace {

constexpr std::string_view kBackupMagic = "#saltbio-backup";

std::string header_value(std::string_view header, std::string_view key) {
  const std::string needle = "\t" + std::string(key) + "=";
  const auto pos = header.find(needle);
  if (pos == std::string_view::npos) throw Error(Errc::format, "backup header lacks " + std::string(key));
  const auto start = pos + needle.size();
  const auto end = header.find('\t', start);
  return std::string(header.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

}  // namespace

std::string ServerNode::export_store(std::int64_t now) const {
  const std::string body = store_.serialize();
  const auto count = std::count(body.begin(), body.end(), '\n');
  std::string out = std::string(kBackupMagic) + "\tv=1\tserver=" + id_ + "\texported=" + format_rfc3339(now) +
                    "\trecords=" + std::to_string(count) + "\n";
  return out + body;
}

std::size_t ServerNode::import_store(std::string_view artifact) {
  const auto eol = artifact.find('\n');
  if (eol == std::string_view::npos) throw Error(Errc::format, "backup artifact has no header line");
  const std::string_view header = artifact.substr(0, eol);
  if (header.substr(0, kBackupMagic.size()) != kBackupMagic) throw Error(Errc::format, "not a backup artifact");
  if (header_value(header, "v") != "1") throw Error(Errc::version, "unsupported backup version");
  const auto expected = static_cast<std::size_t>(parse_decimal(header_value(header, "records")));

  const std::string_view body = artifact.substr(eol + 1);
  if (!body.empty() && body.back() != '\n') {
    const auto lines = static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n')) + 2;
    throw Error(Errc::format, "line " + std::to_string(lines) + ": truncated record");
  }
  auto records = TemplateStore::parse_lines(body, 2);
  if (records.size() != expected) {
    throw Error(Errc::format, "backup is truncated: header declares " + std::to_string(expected) +
                                  " records, found " + std::to_string(records.size()));
  }
  const std::size_t n = records.size();
  store_.replace_all(std::move(records));
  auth_.invalidate_all();
  return n;
}

std::string LoopbackTransport::exchange(const std::string& request_line) {
  if (down_) throw Error(Errc::transport, "peer " + target_.id() + " is unreachable");
  return target_.handle_line(request_line);
}

namespace {

void send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n <= 0) throw Error(Errc::transport, std::string("send failed: ") + std::strerror(errno));
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Reads up to and excluding '\n'. Returns false on EOF before any byte.
bool recv_line(int fd, std::string& buffer, std::string& line) {
  while (true) {
    const auto pos = buffer.find('\n');
    if (pos != std::string::npos) {
      line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      return true;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0) throw Error(Errc::transport, std::string("recv failed: ") + std::strerror(errno));
    if (n == 0) {
      if (buffer.empty()) return false;
      line = std::move(buffer);
      buffer.clear();
      return true;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

}  // namespace

std::shared_ptr<TcpTransport> TcpTransport::from_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw Error(Errc::format, "address must be host:port");
  const auto port = parse_decimal(address.substr(colon + 1));
  if (port == 0 || port > 65535) throw Error(Errc::format, "port out of range");
  return std::make_shared<TcpTransport>(std::string(address.substr(0, colon)), static_cast<std::uint16_t>(port));
}

std::string TcpTransport::exchange(const std::string& request_line) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(port_);
  if (::getaddrinfo(host_.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw Error(Errc::transport, "cannot resolve " + host_);
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
  Fd sock;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    sock.fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (sock.fd < 0) continue;
    if (::connect(sock.fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(sock.fd);
    sock.fd = -1;
  }
  if (sock.fd < 0) throw Error(Errc::transport, "cannot connect to " + host_ + ":" + port);
  send_all(sock.fd, request_line + "\n");
  ::shutdown(sock.fd, SHUT_WR);
  std::string buffer, line;
  if (!recv_line(sock.fd, buffer, line)) throw Error(Errc::transport, "peer closed without responding");
  return line;
}

TcpServer::TcpServer(ServerNode& node, const std::string& host, std::uint16_t port) : node_(node) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(Errc::io, "cannot create socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string bind_host = host.empty() || host == "localhost" ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(Errc::format, "listen address must be an IPv4 literal: " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw Error(Errc::io, "cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::stop() {
  stopping_ = true;
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
}

void TcpServer::serve() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_) break;
      if (errno == EINTR) continue;
      throw Error(Errc::io, std::string("accept failed: ") + std::strerror(errno));
    }
    handle_connection(fd);
  }
}

void TcpServer::handle_connection(int fd) {
  Fd conn{fd};
  std::string buffer, line;
  try {
    while (recv_line(conn.fd, buffer, line)) {
      if (line.empty()) continue;
      send_all(conn.fd, node_.handle_line(line) + "\n");
    }
  } catch (const Error&) {
    // Client went away mid-exchange; drop the connection.
  }
}

}  // namespace saltbio
