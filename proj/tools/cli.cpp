#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "saltbio/audit.hpp"
#include "saltbio/auth_core.hpp"
#include "saltbio/eam.hpp"
#include "saltbio/error.hpp"
#include "saltbio/federation.hpp"
#include "saltbio/metrics.hpp"
#include "saltbio/report.hpp"
#include "saltbio/salt_token.hpp"
#include "saltbio/tier_cipher.hpp"
#include "saltbio/time.hpp"

namespace saltbio::cli {

namespace {

struct Options {
  std::string store_path;
  std::string log_path = "saltbio.log";
  std::string server_id = "local";
  std::string at;
  bool dry_run = false;

  // Pipeline.
  std::string p = "11", q = "13", d = "7";
  std::string e;  // scaling override
  std::string mode = "multiply";
  int radix = 2;
  unsigned k = 3;
  std::string gate = "OR";

  // Policy and limits.
  double tau = 0.15;
  std::uint32_t max_failures = 3;
  int skew = 1;
  std::size_t feature_length = kDefaultFeatureLength;
  std::size_t max_users = 100;
  std::size_t max_refs = 4;
};

std::uint64_t parse_hex_seed(const std::string& s) {
  std::string digits = s;
  if (digits.rfind("0x", 0) == 0 || digits.rfind("0X", 0) == 0) digits = digits.substr(2);
  if (digits.empty() || digits.size() > 16 || digits.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw Error(Errc::format, "seed must be up to 16 hex digits: " + s);
  }
  return std::stoull(digits, nullptr, 16);
}

PipelineConfig pipeline_config(const Options& o, std::ostream& err) {
  PipelineConfig cfg;
  cfg.rsa = keygen(parse_decimal(o.p), parse_decimal(o.q), parse_decimal(o.d));
  if (!o.e.empty()) cfg.scale_override = parse_decimal(o.e);
  cfg.salt_combine = salt_combine_from_string(o.mode);
  cfg.radix = radix_from_int(o.radix);
  cfg.series_terms = o.k;
  cfg.gate = gate_from_string(o.gate);
  if (cfg.rsa.below_recommended_size()) {
    err << "warning: p and q are below the 2048-bit production size\n";
  }
  return cfg;
}

AuthPolicy auth_policy(const Options& o) {
  return AuthPolicy{o.tau, o.max_failures, o.skew, o.feature_length};
}

std::int64_t now_of(const Options& o) { return o.at.empty() ? wall_clock_seconds() : parse_time(o.at); }

/// A node bound to the configured store and audit log.
std::unique_ptr<ServerNode> open_node(const Options& o, std::ostream& err) {
  std::optional<std::filesystem::path> log;
  if (!o.dry_run) log = o.log_path;
  auto node = std::make_unique<ServerNode>(o.server_id, pipeline_config(o, err), auth_policy(o),
                                           StoreLimits{o.max_users, o.max_refs}, log);
  if (std::filesystem::exists(o.store_path)) node->store().load(o.store_path);
  return node;
}

void save_node(const Options& o, ServerNode& node) {
  if (!o.dry_run) node.store().save(o.store_path);
}

std::vector<BiometricSample> load_samples(const std::vector<std::string>& paths, const std::string& modality) {
  std::vector<BiometricSample> out;
  const Modality m = modality_from_string(modality);
  for (const auto& p : paths) out.push_back(read_sample_file(p, m));
  return out;
}

void print_result(std::ostream& out, const AuthResult& r) {
  out << to_string(r.outcome) << '\n';
  if (r.distance) out << "distance: " << *r.distance << '\n';
  if (r.matched_reference) out << "matched_reference: " << *r.matched_reference << '\n';
  if (r.template_value) out << "template: " << *r.template_value << '\n';
}

std::map<std::string, std::string> parse_peers(const std::vector<std::string>& specs) {
  std::map<std::string, std::string> peers;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw Error(Errc::format, "peer must be <name>=<host:port>: " + s);
    }
    peers[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return peers;
}

volatile std::sig_atomic_t g_stop = 0;
TcpServer* g_server = nullptr;

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("SALTBIO_STORE")) {
    o.store_path = env;
  } else {
    o.store_path = "saltbio.store";
  }

  CLI::App app{"Biometric + rotating salt-code server authentication toolkit", "saltbio"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--store", o.store_path, "Template store file (env SALTBIO_STORE)");
  app.add_option("--log", o.log_path, "Audit log file");
  app.add_option("--server-id", o.server_id, "Id of this server");
  app.add_option("--at", o.at, "Time as unix seconds or RFC 3339 (default: now)");
  app.add_flag("--dry-run", o.dry_run, "Do not write the store or the audit log");
  app.add_option("--p", o.p, "RSA prime p");
  app.add_option("--q", o.q, "RSA prime q");
  app.add_option("--d", o.d, "RSA decryption exponent d");
  app.add_option("--e", o.e, "Scaling factor override (default: inverse of d)");
  app.add_option("--mode", o.mode, "Salt combine mode: multiply | concat_digits");
  app.add_option("--radix", o.radix, "Radix for the bit conversion: 2 | 8 | 16");
  app.add_option("--k", o.k, "Number of alternating series terms after x");
  app.add_option("--gate", o.gate, "Fusion gate: OR | AND | XOR");
  app.add_option("--tau", o.tau, "Match threshold (normalized Hamming distance)");
  app.add_option("--max-failures", o.max_failures, "Failures before lockout");
  app.add_option("--skew", o.skew, "Accepted salt-code clock skew in steps");
  app.add_option("--feature-length", o.feature_length, "Feature template length in bits");
  app.add_option("--max-users", o.max_users, "Store user capacity");
  app.add_option("--max-refs", o.max_refs, "References per user");

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "Derive RSA parameters from p, q, d");

  // pipeline
  std::string password;
  std::string salt_value;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Print the stage trace for a password and salt");
  pipeline_cmd->add_option("--password", password)->required();
  pipeline_cmd->add_option("--salt", salt_value)->required();

  // salt
  std::string seed_hex = "0";
  int digits = 6;
  std::int64_t step_seconds = 60;
  auto* salt_cmd = app.add_subcommand("salt", "Print the salt code for a device at a time");
  salt_cmd->add_option("--seed", seed_hex, "Device seed (hex)")->required();
  salt_cmd->add_option("--digits", digits);
  salt_cmd->add_option("--step", step_seconds, "Seconds per code");

  // enroll
  std::string user, eam_password, home, modality = "fingerprint";
  std::vector<std::string> sample_paths;
  auto* enroll_cmd = app.add_subcommand("enroll", "Enroll a user");
  enroll_cmd->add_option("--user", user)->required();
  enroll_cmd->add_option("--sample", sample_paths, "Sample file (repeatable)")->required();
  enroll_cmd->add_option("--modality", modality);
  enroll_cmd->add_option("--password", password)->required();
  enroll_cmd->add_option("--eam-password", eam_password)->required();
  enroll_cmd->add_option("--seed", seed_hex, "Salt device seed (hex)")->required();
  enroll_cmd->add_option("--digits", digits);
  enroll_cmd->add_option("--home", home, "Home server (default: --server-id)");

  // login
  std::string code;
  std::vector<std::string> peer_specs;
  auto* login_cmd = app.add_subcommand("login", "Authenticate; prints the outcome");
  login_cmd->add_option("--user", user)->required();
  login_cmd->add_option("--sample", sample_paths)->required()->expected(1);
  login_cmd->add_option("--modality", modality);
  login_cmd->add_option("--password", password)->required();
  login_cmd->add_option("--code", code, "Current salt code")->required();
  login_cmd->add_option("--home", home, "Home server of the user, for referral logins");
  login_cmd->add_option("--peer", peer_specs, "<name>=<host:port> (repeatable)");

  // eam
  std::string change_id, approval_status = "Approved", action;
  std::vector<std::string> approvers;
  std::size_t index = 0;
  std::string new_user, new_password, new_eam_password, new_seed = "0";
  auto* eam_cmd = app.add_subcommand("eam", "Emergency access: update, reset or add a profile");
  eam_cmd->add_option("--user", user)->required();
  eam_cmd->add_option("--eam-password", eam_password)->required();
  eam_cmd->add_option("--code", code)->required();
  eam_cmd->add_option("--change-id", change_id)->required();
  eam_cmd->add_option("--approver", approvers, "Approver role (repeatable)");
  eam_cmd->add_option("--approval-status", approval_status);
  eam_cmd->add_option("--action", action)->required()->check(CLI::IsMember({"update", "reset", "add"}));
  eam_cmd->add_option("--index", index, "Reference index for update");
  eam_cmd->add_option("--sample", sample_paths, "New sample file(s)");
  eam_cmd->add_option("--modality", modality);
  eam_cmd->add_option("--new-user", new_user);
  eam_cmd->add_option("--new-password", new_password);
  eam_cmd->add_option("--new-eam-password", new_eam_password);
  eam_cmd->add_option("--new-seed", new_seed);
  eam_cmd->add_option("--home", home);

  // report
  std::vector<std::string> log_files, servers;
  std::string date, report_out;
  auto* report_cmd = app.add_subcommand("report", "End-of-day report from audit logs");
  report_cmd->add_option("--log-file", log_files, "Audit log (repeatable; default --log)");
  report_cmd->add_option("--date", date, "UTC date YYYY-MM-DD (default: date of --at)");
  report_cmd->add_option("--server", servers, "Restrict to these servers (repeatable)");
  report_cmd->add_option("--out", report_out, "Also write the report to this path");
  std::uint64_t images = 0, capacity = 0;
  report_cmd->add_option("--images", images, "Enrolled images, for the redundancy percentage");
  report_cmd->add_option("--capacity", capacity, "Possible images of the technique");

  // metrics
  std::string scores_path;
  std::size_t grid_steps = 20;
  auto* metrics_cmd = app.add_subcommand("metrics", "FAR/FRR table, ROC/DET points and EER from a score file");
  metrics_cmd->add_option("--scores", scores_path)->required();
  metrics_cmd->add_option("--grid", grid_steps, "Number of threshold steps between 0 and 1");

  // serve
  std::string listen = "127.0.0.1:7700";
  auto* serve_cmd = app.add_subcommand("serve", "Serve referral requests for this node");
  serve_cmd->add_option("--id", o.server_id, "Server id");
  serve_cmd->add_option("--listen", listen, "host:port");
  serve_cmd->add_option("--peer", peer_specs, "<name>=<host:port> (repeatable)");

  // backup / restore
  std::string path;
  auto* backup_cmd = app.add_subcommand("backup", "Export the store to a backup artifact");
  backup_cmd->add_option("--out", path)->required();
  auto* restore_cmd = app.add_subcommand("restore", "Replace the store from a backup artifact");
  restore_cmd->add_option("--in", path)->required();

  if (args.empty()) {
    err << app.help();
    return 2;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (keygen_cmd->parsed()) {
      const auto k = keygen(parse_decimal(o.p), parse_decimal(o.q), parse_decimal(o.d));
      out << "p: " << k.p << "\nq: " << k.q << "\nn: " << k.n << "\nm: " << k.m << "\nd: " << k.d << "\ne: " << k.e
          << '\n';
      if (k.below_recommended_size()) err << "warning: p and q are below the 2048-bit production size\n";
      return 0;
    }
    if (pipeline_cmd->parsed()) {
      const auto cfg = pipeline_config(o, err);
      out << format_trace(encrypt_password(password, parse_decimal(salt_value), cfg));
      return 0;
    }
    if (salt_cmd->parsed()) {
      const auto dev = SaltDevice::make(parse_hex_seed(seed_hex), digits, step_seconds);
      const auto t = now_of(o);
      out << "step: " << dev.step_of(t) << "\ncode: " << code_at(dev, t) << '\n';
      return 0;
    }
    if (enroll_cmd->parsed()) {
      auto node = open_node(o, err);
      EnrollmentRequest req;
      req.user_id = user;
      req.home_server = home;
      req.samples = load_samples(sample_paths, modality);
      req.password = password;
      req.eam_password = eam_password;
      req.seed = parse_hex_seed(seed_hex);
      req.digits = digits;
      const auto rec = node->auth().enroll(req, now_of(o));
      save_node(o, *node);
      out << "enrolled: " << rec.user_id << "\nreferences: " << rec.references.size() << "\nhome: " << rec.home_server
          << '\n';
      return 0;
    }
    if (login_cmd->parsed()) {
      auto node = open_node(o, err);
      for (const auto& [name, addr] : parse_peers(peer_specs)) node->add_peer(name, TcpTransport::from_address(addr));
      const auto sample = load_samples(sample_paths, modality).front();
      const auto t = now_of(o);
      const AuthResult r = home.empty() || home == o.server_id
                               ? node->auth().login(user, sample, password, code, t)
                               : node->remote_login(home, user, sample, password, code, t);
      save_node(o, *node);
      print_result(out, r);
      return 0;
    }
    if (eam_cmd->parsed()) {
      auto node = open_node(o, err);
      EmergencyAccess eam(node->auth());
      const auto t = now_of(o);
      ChangeApproval approval{change_id, approvers, approval_status_from_string(approval_status)};
      const auto session = eam.open(user, eam_password, code, t, approval);
      EamAck ack{};
      const auto samples = load_samples(sample_paths, modality);
      if (action == "update") {
        if (samples.size() != 1) throw Error(Errc::parameter, "update takes exactly one --sample");
        ack = eam.update_reference(session, index, samples.front(), t);
      } else if (action == "reset") {
        ack = eam.reset_references(session, samples, t);
      } else {
        EnrollmentRequest req;
        req.user_id = new_user;
        req.home_server = home;
        req.samples = samples;
        req.password = new_password;
        req.eam_password = new_eam_password;
        req.seed = parse_hex_seed(new_seed);
        ack = eam.add_profile(session, req, t);
      }
      eam.close(session);
      save_node(o, *node);
      out << "eam " << to_string(ack.op) << ": ok\nuser: " << ack.user_id << "\nreferences: " << ack.reference_count
          << "\naudit_seq: " << ack.audit_seq << '\n';
      return 0;
    }
    if (report_cmd->parsed()) {
      if (log_files.empty()) log_files.push_back(o.log_path);
      std::vector<AuthEvent> events;
      for (const auto& f : log_files) {
        auto part = read_log(f);
        events.insert(events.end(), part.begin(), part.end());
      }
      if (date.empty()) date = utc_date(now_of(o));
      std::set<std::string> ids(servers.begin(), servers.end());
      if (ids.empty()) {
        for (const auto& e : events) ids.insert(e.server);
      }
      std::vector<ReportSummary> per_server;
      for (const auto& id : ids) per_server.push_back(eod_report(events, id, date));
      auto total = consolidate(per_server);
      total.date = date;
      out << render_report(per_server, total);
      if (capacity > 0) out << "pct_redundancy: " << pct_redundancy(images, capacity) << '\n';
      if (!report_out.empty() && !o.dry_run) write_report(report_out, per_server, total);
      return 0;
    }
    if (metrics_cmd->parsed()) {
      std::ifstream in(scores_path);
      if (!in) throw Error(Errc::io, "cannot open score file " + scores_path);
      const ScoreSet s = read_scores(in);
      const auto grid = uniform_grid(grid_steps);
      out << "# tau far frr far_probit frr_probit\n";
      for (const auto& p : det_points(s, grid)) {
        out << p.tau << ' ' << p.far << ' ' << p.frr << ' ' << p.far_probit << ' ' << p.frr_probit << '\n';
      }
      const auto r = eer(s);
      out << "EER " << r.eer << " at tau " << r.tau << " (far " << r.far << ", frr " << r.frr << ")\n";
      return 0;
    }
    if (serve_cmd->parsed()) {
      auto node = open_node(o, err);
      for (const auto& [name, addr] : parse_peers(peer_specs)) node->add_peer(name, TcpTransport::from_address(addr));
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw Error(Errc::format, "--listen must be host:port");
      const auto port = parse_decimal(listen.substr(colon + 1));
      if (port > 65535) throw Error(Errc::format, "port out of range");
      TcpServer server(*node, listen.substr(0, colon), static_cast<std::uint16_t>(port));
      g_server = &server;
      std::signal(SIGINT, [](int) {
        g_stop = 1;
        if (g_server) g_server->stop();
      });
      std::signal(SIGTERM, [](int) {
        g_stop = 1;
        if (g_server) g_server->stop();
      });
      out << "serving " << o.server_id << " on port " << server.port() << std::endl;
      server.serve();
      g_server = nullptr;
      save_node(o, *node);
      return 0;
    }
    if (backup_cmd->parsed()) {
      auto node = open_node(o, err);
      const auto artifact = node->export_store(now_of(o));
      if (!o.dry_run) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << artifact;
        if (!f) throw Error(Errc::io, "cannot write backup " + path);
      }
      out << "exported: " << node->store().size() << '\n';
      return 0;
    }
    if (restore_cmd->parsed()) {
      auto node = open_node(o, err);
      std::ifstream f(path, std::ios::binary);
      if (!f) throw Error(Errc::io, "cannot open backup " + path);
      std::ostringstream buf;
      buf << f.rdbuf();
      const auto n = node->import_store(buf.str());
      save_node(o, *node);
      out << "imported: " << n << '\n';
      return 0;
    }
  } catch (const EamDenied& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace saltbio::cli
