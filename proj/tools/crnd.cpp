// crnd: single-device certifiable-randomness protocol harness.
//
// Subcommands: validate, run, claims, entropy, serve, connect. Exit codes:
// 0 success, 1 a report threshold failed, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include <unistd.h>

#include "crnd/harness.hpp"
#include "crnd/transport.hpp"

using namespace crnd;

namespace {

struct CommonArgs {
  std::string profile = "t1";
  std::string profiles_path;
  u64 seed = 0;
  bool seed_set = false;
};

Profile resolve(const CommonArgs& c) {
  Profile p = resolve_profile(c.profile, c.profiles_path);
  if (c.seed_set) p.master_seed = c.seed;
  return p;
}

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--profile", c.profile, "parameter profile name")->capture_default_str();
  cmd->add_option("--profiles", c.profiles_path,
                  "profiles JSON file (default: $CRND_PROFILE_DIR/profiles.json, else builtin)");
  cmd->add_option("--seed", c.seed, "master seed override")->each([&c](const std::string&) {
    c.seed_set = true;
  });
}

void write_manifest(const std::string& command, const Profile& prof,
                    const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  RunManifest m;
  m.command = command;
  m.profile = prof.name;
  m.seed = prof.master_seed;
  m.config_digest = profile_digest(prof);
  m.outputs = outputs;
  std::ofstream f(outputs.front() + ".manifest.json", std::ios::trunc);
  f << manifest_to_json(m).dump(2) << "\n";
}

int check_profile(const Profile& prof) {
  ValidationReport rep = validate_params(prof.params);
  if (!rep.ok) {
    std::cerr << "profile '" << prof.name << "' failed validation:\n" << rep.to_text();
    return 2;
  }
  for (const auto& w : rep.warnings) std::cerr << "note [" << prof.name << "]: " << w << "\n";
  return 0;
}

int cmd_validate(const CommonArgs& common) {
  Profile prof = resolve(common);
  ValidationReport rep = validate_params(prof.params);
  std::cout << "profile " << prof.name << ": " << rep.to_text();
  return rep.ok ? 0 : 2;
}

int cmd_run(const CommonArgs& common, const std::string& variant, const std::string& adversary,
            double alpha, std::size_t sessions, const std::string& transport, int threads,
            const std::string& out_path, const std::string& summary_path, bool timings,
            const std::string& force) {
  Profile prof = resolve(common);
  if (int rc = check_profile(prof)) return rc;

  BatchOptions opts;
  opts.variant = variant_from_name(variant);
  opts.prover.kind = adversary_from_name(adversary);
  opts.prover.skew_alpha = alpha;
  opts.sessions = sessions;
  opts.master_seed = prof.master_seed;
  opts.threads = threads;
  if (transport == "inproc")
    opts.transport = TransportKind::inproc;
  else if (transport == "stream")
    opts.transport = TransportKind::stream;
  else {
    std::cerr << "unknown transport: " << transport << "\n";
    return 2;
  }
  if (!force.empty()) {
    if (force != "G" && force != "T") {
      std::cerr << "--force-challenge must be G or T\n";
      return 2;
    }
    opts.forced_challenge = force == "G" ? Challenge::generate : Challenge::test;
  }

  auto records = run_batch(prof, opts);
  RunSummary summary = summarize(prof, opts, records);

  std::vector<std::string> outputs;
  if (!out_path.empty()) {
    write_jsonl(out_path, records, timings);
    outputs.push_back(out_path);
  }
  if (!summary_path.empty()) {
    std::ofstream f(summary_path, std::ios::trunc);
    f << summary_to_json(summary).dump(2) << "\n";
    outputs.push_back(summary_path);
  }
  write_manifest("run", prof, outputs);
  std::cout << summary_to_json(summary).dump(2) << "\n";
  return 0;
}

int cmd_claims(const CommonArgs& common, std::size_t trials, std::size_t samples,
               const std::string& kernel_profile, const std::string& posterior_profile,
               const std::string& out_path) {
  Profile kp = resolve_profile(kernel_profile, common.profiles_path);
  Profile pp = resolve_profile(posterior_profile, common.profiles_path);
  if (common.seed_set) {
    kp.master_seed = common.seed;
    pp.master_seed = common.seed;
  }
  if (int rc = check_profile(kp)) return rc;
  if (int rc = check_profile(pp)) return rc;

  BinaryKernelReport kr = binary_kernel_experiment(kp.params, trials, kp.master_seed);
  double sem3 = 3.0 * kr.std_count / std::sqrt(static_cast<double>(kr.trials));
  bool kernel_mean_ok = std::fabs(kr.mean_count - kr.expected_mean) <= sem3;
  bool kernel_low_ok = kr.low_count_freq <= kr.chebyshev_bound + 0.05;

  PosteriorMaxReport pr = posterior_max_experiment(pp.params, samples, pp.master_seed);
  bool posterior_ok = pr.exceed_freq <= 0.05;

  ojson j;
  j["binary_kernel"] = ojson{{"profile", kp.name},
                             {"trials", kr.trials},
                             {"mean_count", kr.mean_count},
                             {"mean_count_raw", kr.mean_count_raw},
                             {"std_count", kr.std_count},
                             {"expected_mean", kr.expected_mean},
                             {"mean_tolerance_3sem", sem3},
                             {"low_count_freq", kr.low_count_freq},
                             {"low_count_threshold", kr.low_count_threshold},
                             {"chebyshev_bound", kr.chebyshev_bound},
                             {"mean_ok", kernel_mean_ok},
                             {"low_count_ok", kernel_low_ok}};
  j["posterior_max"] = ojson{{"profile", pp.name},
                             {"samples", pr.samples},
                             {"slack", pr.slack},
                             {"threshold", pr.threshold},
                             {"exceed_freq", pr.exceed_freq},
                             {"mean_max_posterior", pr.mean_max_posterior},
                             {"max_max_posterior", pr.max_max_posterior},
                             {"ok", posterior_ok}};
  bool ok = kernel_mean_ok && kernel_low_ok && posterior_ok;
  j["ok"] = ok;

  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::trunc);
    f << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_entropy(const CommonArgs& common, std::size_t sessions, const std::string& adversary,
                int threads, const std::string& out_path, const std::string& bits_path) {
  Profile prof = resolve(common);
  if (int rc = check_profile(prof)) return rc;

  BatchOptions opts;
  opts.variant = Variant::p3;
  opts.prover.kind = adversary_from_name(adversary);
  opts.sessions = sessions;
  opts.master_seed = prof.master_seed;
  opts.threads = threads;
  opts.forced_challenge = Challenge::generate;
  opts.compute_entropy = true;

  auto records = run_batch(prof, opts);
  RunSummary summary = summarize(prof, opts, records);

  std::vector<std::string> outputs;
  if (!out_path.empty()) {
    write_jsonl(out_path, records);
    outputs.push_back(out_path);
  }
  if (!bits_path.empty()) {
    auto bytes = pack_generation_outputs(records, prof.params);
    std::ofstream f(bits_path, std::ios::trunc | std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    outputs.push_back(bits_path);
  }
  write_manifest("entropy", prof, outputs);
  std::cout << summary_to_json(summary).dump(2) << "\n";
  return 0;
}

int cmd_serve(const CommonArgs& common, const std::string& variant, const std::string& host, int port,
              std::size_t sessions, const std::string& out_path, int timeout_ms) {
  Profile prof = resolve(common);
  if (int rc = check_profile(prof)) return rc;
  Variant v = variant_from_name(variant);
  if (v == Variant::p2) {
    std::cerr << "p2 needs register access and is offered in-process only\n";
    return 2;
  }

  int lfd = tcp_listen(host, port);
  std::cerr << "listening on " << host << ":" << port << "\n";
  int fd = tcp_accept(lfd, timeout_ms);
  ::close(lfd);

  std::vector<TranscriptRecord> records(sessions);
  std::size_t done = 0;
  {
    StreamChannel channel(fd, prof.params.modulus, timeout_ms);
    for (u64 i = 0; i < sessions; ++i) {
      SessionOptions sopts;
      sopts.profile_name = prof.name;
      sopts.master_seed = prof.master_seed;
      sopts.session_index = i;
      records[i] = run_session(v, channel, prof.params, sopts);
      done = i + 1;
      bool transport_abort = !records[i].verdict.accept &&
                             records[i].verdict.reason != Reason::none &&
                             records[i].verdict.reason < Reason::preimage_bound;
      if (transport_abort) {
        std::cerr << "session " << i << " aborted: " << reason_name(records[i].verdict.reason) << "\n";
        break;
      }
    }
  }
  ::close(fd);
  records.resize(done);

  BatchOptions opts;
  opts.variant = v;
  opts.sessions = records.size();
  opts.master_seed = prof.master_seed;
  RunSummary summary = summarize(prof, opts, records);
  std::vector<std::string> outputs;
  if (!out_path.empty()) {
    write_jsonl(out_path, records);
    outputs.push_back(out_path);
  }
  write_manifest("serve", prof, outputs);
  std::cout << summary_to_json(summary).dump(2) << "\n";
  return 0;
}

int cmd_connect(const CommonArgs& common, const std::string& host, int port,
                const std::string& adversary, double alpha, int timeout_ms) {
  Profile prof = resolve(common);
  if (int rc = check_profile(prof)) return rc;

  int fd = tcp_connect(host, port, timeout_ms);
  ProverServerOptions opts;
  opts.prover.kind = adversary_from_name(adversary);
  opts.prover.skew_alpha = alpha;
  opts.master_seed = prof.master_seed;
  opts.timeout_ms = timeout_ms;
  std::size_t done =
      serve_prover_stream(fd, prof.params, prof.enum_budget, prof.hadamard_exact_max_bits, opts);
  ::close(fd);
  std::cerr << "served " << done << " sessions\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certifiable-randomness protocol harness"};
  app.require_subcommand(1);

  CommonArgs c_validate, c_run, c_claims, c_entropy, c_serve, c_connect;

  auto* validate = app.add_subcommand("validate", "check a parameter profile");
  add_common(validate, c_validate);

  auto* run = app.add_subcommand("run", "run protocol sessions and write transcripts");
  add_common(run, c_run);
  std::string run_variant = "p1", run_adversary = "honest", run_transport = "inproc";
  std::string run_out, run_summary, run_force;
  double run_alpha = M_SQRT1_2;
  std::size_t run_n = 1000;
  int run_threads = 0;
  bool run_timings = false;
  run->add_option("--variant", run_variant, "p1, p2 or p3")->capture_default_str();
  run->add_option("--adversary", run_adversary,
                  "honest, honest-gaussian, collapsed, classical-zero, skew")
      ->capture_default_str();
  run->add_option("--alpha", run_alpha, "skew adversary amplitude on branch 0");
  run->add_option("-n,--sessions", run_n, "number of sessions")->capture_default_str();
  run->add_option("--transport", run_transport, "inproc or stream")->capture_default_str();
  run->add_option("--threads", run_threads, "worker pool size (inproc transport)");
  run->add_option("--out", run_out, "transcript JSON-lines output path");
  run->add_option("--summary", run_summary, "summary JSON output path");
  run->add_option("--force-challenge", run_force, "force every round to G or T");
  run->add_flag("--timings", run_timings, "include per-session timing in transcripts");

  auto* claims = app.add_subcommand("claims", "run the counting and posterior experiments");
  add_common(claims, c_claims);
  std::size_t claims_trials = 500, claims_samples = 200;
  std::string claims_kernel = "t2l1", claims_posterior = "t3", claims_out;
  claims->add_option("--trials", claims_trials, "binary-kernel trials")->capture_default_str();
  claims->add_option("--samples", claims_samples, "posterior samples")->capture_default_str();
  claims->add_option("--kernel-profile", claims_kernel, "profile for the counting experiment")
      ->capture_default_str();
  claims->add_option("--posterior-profile", claims_posterior, "profile for the posterior experiment")
      ->capture_default_str();
  claims->add_option("--out", claims_out, "report JSON output path");

  auto* entropy = app.add_subcommand("entropy", "generation rounds with exact per-transcript entropy");
  add_common(entropy, c_entropy);
  std::size_t entropy_n = 200;
  std::string entropy_adversary = "honest", entropy_out, entropy_bits;
  int entropy_threads = 0;
  entropy->add_option("-n,--sessions", entropy_n, "number of generation rounds")->capture_default_str();
  entropy->add_option("--adversary", entropy_adversary, "prover kind")->capture_default_str();
  entropy->add_option("--threads", entropy_threads, "worker pool size");
  entropy->add_option("--out", entropy_out, "transcript JSON-lines output path");
  entropy->add_option("--out-bits", entropy_bits, "packed raw output bits path");

  auto* serve = app.add_subcommand("serve", "verifier endpoint over TCP");
  add_common(serve, c_serve);
  std::string serve_variant = "p1", serve_host = "127.0.0.1", serve_out;
  int serve_port = 7431, serve_timeout = 30000;
  std::size_t serve_n = 100;
  serve->add_option("--variant", serve_variant, "p1 or p3")->capture_default_str();
  serve->add_option("--host", serve_host, "listen address")->capture_default_str();
  serve->add_option("--port", serve_port, "listen port")->capture_default_str();
  serve->add_option("-n,--sessions", serve_n, "number of sessions")->capture_default_str();
  serve->add_option("--out", serve_out, "transcript JSON-lines output path");
  serve->add_option("--timeout-ms", serve_timeout, "per-message timeout")->capture_default_str();

  auto* connect = app.add_subcommand("connect", "prover client over TCP");
  add_common(connect, c_connect);
  std::string conn_host = "127.0.0.1", conn_adversary = "honest";
  int conn_port = 7431, conn_timeout = 30000;
  double conn_alpha = M_SQRT1_2;
  connect->add_option("--host", conn_host, "server address")->capture_default_str();
  connect->add_option("--port", conn_port, "server port")->capture_default_str();
  connect->add_option("--adversary", conn_adversary, "prover kind")->capture_default_str();
  connect->add_option("--alpha", conn_alpha, "skew adversary amplitude");
  connect->add_option("--timeout-ms", conn_timeout, "per-message timeout")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(c_validate);
    if (run->parsed())
      return cmd_run(c_run, run_variant, run_adversary, run_alpha, run_n, run_transport, run_threads,
                     run_out, run_summary, run_timings, run_force);
    if (claims->parsed())
      return cmd_claims(c_claims, claims_trials, claims_samples, claims_kernel, claims_posterior,
                        claims_out);
    if (entropy->parsed())
      return cmd_entropy(c_entropy, entropy_n, entropy_adversary, entropy_threads, entropy_out,
                         entropy_bits);
    if (serve->parsed())
      return cmd_serve(c_serve, serve_variant, serve_host, serve_port, serve_n, serve_out,
                       serve_timeout);
    if (connect->parsed())
      return cmd_connect(c_connect, conn_host, conn_port, conn_adversary, conn_alpha, conn_timeout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
