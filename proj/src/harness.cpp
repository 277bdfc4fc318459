#include "crnd/harness.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "crnd/transport.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <unistd.h>

namespace crnd {

namespace {

Profile make_profile(const std::string& name, u64 q, unsigned n, unsigned m, unsigned l, double bl,
                     double bv, double bp, u64 budget, unsigned max_bits, u64 seed) {
  Profile prof;
  prof.name = name;
  prof.params.modulus = q;
  prof.params.secret_dim = n;
  prof.params.image_dim = m;
  prof.params.lossy_rank = l;
  prof.params.bit_width = n * coord_bits(q);
  prof.params.b_lossy = bl;
  prof.params.b_verify = bv;
  prof.params.b_preimage = bp;
  prof.params.mode = ValidationMode::relaxed;
  prof.enum_budget = budget;
  prof.hadamard_exact_max_bits = max_bits;
  prof.master_seed = seed;
  return prof;
}

}  // namespace

const std::vector<Profile>& builtin_profiles() {
  static const std::vector<Profile> profiles = {
      // session profile: injective trapdoor regime, claw support of size 2
      make_profile("t1", 251, 2, 18, 1, 3, 4, 5, 200000, 18, 0x7431),
      // entropy profile: lossy rank 2, kernel cosets of size q^(n-l) = 15625
      make_profile("t2", 5, 8, 24, 2, 0.9, 1.0, 1.02, 500000, 20, 0x7432),
      // binary-kernel counting profile (rank 1 variant of t2)
      make_profile("t2l1", 5, 8, 64, 1, 1.0, 1.05, 1.15, 500000, 20, 0x7421),
      // posterior profile: large modulus so the slack factor stays below 1.1
      make_profile("t3", 67108859, 10, 20, 1, 7, 700000, 7000000, 1024, 20, 0x7433),
      // trapdoor decode-margin profile
      make_profile("t4", 65537, 4, 80, 1, 4, 300, 3000, 1024, 20, 0x7434),
  };
  return profiles;
}

const Profile& builtin_profile(const std::string& name) {
  for (const auto& p : builtin_profiles())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown builtin profile: " + name);
}

ojson profile_to_json(const Profile& p) {
  ojson j;
  j["modulus"] = p.params.modulus;
  j["secret_dim"] = p.params.secret_dim;
  j["image_dim"] = p.params.image_dim;
  j["lossy_rank"] = p.params.lossy_rank;
  j["bit_width"] = p.params.bit_width;
  j["b_lossy"] = p.params.b_lossy;
  j["b_verify"] = p.params.b_verify;
  j["b_preimage"] = p.params.b_preimage;
  j["mode"] = p.params.mode == ValidationMode::strict ? "strict" : "relaxed";
  j["enum_budget"] = p.enum_budget;
  j["hadamard_exact_max_bits"] = p.hadamard_exact_max_bits;
  j["master_seed"] = p.master_seed;
  return j;
}

namespace {

Profile profile_from_json(const std::string& name, const ojson& j) {
  static const std::vector<std::string> known = {
      "modulus",    "secret_dim", "image_dim",   "lossy_rank",
      "bit_width",  "b_lossy",    "b_verify",    "b_preimage",
      "mode",       "enum_budget", "hadamard_exact_max_bits", "master_seed",
      "strict_constants"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == it.key();
    if (!ok) throw std::invalid_argument("profile '" + name + "': unknown key '" + it.key() + "'");
  }
  auto need = [&](const char* k) -> const ojson& {
    if (!j.contains(k)) throw std::invalid_argument("profile '" + name + "': missing key '" + k + "'");
    return j.at(k);
  };

  Profile p;
  p.name = name;
  p.params.modulus = need("modulus").get<u64>();
  p.params.secret_dim = need("secret_dim").get<unsigned>();
  p.params.image_dim = need("image_dim").get<unsigned>();
  p.params.lossy_rank = need("lossy_rank").get<unsigned>();
  p.params.bit_width = need("bit_width").get<unsigned>();
  p.params.b_lossy = need("b_lossy").get<double>();
  p.params.b_verify = need("b_verify").get<double>();
  p.params.b_preimage = need("b_preimage").get<double>();
  std::string mode = need("mode").get<std::string>();
  if (mode != "strict" && mode != "relaxed")
    throw std::invalid_argument("profile '" + name + "': mode must be strict or relaxed");
  p.params.mode = mode == "strict" ? ValidationMode::strict : ValidationMode::relaxed;
  p.enum_budget = need("enum_budget").get<u64>();
  p.hadamard_exact_max_bits = need("hadamard_exact_max_bits").get<unsigned>();
  p.master_seed = need("master_seed").get<u64>();
  if (j.contains("strict_constants")) {
    const ojson& sc = j.at("strict_constants");
    static const std::vector<std::string> sckeys = {"a1_n_factor", "a1_m_factor", "ct_const",
                                                    "a3_rel_tol", "a5_min_ratio"};
    for (auto it = sc.begin(); it != sc.end(); ++it) {
      bool ok = false;
      for (const auto& k : sckeys) ok = ok || k == it.key();
      if (!ok)
        throw std::invalid_argument("profile '" + name + "': unknown strict_constants key '" + it.key() + "'");
    }
    auto& c = p.params.strict_constants;
    if (sc.contains("a1_n_factor")) c.a1_n_factor = sc.at("a1_n_factor").get<double>();
    if (sc.contains("a1_m_factor")) c.a1_m_factor = sc.at("a1_m_factor").get<double>();
    if (sc.contains("ct_const")) c.ct_const = sc.at("ct_const").get<double>();
    if (sc.contains("a3_rel_tol")) c.a3_rel_tol = sc.at("a3_rel_tol").get<double>();
    if (sc.contains("a5_min_ratio")) c.a5_min_ratio = sc.at("a5_min_ratio").get<double>();
  }
  return p;
}

}  // namespace

std::vector<Profile> load_profiles_json(const ojson& doc) {
  if (!doc.is_object()) throw std::invalid_argument("profiles file: top level must be an object");
  std::vector<Profile> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) out.push_back(profile_from_json(it.key(), it.value()));
  return out;
}

std::vector<Profile> load_profiles_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profiles file: " + path);
  ojson doc = ojson::parse(in, nullptr, true);
  return load_profiles_json(doc);
}

Profile resolve_profile(const std::string& name, const std::string& profiles_path) {
  std::string path = profiles_path;
  if (path.empty()) {
    if (const char* dir = std::getenv("CRND_PROFILE_DIR")) path = std::string(dir) + "/profiles.json";
  }
  if (!path.empty()) {
    for (const auto& p : load_profiles_file(path))
      if (p.name == name) return p;
    throw std::invalid_argument("profile '" + name + "' not found in " + path);
  }
  return builtin_profile(name);
}

u64 profile_digest(const Profile& p) {
  std::string s = p.name + profile_to_json(p).dump();
  u64 h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

TranscriptRecord run_one_inproc(const Profile& prof, const BatchOptions& opts, u64 index) {
  auto prover = make_prover(opts.prover, prof.params, prof.enum_budget, prof.hadamard_exact_max_bits,
                            prover_rng(opts.master_seed, index));
  InprocChannel channel(*prover);
  SessionOptions sopts;
  sopts.profile_name = prof.name;
  sopts.master_seed = opts.master_seed;
  sopts.session_index = index;
  sopts.adversary = opts.prover.kind;
  sopts.forced_challenge = opts.forced_challenge;
  sopts.compute_entropy = opts.compute_entropy;
  return run_session(opts.variant, channel, prof.params, sopts);
}

std::vector<TranscriptRecord> run_batch_stream(const Profile& prof, const BatchOptions& opts) {
  if (opts.variant == Variant::p2)
    throw std::invalid_argument("stream transport cannot run p2 (the verifier needs the register)");

  auto [vfd, pfd] = local_socketpair();
  ProverServerOptions server;
  server.prover = opts.prover;
  server.master_seed = opts.master_seed;
  server.first_session_index = 0;
  std::thread prover_thread([&, pfd = pfd] {
    try {
      serve_prover_stream(pfd, prof.params, prof.enum_budget, prof.hadamard_exact_max_bits, server);
    } catch (...) {
    }
    ::close(pfd);
  });

  std::vector<TranscriptRecord> records(opts.sessions);
  {
    StreamChannel channel(vfd, prof.params.modulus);
    for (u64 i = 0; i < opts.sessions; ++i) {
      SessionOptions sopts;
      sopts.profile_name = prof.name;
      sopts.master_seed = opts.master_seed;
      sopts.session_index = i;
      sopts.adversary = opts.prover.kind;
      sopts.forced_challenge = opts.forced_challenge;
      records[i] = run_session(opts.variant, channel, prof.params, sopts);
    }
  }
  ::close(vfd);
  prover_thread.join();
  return records;
}

}  // namespace

std::vector<TranscriptRecord> run_batch(const Profile& prof, const BatchOptions& opts) {
#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
  if (opts.transport == TransportKind::stream) return run_batch_stream(prof, opts);

  std::vector<TranscriptRecord> records(opts.sessions);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < static_cast<long long>(opts.sessions); ++i)
    records[static_cast<std::size_t>(i)] = run_one_inproc(prof, opts, static_cast<u64>(i));
  return records;
}

RunSummary summarize(const Profile& prof, const BatchOptions& opts,
                     const std::vector<TranscriptRecord>& records) {
  RunSummary s;
  s.profile = prof.name;
  s.variant = opts.variant;
  s.adversary = opts.prover.kind;
  s.master_seed = opts.master_seed;
  s.sessions = records.size();

  std::vector<std::pair<std::string, std::size_t>> reasons;
  std::vector<double> entropies;
  double sector_sum = 0;
  std::size_t sector_n = 0;
  for (const auto& r : records) {
    bool gen = r.challenge == Challenge::generate;
    if (gen) {
      ++s.gen_total;
      if (r.verdict.accept) ++s.gen_accept;
    } else {
      ++s.test_total;
      if (r.verdict.accept) ++s.test_accept;
    }
    if (!r.verdict.accept) {
      std::string key = reason_name(r.verdict.reason);
      bool found = false;
      for (auto& [k, c] : reasons)
        if (k == key) {
          ++c;
          found = true;
        }
      if (!found) reasons.emplace_back(key, 1);
    }
    if (r.empty_sector) ++s.empty_sectors;
    if (r.entropy_bits) entropies.push_back(*r.entropy_bits);
    if (r.sector_sizes) {
      sector_sum += static_cast<double>(r.sector_sizes->first + r.sector_sizes->second);
      sector_n += 2;
    }
  }
  s.reject_reasons = std::move(reasons);
  s.gen_rate = wilson_ci(s.gen_accept, s.gen_total);
  s.test_rate = wilson_ci(s.test_accept, s.test_total);
  if (sector_n > 0) s.mean_sector_size = sector_sum / static_cast<double>(sector_n);

  if (s.gen_total > 0 && s.test_total > 0 && s.gen_rate.rate > 0) {
    double p_t_excess = std::max(0.0, s.test_rate.rate - 0.5);
    s.certificate = entropy_certificate(s.gen_rate.rate, std::min(p_t_excess, 0.5), prof.params);
  }
  if (!entropies.empty()) {
    s.entropy_threshold_bits =
        static_cast<double>(prof.params.secret_dim) - prof.params.lossy_rank * prof.params.log2_q() - 2.0;
    s.entropy = smooth_min_entropy_report(entropies, s.entropy_threshold_bits);
  }
  return s;
}

namespace {

std::string u64_hex(u64 v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

u64 hex_u64(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace

ojson record_to_json(const TranscriptRecord& rec, bool include_timing) {
  ojson j;
  j["profile"] = rec.profile;
  j["variant"] = variant_name(rec.variant);
  j["adversary"] = adversary_name(rec.adversary);
  j["seed"] = u64_hex(rec.master_seed);
  j["session"] = rec.session_index;
  j["digest"] = u64_hex(rec.instance_digest);
  j["image"] = rec.image.v;
  j["q"] = rec.image.q;
  j["challenge"] = rec.challenge == Challenge::generate ? "G" : "T";
  if (rec.gen) {
    j["response"] = ojson{{"type", "gen"}, {"branch", rec.gen->branch}, {"preimage", rec.gen->preimage.v}};
  } else if (rec.eq) {
    j["response"] = ojson{{"type", "eq"}, {"parity", rec.eq->parity}, {"mask", rec.eq->mask.to_string()}};
  } else {
    j["response"] = nullptr;
  }
  j["accept"] = rec.verdict.accept;
  j["reason"] = reason_name(rec.verdict.reason);
  j["empty_sector"] = rec.empty_sector;
  if (rec.entropy_bits) j["entropy_bits"] = *rec.entropy_bits;
  if (rec.sector_sizes) j["sector_sizes"] = ojson::array({rec.sector_sizes->first, rec.sector_sizes->second});
  if (include_timing) j["timing_ns"] = rec.timing_ns;
  return j;
}

TranscriptRecord record_from_json(const ojson& j) {
  TranscriptRecord rec;
  rec.profile = j.at("profile").get<std::string>();
  rec.variant = variant_from_name(j.at("variant").get<std::string>());
  rec.adversary = adversary_from_name(j.at("adversary").get<std::string>());
  rec.master_seed = hex_u64(j.at("seed").get<std::string>());
  rec.session_index = j.at("session").get<u64>();
  rec.instance_digest = hex_u64(j.at("digest").get<std::string>());
  u64 q = j.at("q").get<u64>();
  rec.image = ZqVector(q, j.at("image").get<std::vector<u64>>());
  rec.challenge = j.at("challenge").get<std::string>() == "G" ? Challenge::generate : Challenge::test;
  const ojson& resp = j.at("response");
  if (!resp.is_null()) {
    if (resp.at("type").get<std::string>() == "gen") {
      GenResponse gr;
      gr.branch = resp.at("branch").get<std::uint8_t>();
      gr.preimage = ZqVector(q, resp.at("preimage").get<std::vector<u64>>());
      rec.gen = std::move(gr);
    } else {
      EqResponse er;
      er.parity = resp.at("parity").get<std::uint8_t>();
      er.mask = BitString::parse(resp.at("mask").get<std::string>());
      rec.eq = std::move(er);
    }
  }
  rec.verdict.accept = j.at("accept").get<bool>();
  std::string rn = j.at("reason").get<std::string>();
  for (int r = 0; r <= 0x15; ++r) {
    if (reason_name(static_cast<Reason>(r)) == rn) {
      rec.verdict.reason = static_cast<Reason>(r);
      break;
    }
  }
  rec.empty_sector = j.at("empty_sector").get<bool>();
  if (j.contains("entropy_bits")) rec.entropy_bits = j.at("entropy_bits").get<double>();
  if (j.contains("sector_sizes"))
    rec.sector_sizes = std::make_pair(j.at("sector_sizes")[0].get<u64>(), j.at("sector_sizes")[1].get<u64>());
  if (j.contains("timing_ns")) rec.timing_ns = j.at("timing_ns").get<u64>();
  return rec;
}

ojson summary_to_json(const RunSummary& s) {
  ojson j;
  j["profile"] = s.profile;
  j["variant"] = variant_name(s.variant);
  j["adversary"] = adversary_name(s.adversary);
  j["seed"] = u64_hex(s.master_seed);
  j["sessions"] = s.sessions;
  auto rate = [](const RateEstimate& r) {
    return ojson{{"rate", r.rate}, {"lo", r.lo}, {"hi", r.hi}, {"accepted", r.successes}, {"total", r.trials}};
  };
  j["generation"] = rate(s.gen_rate);
  j["test"] = rate(s.test_rate);
  ojson reasons = ojson::object();
  for (const auto& [k, c] : s.reject_reasons) reasons[k] = c;
  j["reject_reasons"] = reasons;
  j["empty_sectors"] = s.empty_sectors;
  if (s.certificate) {
    const auto& c = *s.certificate;
    j["certificate"] = ojson{{"p_g", c.p_g},
                             {"p_t_excess", c.p_t_excess},
                             {"delta", c.delta},
                             {"guarantee", c.guarantee},
                             {"epsilon", c.epsilon},
                             {"epsilon_t44", c.epsilon_t44},
                             {"bound_bits", c.bound_bits},
                             {"c_offset", c.c_offset}};
  }
  if (s.entropy) {
    const auto& e = *s.entropy;
    j["entropy"] = ojson{{"count", e.count},
                         {"threshold_bits", e.threshold_bits},
                         {"fraction_below", e.fraction_below},
                         {"epsilon_estimate", e.epsilon_estimate},
                         {"mean_bits", e.mean_bits},
                         {"min_bits", e.min_bits},
                         {"mean_sector_size", s.mean_sector_size}};
  }
  return j;
}

void write_jsonl(const std::string& path, const std::vector<TranscriptRecord>& records,
                 bool include_timing) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& r : records) out << record_to_json(r, include_timing).dump() << "\n";
}

std::vector<TranscriptRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<TranscriptRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_json(ojson::parse(line)));
  }
  return out;
}

std::vector<std::uint8_t> pack_generation_outputs(const std::vector<TranscriptRecord>& records,
                                                  const ParameterSet& p) {
  std::vector<std::uint8_t> bytes;
  std::size_t bitpos = 0;
  auto put_bit = [&](unsigned b) {
    if (bitpos % 8 == 0) bytes.push_back(0);
    bytes.back() |= static_cast<std::uint8_t>((b & 1) << (bitpos % 8));
    ++bitpos;
  };
  for (const auto& r : records) {
    if (!r.gen) continue;
    put_bit(r.gen->branch);
    BitString bits = binary_rep(r.gen->preimage);
    if (bits.size() != p.bit_width) throw std::logic_error("pack_generation_outputs: width mismatch");
    for (std::size_t i = 0; i < bits.size(); ++i) put_bit(bits[i]);
  }
  return bytes;
}

ojson manifest_to_json(const RunManifest& m) {
  ojson j;
  j["command"] = m.command;
  j["profile"] = m.profile;
  j["seed"] = u64_hex(m.seed);
  j["config_digest"] = u64_hex(m.config_digest);
  j["outputs"] = m.outputs;
  return j;
}

}  // namespace crnd
