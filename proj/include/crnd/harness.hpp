#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crnd/analysis.hpp"
#include "crnd/protocol.hpp"

namespace crnd {

using ojson = nlohmann::ordered_json;

struct Profile {
  std::string name;
  ParameterSet params;
  u64 enum_budget = 2'000'000;
  unsigned hadamard_exact_max_bits = 20;
  u64 master_seed = 1;
};

// Shipped desk-scale profiles. The numeric values were frozen after oracle
// runs confirming each profile's feasibility; see the README for the checks.
const std::vector<Profile>& builtin_profiles();
const Profile& builtin_profile(const std::string& name);

// Strict parsing: unknown keys are rejected.
std::vector<Profile> load_profiles_json(const ojson& doc);
std::vector<Profile> load_profiles_file(const std::string& path);

// Lookup order: explicit file if given, else $CRND_PROFILE_DIR/profiles.json
// if set, else the builtins.
Profile resolve_profile(const std::string& name, const std::string& profiles_path = "");

ojson profile_to_json(const Profile& p);
u64 profile_digest(const Profile& p);

enum class TransportKind { inproc, stream };

struct BatchOptions {
  Variant variant = Variant::p1;
  ProverConfig prover;
  std::size_t sessions = 100;
  u64 master_seed = 1;
  TransportKind transport = TransportKind::inproc;
  std::optional<Challenge> forced_challenge;
  bool compute_entropy = false;
  int threads = 0;  // worker pool size; 0 keeps the OpenMP default
};

// In-process transport parallelizes across sessions; the stream transport
// runs the same sessions serially through the wire codec over a local
// socketpair (P1/P3 only).
std::vector<TranscriptRecord> run_batch(const Profile& prof, const BatchOptions& opts);

struct RunSummary {
  std::string profile;
  Variant variant = Variant::p1;
  AdversaryKind adversary = AdversaryKind::honest;
  u64 master_seed = 0;
  std::size_t sessions = 0;
  std::size_t gen_total = 0, gen_accept = 0;
  std::size_t test_total = 0, test_accept = 0;
  RateEstimate gen_rate, test_rate;
  std::vector<std::pair<std::string, std::size_t>> reject_reasons;
  std::size_t empty_sectors = 0;
  std::optional<EntropyCertificate> certificate;
  std::optional<SmoothEntropyReport> entropy;
  double mean_sector_size = 0;
  double entropy_threshold_bits = 0;
};

RunSummary summarize(const Profile& prof, const BatchOptions& opts,
                     const std::vector<TranscriptRecord>& records);

// Canonical record serialization. Timing is off by default so that reruns of
// the same manifest produce byte-identical logs.
ojson record_to_json(const TranscriptRecord& rec, bool include_timing = false);
TranscriptRecord record_from_json(const ojson& j);
ojson summary_to_json(const RunSummary& s);

void write_jsonl(const std::string& path, const std::vector<TranscriptRecord>& records,
                 bool include_timing = false);
std::vector<TranscriptRecord> read_jsonl(const std::string& path);

// Generation outputs (branch, binary rep of x) packed LSB-first into bytes;
// N records of (1 + bit_width) bits, zero-padded to a whole byte at the end.
std::vector<std::uint8_t> pack_generation_outputs(const std::vector<TranscriptRecord>& records,
                                                  const ParameterSet& p);

struct RunManifest {
  std::string command;
  std::string profile;
  u64 seed = 0;
  u64 config_digest = 0;
  std::vector<std::string> outputs;
};

ojson manifest_to_json(const RunManifest& m);

}  // namespace crnd
