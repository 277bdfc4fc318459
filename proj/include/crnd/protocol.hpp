#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "crnd/messages.hpp"
#include "crnd/params.hpp"
#include "crnd/qsim.hpp"
#include "crnd/samplers.hpp"

namespace crnd {

struct TransportError : std::runtime_error {
  Reason reason;
  explicit TransportError(Reason r, const std::string& what) : std::runtime_error(what), reason(r) {}
};

struct VerifierSecret {
  BitString secret;   // s, sampled uniformly from {0,1}^n
  ZqVector error;     // e, width-b_verify Gaussian
  std::variant<Trapdoor, LossyWitness> witness;
  Variant variant = Variant::p1;
  std::optional<Challenge> preset_challenge;  // P3 draws the challenge before the matrix
};

// Step 1 of each variant: P1 samples a trapdoor matrix, P2 a lossy matrix,
// P3 draws the challenge first and then a lossy (generate) or trapdoor (test)
// matrix. In all cases shift = matrix*s + e. A forced challenge replaces the
// coin flips (estimators condition on the round type this way).
std::pair<Instance, VerifierSecret> verifier_start(Variant v, const ParameterSet& p, Rng& rng,
                                                   std::optional<Challenge> force = std::nullopt);

// Accept iff norm(image - matrix*x - branch*shift) <= b_preimage*sqrt(m); the
// bound is inclusive.
Verdict check_generation(const ParameterSet& p, const Instance& inst, const ZqVector& image,
                         const GenResponse& resp);

// Accept iff mask != 0 and parity = mask . (J(x0) xor J(x0 - s)), with x0 - s
// computed over Z_q.
Verdict check_equation(const ParameterSet& p, const BitString& secret, const ZqVector& x0,
                       const EqResponse& resp);

// The verifier's view of a prover across one session, in protocol message
// order: commit, then exactly one challenge, then the verdict.
class ProverChannel {
public:
  virtual ~ProverChannel() = default;
  virtual ZqVector commit(const Instance& inst) = 0;
  virtual GenResponse request_generation() = 0;
  virtual EqResponse request_test() = 0;
  // Register access for the extraction step; null when the transport cannot
  // hand the quantum register to the verifier.
  virtual ProverState* state_handle() = 0;
  virtual void finish(const Verdict& v) = 0;
  virtual bool empty_sector_seen() const { return false; }
};

struct SessionOptions {
  std::string profile_name;
  uint64_t master_seed = 0;
  uint64_t session_index = 0;
  AdversaryKind adversary = AdversaryKind::honest;
  std::optional<Challenge> forced_challenge;
  bool compute_entropy = false;  // record the exact state entropy after commit
};

struct TranscriptRecord {
  std::string profile;
  Variant variant = Variant::p1;
  AdversaryKind adversary = AdversaryKind::honest;
  uint64_t master_seed = 0;
  uint64_t session_index = 0;
  uint64_t instance_digest = 0;
  ZqVector image;
  Challenge challenge = Challenge::generate;
  std::optional<GenResponse> gen;
  std::optional<EqResponse> eq;
  Verdict verdict;
  bool empty_sector = false;
  std::optional<double> entropy_bits;                   // filled by the entropy runner
  std::optional<std::pair<u64, u64>> sector_sizes;      // support size per branch, with entropy
  uint64_t timing_ns = 0;                               // excluded from canonical comparisons

  bool same_canonical(const TranscriptRecord& o) const;  // everything but timing
};

// Runs one full session. The verifier randomness is derived from
// (master_seed, session_index); transport failures abort the session and are
// recorded as the verdict.
TranscriptRecord run_session(Variant v, ProverChannel& channel, const ParameterSet& p,
                             const SessionOptions& opts);

// Verifier's per-session randomness stream (role 0; provers use role 1).
Rng verifier_rng(uint64_t master_seed, uint64_t session_index);
Rng prover_rng(uint64_t master_seed, uint64_t session_index);

}  // namespace crnd
