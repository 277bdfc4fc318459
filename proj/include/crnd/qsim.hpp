#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "crnd/dgauss.hpp"
#include "crnd/messages.hpp"
#include "crnd/preimage.hpp"
#include "crnd/rng.hpp"

namespace crnd {

// Sparse state over (branch, preimage) basis states. tag labels the
// environment register; entries with distinct tags never interfere.
struct SupportEntry {
  std::uint8_t branch = 0;
  std::vector<u64> preimage;
  std::int32_t tag = 0;
  std::complex<double> amp;
};

struct ProverState {
  u64 q = 0;
  std::vector<SupportEntry> entries;
  bool consumed = false;

  double total_mass() const;
  void normalize();
};

enum class HonestAmplitudes { uniform, gaussian };

struct CommitResult {
  ZqVector image;
  ProverState state;
  bool empty_sector = false;  // one branch had no valid preimage; weight moved to the other
};

// Samples (branch, x, noise), reports the image, and returns the idealized
// post-measurement state over the valid preimages of both branches.
// HonestAmplitudes::gaussian weights each preimage by the square root of the
// noise density of its residual instead of uniformly.
CommitResult honest_commit(const Instance& inst, const ParameterSet& p, u64 enum_budget, Rng& rng,
                           HonestAmplitudes style = HonestAmplitudes::uniform);

// Computational-basis measurement; consumes the state.
GenResponse measure_standard(ProverState& state, Rng& rng);

// Picks one element with the Born rule and collapses the state to it (point
// mass) without consuming it.
void collapse_to_point(ProverState& state, Rng& rng);

// Hadamard-basis measurement of the (branch, preimage) registers. States with
// support size <= 2 use the closed form; otherwise the full distribution over
// 2^(w+1) outcomes is enumerated, which requires w+1 <= exact_max_bits.
EqResponse measure_hadamard(ProverState& state, unsigned mask_bits, unsigned exact_max_bits, Rng& rng);

// Exact outcome distribution of measure_hadamard, indexed by (parity << w) | mask
// with mask bits MSB-first. Test/analysis helper; needs w+1 <= exact_max_bits.
std::vector<double> hadamard_distribution(const ProverState& state, unsigned mask_bits,
                                          unsigned exact_max_bits);

struct ExtractionResult {
  ZqVector x0;  // branch-0 representative
};

// Auxiliary-register extraction: groups the support by x + branch*s, samples
// the group with the Born rule, and collapses the state onto it.
ExtractionResult extract_preimage(ProverState& state, const BitString& secret, Rng& rng);

double state_min_entropy_bits(const ProverState& state);

enum class AdversaryKind { honest, honest_gaussian, collapsed, classical_zero, skew };

std::string adversary_name(AdversaryKind k);
AdversaryKind adversary_from_name(const std::string& s);

struct ProverConfig {
  AdversaryKind kind = AdversaryKind::honest;
  double skew_alpha = M_SQRT1_2;  // only for AdversaryKind::skew
};

// One prover per session. commit() must be called first; the challenge
// methods consume the state (single-shot, mirroring the protocol).
class Prover {
public:
  virtual ~Prover() = default;
  virtual ZqVector commit(const Instance& inst) = 0;
  virtual GenResponse respond_generation() = 0;
  virtual EqResponse respond_test() = 0;
  // Protocol-5 style register access; null for provers that refuse it.
  virtual ProverState* state_handle() { return nullptr; }
  virtual bool empty_sector_seen() const { return false; }
};

std::unique_ptr<Prover> make_prover(const ProverConfig& cfg, const ParameterSet& p, u64 enum_budget,
                                    unsigned hadamard_exact_max_bits, Rng rng);

}  // namespace crnd
