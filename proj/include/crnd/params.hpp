#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crnd/zq.hpp"

namespace crnd {

enum class ValidationMode { strict, relaxed };

// Constants a strict-mode profile must declare to make the asymptotic
// conditions checkable as concrete inequalities.
struct StrictConstants {
  double a1_n_factor = 1.0;    // require secret_dim >= a1_n_factor * lossy_rank * log2 q
  double a1_m_factor = 1.0;    // require image_dim >= a1_m_factor * secret_dim * log2 q
  double ct_const = 1.0;       // the decode-margin constant in the b_preimage relation
  double a3_rel_tol = 0.05;    // allowed relative deviation of b_preimage from q/(2*ct*sqrt(m n log q))
  double a5_min_ratio = 100;   // required b_preimage/b_verify and b_verify/b_lossy
};

struct ParameterSet {
  u64 modulus = 0;          // q, prime
  unsigned secret_dim = 0;  // dimension of the secret vector
  unsigned image_dim = 0;   // rows of the public matrix
  unsigned lossy_rank = 0;  // rank of the low-rank part of a lossy matrix
  unsigned bit_width = 0;   // secret_dim * coord_bits(q); length of equation masks
  double b_lossy = 0;       // width of the lossy-matrix noise
  double b_verify = 0;      // width of the verifier error vector
  double b_preimage = 0;    // width of the prover noise / preimage bound
  ValidationMode mode = ValidationMode::relaxed;
  StrictConstants strict_constants;

  double log2_q() const;
  // Number of elements of Z_q^secret_dim, saturating at u64 max.
  u64 domain_size() const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;  // named failed conditions
  std::vector<std::string> warnings;  // relaxed-mode recorded deviations
  double ratio_preimage_verify = 0;   // b_preimage / b_verify
  double ratio_verify_lossy = 0;      // b_verify / b_lossy
  double a3_residual = 0;             // relative deviation from the b_preimage relation

  std::string to_text() const;
};

// Relaxed mode enforces the exact conditions (prime modulus, bit width,
// b_lossy < b_verify < b_preimage) and records the magnitude conditions as
// warnings with their realized ratios. Strict mode turns every recorded
// deviation into a failure using the declared constants.
ValidationReport validate_params(const ParameterSet& p);

}  // namespace crnd
