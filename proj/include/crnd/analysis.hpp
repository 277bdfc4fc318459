#pragma once

#include <vector>

#include "crnd/protocol.hpp"
#include "crnd/stats.hpp"

namespace crnd {

// ----- posterior over binary secrets -----

// probs[mask] is the posterior of the secret whose j-th coordinate is
// (mask >> j) & 1, given shift = matrix*s + e with e from the width-b_verify
// Gaussian.
struct PosteriorDistribution {
  std::vector<double> probs;
  double max_prob = 0;
  u64 argmax_mask = 0;
};

// Serial reference: plain loop in mask order.
PosteriorDistribution posterior_serial(const ZqMatrix& matrix, const ZqVector& shift,
                                       const ParameterSet& p);

// Production version: OpenMP over fixed chunks, deterministic combination.
PosteriorDistribution posterior(const ZqMatrix& matrix, const ZqVector& shift, const ParameterSet& p);

// ----- experiments -----

// Samples (lossy matrix, s, e) per the protocol and counts binary vectors in
// {x : norm(matrix*x - shift) <= b_preimage*sqrt(m)} by brute force. The
// reported mean excludes the planted secret, matching the pairwise-
// independence expectation (2^n - 1)/q^l; the raw mean is reported alongside.
struct BinaryKernelReport {
  std::size_t trials = 0;
  double mean_count = 0;      // excluding the planted secret
  double mean_count_raw = 0;  // including it
  double std_count = 0;
  double expected_mean = 0;     // (2^n - 1)/q^l
  double low_count_freq = 0;    // fraction of trials with raw count <= low_count_threshold
  double low_count_threshold = 0;  // (2^n - 1)/(2 q^l)
  double chebyshev_bound = 0;      // 4 q^l / (2^n - 1)
};
BinaryKernelReport binary_kernel_experiment(const ParameterSet& p, std::size_t trials, u64 master_seed);

// Samples (lossy matrix, s, e) and evaluates the max posterior against the
// threshold 3 * slack * q^l / (2^n - 1) with slack = exp(8 pi m n b_lossy / b_verify).
struct PosteriorMaxReport {
  std::size_t samples = 0;
  double slack = 0;
  double threshold = 0;
  double exceed_freq = 0;
  double mean_max_posterior = 0;
  double max_max_posterior = 0;
};
PosteriorMaxReport posterior_max_experiment(const ParameterSet& p, std::size_t samples, u64 master_seed);

// ----- entropy -----

double min_entropy_exact(const ProverState& state);  // -log2 max |amp|^2

struct SmoothEntropyReport {
  std::size_t count = 0;
  std::size_t below = 0;
  double threshold_bits = 0;
  double fraction_below = 0;
  double epsilon_estimate = 0;  // the Markov-route smoothing parameter
  double mean_bits = 0;
  double min_bits = 0;
};
SmoothEntropyReport smooth_min_entropy_report(const std::vector<double>& entropies, double threshold_bits);

struct EntropyCertificate {
  double p_g = 0;
  double p_t_excess = 0;
  double delta = 0;
  bool guarantee = false;   // delta <= 1/2 hypothesis
  double epsilon = 0;       // 5 * delta^(1/4), when the hypothesis holds
  double epsilon_t44 = 0;   // 2 * (1 - 4 p_t_excess^2)^(1/4), the perfect-generation form
  double bound_bits = 0;    // n - l*log2 q - c_offset
  double c_offset = 0;
};
EntropyCertificate entropy_certificate(double p_g, double p_t_excess, const ParameterSet& p,
                                       double c_offset = 2.0);

// Exact probability that a two-element claw state passes the equation test
// (mask nonzero and parity matching), computed from the amplitudes.
double claw_test_pass_exact(const ProverState& state, unsigned mask_bits);

// ----- measured pass rates -----

struct PassRates {
  RateEstimate generation;
  RateEstimate test;
  std::size_t decode_failures = 0;  // test-round rejects with reason trapdoor-decode
};

// Runs sessions_per_challenge in-process sessions with each challenge forced,
// parallel across sessions.
PassRates pass_rate_estimator(Variant v, const ProverConfig& prover, const ParameterSet& p,
                              u64 enum_budget, unsigned hadamard_exact_max_bits,
                              std::size_t sessions_per_challenge, u64 master_seed,
                              const std::string& profile_name);

}  // namespace crnd
