#include "crnd/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crnd/transport.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace crnd {

namespace {

void posterior_logs(const ZqMatrix& matrix, const ZqVector& shift, const ParameterSet& p,
                    std::vector<double>& logs, u64 beg, u64 end) {
  DGaussTable chi(p.modulus, p.b_verify);
  const u64 q = p.modulus;
  for (u64 mask = beg; mask < end; ++mask) {
    double lw = 0;
    for (std::size_t i = 0; i < matrix.rows && lw != -std::numeric_limits<double>::infinity(); ++i) {
      u128 acc = shift[i];
      const u64* row = matrix.row(i);
      for (unsigned j = 0; j < p.secret_dim; ++j)
        if ((mask >> j) & 1) acc += q - row[j];
      lw += chi.log_density(static_cast<u64>(acc % q));
    }
    logs[mask] = lw;
  }
}

PosteriorDistribution finish_posterior(std::vector<double>&& logs, bool parallel_chunks) {
  const u64 total = logs.size();
  double mx = -std::numeric_limits<double>::infinity();
  u64 arg = 0;
  for (u64 i = 0; i < total; ++i) {
    if (logs[i] > mx) {
      mx = logs[i];
      arg = i;
    }
  }
  if (mx == -std::numeric_limits<double>::infinity())
    throw std::domain_error("posterior: every residual lies outside the truncated support");

  PosteriorDistribution out;
  out.probs.assign(total, 0.0);
  double z = 0;
  if (parallel_chunks) {
    const u64 chunk = 4096;
    const u64 chunks = (total + chunk - 1) / chunk;
    std::vector<double> partial(chunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long ci = 0; ci < static_cast<long long>(chunks); ++ci) {
      u64 beg = static_cast<u64>(ci) * chunk, end = std::min(total, beg + chunk);
      double s = 0;
      for (u64 i = beg; i < end; ++i) {
        out.probs[i] = std::exp(logs[i] - mx);
        s += out.probs[i];
      }
      partial[static_cast<std::size_t>(ci)] = s;
    }
    for (double s : partial) z += s;  // fixed chunk order keeps the sum deterministic
  } else {
    for (u64 i = 0; i < total; ++i) {
      out.probs[i] = std::exp(logs[i] - mx);
      z += out.probs[i];
    }
  }
  for (auto& pr : out.probs) pr /= z;
  out.max_prob = out.probs[arg];
  out.argmax_mask = arg;
  return out;
}

u64 posterior_domain(const ParameterSet& p) {
  if (p.secret_dim > 24) throw BudgetError("posterior: 2^n exceeds the enumeration budget");
  return u64{1} << p.secret_dim;
}

}  // namespace

PosteriorDistribution posterior_serial(const ZqMatrix& matrix, const ZqVector& shift,
                                       const ParameterSet& p) {
  u64 total = posterior_domain(p);
  std::vector<double> logs(total);
  posterior_logs(matrix, shift, p, logs, 0, total);
  return finish_posterior(std::move(logs), false);
}

PosteriorDistribution posterior(const ZqMatrix& matrix, const ZqVector& shift, const ParameterSet& p) {
  u64 total = posterior_domain(p);
  std::vector<double> logs(total);
  const u64 chunk = 4096;
  const u64 chunks = (total + chunk - 1) / chunk;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long ci = 0; ci < static_cast<long long>(chunks); ++ci) {
    u64 beg = static_cast<u64>(ci) * chunk, end = std::min(total, beg + chunk);
    posterior_logs(matrix, shift, p, logs, beg, end);
  }
  return finish_posterior(std::move(logs), true);
}

BinaryKernelReport binary_kernel_experiment(const ParameterSet& p, std::size_t trials, u64 master_seed) {
  if (p.secret_dim > 24) throw BudgetError("binary_kernel_experiment: 2^n too large");
  const u64 total = u64{1} << p.secret_dim;
  const u64 q = p.modulus;
  u128 thr = norm_threshold_sq(p.b_preimage, p.image_dim);

  std::vector<double> raw(trials, 0.0), excl(trials, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long t = 0; t < static_cast<long long>(trials); ++t) {
    Rng rng = Rng::derive(master_seed, static_cast<u64>(t), 0x6b31);
    LossySample ls = sample_lossy(p, rng);
    BitString s = sample_uniform_bits(p.secret_dim, rng);
    DGaussTable chi(q, p.b_verify);
    ZqVector e = sample_dgauss_vector(chi, p.image_dim, rng);
    ZqVector u = add(matvec(ls.matrix, embed_bits(s, q)), e);

    u64 smask = 0;
    for (unsigned j = 0; j < p.secret_dim; ++j) smask |= u64{s[j]} << j;

    u64 count = 0;
    bool secret_in = false;
    for (u64 mask = 0; mask < total; ++mask) {
      u128 acc = 0;
      for (std::size_t i = 0; i < p.image_dim && acc <= thr; ++i) {
        u128 dot = u[i];
        const u64* row = ls.matrix.row(i);
        for (unsigned j = 0; j < p.secret_dim; ++j)
          if ((mask >> j) & 1) dot += q - row[j];
        i64 c = centered(static_cast<u64>(dot % q), q);
        acc += static_cast<u128>(c * c);
      }
      if (acc <= thr) {
        ++count;
        if (mask == smask) secret_in = true;
      }
    }
    raw[static_cast<std::size_t>(t)] = static_cast<double>(count);
    excl[static_cast<std::size_t>(t)] = static_cast<double>(count - (secret_in ? 1 : 0));
  }

  BinaryKernelReport rep;
  rep.trials = trials;
  rep.mean_count = mean_of(excl);
  rep.mean_count_raw = mean_of(raw);
  rep.std_count = stddev_of(excl);
  double ql = std::pow(static_cast<double>(q), p.lossy_rank);
  double pop = std::pow(2.0, p.secret_dim) - 1.0;
  rep.expected_mean = pop / ql;
  rep.low_count_threshold = pop / (2.0 * ql);
  rep.chebyshev_bound = 4.0 * ql / pop;
  std::size_t low = 0;
  for (double c : raw)
    if (c <= rep.low_count_threshold) ++low;
  rep.low_count_freq = static_cast<double>(low) / static_cast<double>(trials);
  return rep;
}

PosteriorMaxReport posterior_max_experiment(const ParameterSet& p, std::size_t samples, u64 master_seed) {
  PosteriorMaxReport rep;
  rep.samples = samples;
  rep.slack = std::exp(8.0 * M_PI * static_cast<double>(p.image_dim) * p.secret_dim * p.b_lossy /
                       p.b_verify);
  double ql = std::pow(static_cast<double>(p.modulus), p.lossy_rank);
  double pop = std::pow(2.0, p.secret_dim) - 1.0;
  rep.threshold = 3.0 * rep.slack * ql / pop;

  std::vector<double> maxima(samples, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long t = 0; t < static_cast<long long>(samples); ++t) {
    Rng rng = Rng::derive(master_seed, static_cast<u64>(t), 0x6b43);
    LossySample ls = sample_lossy(p, rng);
    BitString s = sample_uniform_bits(p.secret_dim, rng);
    DGaussTable chi(p.modulus, p.b_verify);
    ZqVector e = sample_dgauss_vector(chi, p.image_dim, rng);
    ZqVector u = add(matvec(ls.matrix, embed_bits(s, p.modulus)), e);
    maxima[static_cast<std::size_t>(t)] = posterior_serial(ls.matrix, u, p).max_prob;
  }

  std::size_t exceed = 0;
  double mx = 0;
  for (double m : maxima) {
    if (m > rep.threshold) ++exceed;
    mx = std::max(mx, m);
  }
  rep.exceed_freq = static_cast<double>(exceed) / static_cast<double>(samples);
  rep.mean_max_posterior = mean_of(maxima);
  rep.max_max_posterior = mx;
  return rep;
}

double min_entropy_exact(const ProverState& state) { return state_min_entropy_bits(state); }

SmoothEntropyReport smooth_min_entropy_report(const std::vector<double>& entropies,
                                              double threshold_bits) {
  SmoothEntropyReport rep;
  rep.count = entropies.size();
  rep.threshold_bits = threshold_bits;
  if (entropies.empty()) return rep;
  rep.min_bits = entropies.front();
  for (double h : entropies) {
    if (h < threshold_bits) ++rep.below;
    rep.min_bits = std::min(rep.min_bits, h);
  }
  rep.fraction_below = static_cast<double>(rep.below) / static_cast<double>(rep.count);
  rep.epsilon_estimate = rep.fraction_below;
  rep.mean_bits = mean_of(entropies);
  return rep;
}

EntropyCertificate entropy_certificate(double p_g, double p_t_excess, const ParameterSet& p,
                                       double c_offset) {
  if (!(p_g > 0 && p_g <= 1)) throw std::invalid_argument("entropy_certificate: p_g must be in (0,1]");
  if (!(p_t_excess >= 0 && p_t_excess <= 0.5))
    throw std::invalid_argument("entropy_certificate: p_t_excess must be in [0,1/2]");

  EntropyCertificate cert;
  cert.p_g = p_g;
  cert.p_t_excess = p_t_excess;
  cert.c_offset = c_offset;
  cert.delta = 0.5 - p_t_excess + std::sqrt(1.0 - p_g);
  cert.guarantee = cert.delta <= 0.5 + 1e-12;
  cert.epsilon = cert.guarantee ? 5.0 * std::pow(std::max(cert.delta, 0.0), 0.25) : 1.0;
  cert.epsilon_t44 = 2.0 * std::pow(std::max(1.0 - 4.0 * p_t_excess * p_t_excess, 0.0), 0.25);
  cert.bound_bits = static_cast<double>(p.secret_dim) - p.lossy_rank * p.log2_q() - c_offset;
  return cert;
}

double claw_test_pass_exact(const ProverState& state, unsigned mask_bits) {
  if (state.entries.size() == 1) {
    // flat outcome distribution: mask nonzero and a fair parity bit
    return (1.0 - std::pow(2.0, -static_cast<double>(mask_bits))) * 0.5;
  }
  if (state.entries.size() != 2 || state.entries[0].branch == state.entries[1].branch)
    throw std::invalid_argument("claw_test_pass_exact: expected a two-element claw state");
  const auto& e0 = state.entries[0];
  const auto& e1 = state.entries[1];
  if (e0.tag != e1.tag) return (1.0 - std::pow(2.0, -static_cast<double>(mask_bits))) * 0.5;
  double agree = std::norm(e0.amp + e1.amp) / 2.0;
  return (1.0 - std::pow(2.0, -static_cast<double>(mask_bits))) * agree;
}

PassRates pass_rate_estimator(Variant v, const ProverConfig& prover, const ParameterSet& p,
                              u64 enum_budget, unsigned hadamard_exact_max_bits,
                              std::size_t sessions_per_challenge, u64 master_seed,
                              const std::string& profile_name) {
  if (sessions_per_challenge < 100)
    throw std::invalid_argument("pass_rate_estimator: need at least 100 sessions per challenge");

  PassRates rates;
  for (int ci = 0; ci < 2; ++ci) {
    Challenge c = ci == 0 ? Challenge::generate : Challenge::test;
    std::size_t accepts = 0, decode_fail = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : accepts, decode_fail)
#endif
    for (long long i = 0; i < static_cast<long long>(sessions_per_challenge); ++i) {
      u64 idx = static_cast<u64>(i) + (ci ? sessions_per_challenge : 0);
      auto pr = make_prover(prover, p, enum_budget, hadamard_exact_max_bits, prover_rng(master_seed, idx));
      InprocChannel channel(*pr);
      SessionOptions opts;
      opts.profile_name = profile_name;
      opts.master_seed = master_seed;
      opts.session_index = idx;
      opts.adversary = prover.kind;
      opts.forced_challenge = c;
      TranscriptRecord rec = run_session(v, channel, p, opts);
      if (rec.verdict.accept) ++accepts;
      if (rec.verdict.reason == Reason::trapdoor_decode) ++decode_fail;
    }
    RateEstimate est = wilson_ci(accepts, sessions_per_challenge);
    if (ci == 0)
      rates.generation = est;
    else {
      rates.test = est;
      rates.decode_failures = decode_fail;
    }
  }
  return rates;
}

}  // namespace crnd
