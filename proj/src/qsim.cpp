#include "crnd/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "crnd/samplers.hpp"

namespace crnd {

double ProverState::total_mass() const {
  double m = 0;
  for (const auto& e : entries) m += std::norm(e.amp);
  return m;
}

void ProverState::normalize() {
  double m = total_mass();
  if (m <= 0) throw std::logic_error("ProverState::normalize: empty state");
  double s = 1.0 / std::sqrt(m);
  for (auto& e : entries) e.amp *= s;
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::p1: return "p1";
    case Variant::p2: return "p2";
    case Variant::p3: return "p3";
  }
  return "?";
}

Variant variant_from_name(const std::string& s) {
  if (s == "p1") return Variant::p1;
  if (s == "p2") return Variant::p2;
  if (s == "p3") return Variant::p3;
  throw std::invalid_argument("unknown protocol variant: " + s);
}

std::string reason_name(Reason r) {
  switch (r) {
    case Reason::none: return "none";
    case Reason::bad_magic: return "bad-magic";
    case Reason::bad_version: return "bad-version";
    case Reason::bad_tag: return "bad-tag";
    case Reason::malformed: return "malformed";
    case Reason::timeout: return "timeout";
    case Reason::out_of_order: return "out-of-order";
    case Reason::preimage_bound: return "preimage-bound";
    case Reason::equation_failed: return "equation-failed";
    case Reason::zero_mask: return "zero-mask";
    case Reason::trapdoor_decode: return "trapdoor-decode";
    case Reason::budget_exceeded: return "budget-exceeded";
  }
  return "unknown";
}

std::string adversary_name(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::honest: return "honest";
    case AdversaryKind::honest_gaussian: return "honest-gaussian";
    case AdversaryKind::collapsed: return "collapsed";
    case AdversaryKind::classical_zero: return "classical-zero";
    case AdversaryKind::skew: return "skew";
  }
  return "?";
}

AdversaryKind adversary_from_name(const std::string& s) {
  if (s == "honest") return AdversaryKind::honest;
  if (s == "honest-gaussian") return AdversaryKind::honest_gaussian;
  if (s == "collapsed") return AdversaryKind::collapsed;
  if (s == "classical-zero") return AdversaryKind::classical_zero;
  if (s == "skew") return AdversaryKind::skew;
  throw std::invalid_argument("unknown adversary kind: " + s);
}

CommitResult honest_commit(const Instance& inst, const ParameterSet& p, u64 enum_budget, Rng& rng,
                           HonestAmplitudes style) {
  const u64 q = p.modulus;
  std::uint8_t bhat = static_cast<std::uint8_t>(rng.bit());
  ZqVector xhat = sample_uniform_vector(q, p.secret_dim, rng);
  DGaussTable noise(q, p.b_preimage);
  ZqVector ehat = sample_dgauss_vector(noise, p.image_dim, rng);

  ZqVector y = add(matvec(inst.matrix, xhat), ehat);
  if (bhat) y = add(y, inst.shift);

  PreimageSet sets[2];
  for (int b = 0; b < 2; ++b)
    sets[b] = enumerate_preimages(inst.matrix, inst.shift, y, b, p, enum_budget);

  CommitResult out;
  out.image = y;
  out.state.q = q;
  out.empty_sector = sets[0].size() == 0 || sets[1].size() == 0;
  if (sets[0].size() == 0 && sets[1].size() == 0)
    throw std::logic_error("honest_commit: sampled image has no valid preimage");

  if (style == HonestAmplitudes::uniform) {
    for (int b = 0; b < 2; ++b) {
      if (sets[b].size() == 0) continue;
      double sector_mass = out.empty_sector ? 1.0 : 0.5;
      double amp = std::sqrt(sector_mass / static_cast<double>(sets[b].size()));
      for (auto& x : sets[b].elements)
        out.state.entries.push_back({static_cast<std::uint8_t>(b), std::move(x), 0, amp});
    }
  } else {
    // weight by the noise density of each residual
    std::vector<double> logw;
    for (int b = 0; b < 2; ++b) {
      for (auto& x : sets[b].elements) {
        ZqVector r = sub(y, matvec(inst.matrix, ZqVector(q, x)));
        if (b) r = sub(r, inst.shift);
        double lw = 0;
        for (u64 c : r.v) lw += noise.log_density(c);
        logw.push_back(lw);
        out.state.entries.push_back({static_cast<std::uint8_t>(b), std::move(x), 0, 0.0});
      }
    }
    double mx = *std::max_element(logw.begin(), logw.end());
    double total = 0;
    for (double lw : logw) total += std::exp(lw - mx);
    for (std::size_t i = 0; i < logw.size(); ++i)
      out.state.entries[i].amp = std::sqrt(std::exp(logw[i] - mx) / total);
  }
  return out;
}

namespace {

std::size_t born_pick(const ProverState& state, Rng& rng) {
  double r = rng.real01() * state.total_mass();
  double acc = 0;
  for (std::size_t i = 0; i < state.entries.size(); ++i) {
    acc += std::norm(state.entries[i].amp);
    if (r < acc) return i;
  }
  return state.entries.size() - 1;
}

u64 bits_to_mask(const BitString& d) {
  u64 m = 0;
  for (std::size_t i = 0; i < d.size(); ++i) m = (m << 1) | d[i];
  return m;
}

BitString mask_to_bits(u64 m, unsigned w) {
  BitString d(w);
  for (unsigned i = 0; i < w; ++i) d[i] = (m >> (w - 1 - i)) & 1;
  return d;
}

}  // namespace

GenResponse measure_standard(ProverState& state, Rng& rng) {
  if (state.consumed) throw std::logic_error("measure_standard: state already consumed");
  if (state.entries.empty()) throw std::logic_error("measure_standard: empty state");
  std::size_t i = born_pick(state, rng);
  GenResponse resp{state.entries[i].branch, ZqVector(state.q, state.entries[i].preimage)};
  state.consumed = true;
  return resp;
}

void collapse_to_point(ProverState& state, Rng& rng) {
  if (state.consumed) throw std::logic_error("collapse_to_point: state already consumed");
  std::size_t i = born_pick(state, rng);
  SupportEntry kept = state.entries[i];
  kept.amp = 1.0;
  state.entries.assign(1, std::move(kept));
}

std::vector<double> hadamard_distribution(const ProverState& state, unsigned mask_bits,
                                          unsigned exact_max_bits) {
  if (mask_bits + 1 > exact_max_bits || mask_bits >= 63)
    throw BudgetError("hadamard_distribution: outcome space exceeds the exact-path limit");
  u64 outcomes = u64{1} << (mask_bits + 1);

  // per-entry mask of J(preimage) plus its tag
  struct Packed {
    u64 jmask;
    std::uint8_t branch;
    std::int32_t tag;
    std::complex<double> amp;
  };
  std::vector<Packed> packed;
  packed.reserve(state.entries.size());
  std::vector<std::int32_t> tags;
  for (const auto& e : state.entries) {
    BitString j = binary_rep(ZqVector(state.q, e.preimage));
    if (j.size() != mask_bits) throw std::logic_error("hadamard_distribution: mask width mismatch");
    packed.push_back({bits_to_mask(j), e.branch, e.tag, e.amp});
    tags.push_back(e.tag);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());

  std::vector<double> dist(outcomes, 0.0);
  double norm = 1.0 / static_cast<double>(outcomes);
  for (u64 o = 0; o < outcomes; ++o) {
    u64 dmask = o & ((u64{1} << mask_bits) - 1);
    unsigned c = static_cast<unsigned>(o >> mask_bits);
    double prob = 0;
    for (std::int32_t tag : tags) {
      std::complex<double> sum = 0;
      for (const auto& e : packed) {
        if (e.tag != tag) continue;
        unsigned phase = (c & e.branch) ^ (static_cast<unsigned>(__builtin_popcountll(dmask & e.jmask)) & 1u);
        sum += phase ? -e.amp : e.amp;
      }
      prob += std::norm(sum);
    }
    dist[o] = prob * norm;
  }
  return dist;
}

EqResponse measure_hadamard(ProverState& state, unsigned mask_bits, unsigned exact_max_bits, Rng& rng) {
  if (state.consumed) throw std::logic_error("measure_hadamard: state already consumed");
  if (state.entries.empty()) throw std::logic_error("measure_hadamard: empty state");

  EqResponse resp;
  const std::size_t support = state.entries.size();
  if (support == 1) {
    resp.parity = static_cast<std::uint8_t>(rng.bit());
    resp.mask = sample_uniform_bits(mask_bits, rng);
  } else if (support == 2) {
    const auto& e0 = state.entries[0];
    const auto& e1 = state.entries[1];
    if (e0.tag != e1.tag) {
      // orthogonal environments: no interference, flat outcome distribution
      resp.parity = static_cast<std::uint8_t>(rng.bit());
      resp.mask = sample_uniform_bits(mask_bits, rng);
    } else {
      BitString j0 = binary_rep(ZqVector(state.q, e0.preimage));
      BitString j1 = binary_rep(ZqVector(state.q, e1.preimage));
      BitString delta = xor_bits(j0, j1);
      double mass = std::norm(e0.amp) + std::norm(e1.amp);
      double p_plus = std::norm(e0.amp + e1.amp) / (2.0 * mass);
      unsigned rel = rng.real01() < p_plus ? 0 : 1;  // rel = c*(b0^b1) xor d.delta
      if (e0.branch != e1.branch) {
        resp.mask = sample_uniform_bits(mask_bits, rng);
        resp.parity = static_cast<std::uint8_t>(rel ^ gf2_dot(resp.mask, delta));
      } else {
        // same branch, distinct preimages: delta != 0, parity bit is free
        resp.parity = static_cast<std::uint8_t>(rng.bit());
        resp.mask = sample_uniform_bits(mask_bits, rng);
        std::size_t pivot = 0;
        while (pivot < delta.size() && delta[pivot] == 0) ++pivot;
        if (pivot == delta.size()) throw std::logic_error("measure_hadamard: duplicate support entries");
        resp.mask[pivot] = 0;
        resp.mask[pivot] = static_cast<std::uint8_t>(rel ^ gf2_dot(resp.mask, delta));
      }
    }
  } else {
    std::vector<double> dist = hadamard_distribution(state, mask_bits, exact_max_bits);
    double r = rng.real01();
    double acc = 0;
    u64 picked = dist.size() - 1;
    for (u64 o = 0; o < dist.size(); ++o) {
      acc += dist[o];
      if (r < acc) {
        picked = o;
        break;
      }
    }
    resp.parity = static_cast<std::uint8_t>(picked >> mask_bits);
    resp.mask = mask_to_bits(picked & ((u64{1} << mask_bits) - 1), mask_bits);
  }
  state.consumed = true;
  return resp;
}

ExtractionResult extract_preimage(ProverState& state, const BitString& secret, Rng& rng) {
  if (state.consumed) throw std::logic_error("extract_preimage: state already consumed");
  if (state.entries.empty()) throw std::logic_error("extract_preimage: empty state");
  const u64 q = state.q;

  // group by the auxiliary value x + branch*s
  std::map<std::vector<u64>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < state.entries.size(); ++i) {
    const auto& e = state.entries[i];
    std::vector<u64> aux = e.preimage;
    if (e.branch) {
      for (std::size_t j = 0; j < aux.size(); ++j) aux[j] = (aux[j] + secret[j]) % q;
    }
    groups[std::move(aux)].push_back(i);
  }

  double r = rng.real01() * state.total_mass();
  double acc = 0;
  const std::vector<u64>* picked_aux = nullptr;
  const std::vector<std::size_t>* members = nullptr;
  for (const auto& [aux, idxs] : groups) {
    double mass = 0;
    for (std::size_t i : idxs) mass += std::norm(state.entries[i].amp);
    acc += mass;
    picked_aux = &aux;
    members = &idxs;
    if (r < acc) break;
  }

  ExtractionResult out;
  out.x0 = ZqVector(q, *picked_aux);
  std::vector<SupportEntry> collapsed;
  for (std::size_t i : *members) collapsed.push_back(state.entries[i]);
  state.entries = std::move(collapsed);
  state.normalize();
  return out;
}

double state_min_entropy_bits(const ProverState& state) {
  double mx = 0;
  for (const auto& e : state.entries) mx = std::max(mx, std::norm(e.amp));
  if (mx <= 0) throw std::logic_error("state_min_entropy_bits: empty state");
  return -std::log2(mx);
}

namespace {

class SimProver : public Prover {
public:
  SimProver(ProverConfig cfg, const ParameterSet& p, u64 budget, unsigned max_bits, Rng rng)
      : cfg_(cfg), params_(p), budget_(budget), exact_max_bits_(max_bits), rng_(rng) {}

  ZqVector commit(const Instance& inst) override {
    switch (cfg_.kind) {
      case AdversaryKind::honest:
      case AdversaryKind::honest_gaussian:
      case AdversaryKind::skew: {
        auto style = cfg_.kind == AdversaryKind::honest_gaussian ? HonestAmplitudes::gaussian
                                                                 : HonestAmplitudes::uniform;
        CommitResult c = honest_commit(inst, params_, budget_, rng_, style);
        state_ = std::move(c.state);
        empty_sector_ = c.empty_sector;
        if (cfg_.kind == AdversaryKind::skew) apply_skew();
        return c.image;
      }
      case AdversaryKind::collapsed: {
        CommitResult c = honest_commit(inst, params_, budget_, rng_);
        state_ = std::move(c.state);
        empty_sector_ = c.empty_sector;
        collapse_to_point(state_, rng_);
        return c.image;
      }
      case AdversaryKind::classical_zero: {
        // fixed branch 1 with the known preimage 0: image = shift exactly
        state_.q = params_.modulus;
        state_.entries.assign(1, {1, std::vector<u64>(params_.secret_dim, 0), 0, 1.0});
        return inst.shift;
      }
    }
    throw std::logic_error("unreachable adversary kind");
  }

  GenResponse respond_generation() override { return measure_standard(state_, rng_); }

  EqResponse respond_test() override {
    return measure_hadamard(state_, params_.bit_width, exact_max_bits_, rng_);
  }

  ProverState* state_handle() override { return &state_; }
  bool empty_sector_seen() const override { return empty_sector_; }

private:
  void apply_skew() {
    double a2 = cfg_.skew_alpha * cfg_.skew_alpha;
    double mass[2] = {0, 0};
    for (const auto& e : state_.entries) mass[e.branch] += std::norm(e.amp);
    if (mass[0] <= 0 || mass[1] <= 0) return;  // degenerate; keep the honest weights
    double target[2] = {a2, 1.0 - a2};
    for (auto& e : state_.entries) e.amp *= std::sqrt(target[e.branch] / mass[e.branch]);
  }

  ProverConfig cfg_;
  ParameterSet params_;
  u64 budget_;
  unsigned exact_max_bits_;
  Rng rng_;
  ProverState state_;
  bool empty_sector_ = false;
};

}  // namespace

std::unique_ptr<Prover> make_prover(const ProverConfig& cfg, const ParameterSet& p, u64 enum_budget,
                                    unsigned hadamard_exact_max_bits, Rng rng) {
  return std::make_unique<SimProver>(cfg, p, enum_budget, hadamard_exact_max_bits, rng);
}

}  // namespace crnd
