#include "crnd/protocol.hpp"

#include <chrono>

namespace crnd {

Rng verifier_rng(uint64_t master_seed, uint64_t session_index) {
  return Rng::derive(master_seed, session_index, 0);
}

Rng prover_rng(uint64_t master_seed, uint64_t session_index) {
  return Rng::derive(master_seed, session_index, 1);
}

std::pair<Instance, VerifierSecret> verifier_start(Variant v, const ParameterSet& p, Rng& rng,
                                                   std::optional<Challenge> force) {
  VerifierSecret sec;
  sec.variant = v;

  bool lossy;
  if (v == Variant::p3) {
    sec.preset_challenge = force ? *force : (rng.bit() ? Challenge::test : Challenge::generate);
    lossy = *sec.preset_challenge == Challenge::generate;
  } else {
    sec.preset_challenge = force;
    lossy = v == Variant::p2;
  }

  Instance inst;
  if (lossy) {
    LossySample ls = sample_lossy(p, rng);
    inst.matrix = std::move(ls.matrix);
    sec.witness = std::move(ls.witness);
  } else {
    TrapdoorSample ts = gen_trap(p, rng);
    inst.matrix = std::move(ts.matrix);
    sec.witness = std::move(ts.trapdoor);
  }

  sec.secret = sample_uniform_bits(p.secret_dim, rng);
  DGaussTable chi(p.modulus, p.b_verify);
  sec.error = sample_dgauss_vector(chi, p.image_dim, rng);
  inst.shift = add(matvec(inst.matrix, embed_bits(sec.secret, p.modulus)), sec.error);
  return {std::move(inst), std::move(sec)};
}

Verdict check_generation(const ParameterSet& p, const Instance& inst, const ZqVector& image,
                         const GenResponse& resp) {
  if (resp.preimage.size() != p.secret_dim || resp.branch > 1) return {false, Reason::malformed};
  if (preimage_member(inst.matrix, inst.shift, image, resp.branch, resp.preimage, p.b_preimage))
    return {true, Reason::none};
  return {false, Reason::preimage_bound};
}

Verdict check_equation(const ParameterSet& p, const BitString& secret, const ZqVector& x0,
                       const EqResponse& resp) {
  if (resp.mask.size() != p.bit_width || resp.parity > 1) return {false, Reason::malformed};
  if (resp.mask.all_zero()) return {false, Reason::zero_mask};
  ZqVector x1 = sub(x0, embed_bits(secret, p.modulus));
  BitString delta = xor_bits(binary_rep(x0), binary_rep(x1));
  if (gf2_dot(resp.mask, delta) == resp.parity) return {true, Reason::none};
  return {false, Reason::equation_failed};
}

bool TranscriptRecord::same_canonical(const TranscriptRecord& o) const {
  auto eq_gen = [](const std::optional<GenResponse>& a, const std::optional<GenResponse>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->branch == b->branch && a->preimage == b->preimage;
  };
  auto eq_eq = [](const std::optional<EqResponse>& a, const std::optional<EqResponse>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->parity == b->parity && a->mask == b->mask;
  };
  return profile == o.profile && variant == o.variant && adversary == o.adversary &&
         master_seed == o.master_seed && session_index == o.session_index &&
         instance_digest == o.instance_digest && image == o.image && challenge == o.challenge &&
         eq_gen(gen, o.gen) && eq_eq(eq, o.eq) && verdict.accept == o.verdict.accept &&
         verdict.reason == o.verdict.reason && empty_sector == o.empty_sector;
}

TranscriptRecord run_session(Variant v, ProverChannel& channel, const ParameterSet& p,
                             const SessionOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  Rng vrng = verifier_rng(opts.master_seed, opts.session_index);

  TranscriptRecord rec;
  rec.profile = opts.profile_name;
  rec.variant = v;
  rec.adversary = opts.adversary;
  rec.master_seed = opts.master_seed;
  rec.session_index = opts.session_index;

  try {
    auto [inst, sec] = verifier_start(v, p, vrng, opts.forced_challenge);
    rec.instance_digest = digest_instance(inst.matrix, inst.shift);

    rec.image = channel.commit(inst);
    if (rec.image.size() != p.image_dim || rec.image.q != p.modulus)
      throw TransportError(Reason::malformed, "image dimension mismatch");

    if (opts.compute_entropy) {
      if (ProverState* st = channel.state_handle()) {
        rec.entropy_bits = state_min_entropy_bits(*st);
        u64 sizes[2] = {0, 0};
        for (const auto& e : st->entries) ++sizes[e.branch & 1];
        rec.sector_sizes = std::make_pair(sizes[0], sizes[1]);
      }
    }

    Challenge c = sec.preset_challenge ? *sec.preset_challenge
                                       : (vrng.bit() ? Challenge::test : Challenge::generate);
    rec.challenge = c;

    if (c == Challenge::generate) {
      rec.gen = channel.request_generation();
      rec.verdict = check_generation(p, inst, rec.image, *rec.gen);
    } else {
      // the verifier recovers the branch-0 representative before asking for
      // the equation: by inversion when it holds a trapdoor, by extraction
      // when it holds the register
      std::optional<ZqVector> x0;
      Reason fail_reason = Reason::none;
      if (std::holds_alternative<Trapdoor>(sec.witness)) {
        auto inv = invert(inst.matrix, std::get<Trapdoor>(sec.witness), rec.image, p);
        if (inv)
          x0 = std::move(inv->first);
        else
          fail_reason = Reason::trapdoor_decode;
      } else {
        ProverState* st = channel.state_handle();
        if (!st)
          throw TransportError(Reason::out_of_order,
                               "test round needs register access but the transport cannot provide it");
        x0 = extract_preimage(*st, sec.secret, vrng).x0;
      }
      rec.eq = channel.request_test();
      if (x0)
        rec.verdict = check_equation(p, sec.secret, *x0, *rec.eq);
      else
        rec.verdict = {false, fail_reason};
    }
    rec.empty_sector = channel.empty_sector_seen();
    channel.finish(rec.verdict);
  } catch (const TransportError& e) {
    rec.verdict = {false, e.reason};
  } catch (const BudgetError&) {
    rec.verdict = {false, Reason::budget_exceeded};
  }

  rec.timing_ns = static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
  return rec;
}

}  // namespace crnd
