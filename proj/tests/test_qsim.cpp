#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "crnd/analysis.hpp"
#include "crnd/protocol.hpp"
#include "crnd/qsim.hpp"
#include "helpers.hpp"

using namespace crnd;
using crnd::testing::make_params;
using crnd::testing::tv_distance;

namespace {

ParameterSet t1_params() { return make_params(251, 2, 18, 1, 3, 4, 5); }

std::pair<Instance, VerifierSecret> t1_instance(u64 seed, Variant v = Variant::p1) {
  ParameterSet p = t1_params();
  Rng rng = Rng::derive(seed, 0, 0);
  return verifier_start(v, p, rng);
}

}  // namespace

TEST_CASE("honest commit in the injective regime is the two-element claw") {
  ParameterSet p = t1_params();
  for (u64 seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    auto [inst, sec] = t1_instance(seed);
    Rng rng = Rng::derive(seed, 1, 1);
    CommitResult c = honest_commit(inst, p, 1 << 20, rng);
    REQUIRE(c.state.entries.size() == 2);
    CHECK(c.state.entries[0].branch == 0);
    CHECK(c.state.entries[1].branch == 1);
    CHECK(std::abs(c.state.entries[0].amp - std::complex<double>(M_SQRT1_2)) < 1e-12);
    CHECK(std::abs(c.state.entries[1].amp - std::complex<double>(M_SQRT1_2)) < 1e-12);
    // claw structure: x1 = x0 - s over Z_q
    ZqVector x0(p.modulus, c.state.entries[0].preimage);
    ZqVector x1(p.modulus, c.state.entries[1].preimage);
    CHECK(sub(x0, embed_bits(sec.secret, p.modulus)) == x1);
    // every support element is a valid preimage
    for (const auto& e : c.state.entries)
      CHECK(preimage_member(inst.matrix, inst.shift, c.image, e.branch, ZqVector(p.modulus, e.preimage),
                            p.b_preimage));
    CHECK(c.state.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("gaussian amplitude style stays normalized over the same support") {
  ParameterSet p = t1_params();
  auto [inst, sec] = t1_instance(7);
  Rng rng = Rng::derive(7, 1, 1);
  CommitResult c = honest_commit(inst, p, 1 << 20, rng, HonestAmplitudes::gaussian);
  CHECK(c.state.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.state.entries.size() == 2);
}

TEST_CASE("measure_standard follows the Born rule and consumes the state") {
  ProverState st;
  st.q = 5;
  st.entries = {{0, {1, 2}, 0, std::sqrt(0.25)}, {1, {3, 4}, 0, std::sqrt(0.75)}};
  int hits = 0;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    ProverState copy = st;
    Rng rng = Rng::derive(0xfeed, static_cast<u64>(i), 0);
    GenResponse r = measure_standard(copy, rng);
    CHECK(copy.consumed);
    if (r.branch == 1) ++hits;
  }
  CHECK(hits > N * 0.75 - 3 * std::sqrt(N * 0.1875));
  CHECK(hits < N * 0.75 + 3 * std::sqrt(N * 0.1875));

  ProverState once = st;
  Rng rng(1);
  measure_standard(once, rng);
  CHECK_THROWS_AS(measure_standard(once, rng), std::logic_error);
}

TEST_CASE("single-element support: measurement returns it with probability 1") {
  ProverState st;
  st.q = 5;
  st.entries = {{1, {2, 0}, 0, 1.0}};
  for (int i = 0; i < 20; ++i) {
    ProverState copy = st;
    Rng rng = Rng::derive(3, static_cast<u64>(i), 0);
    GenResponse r = measure_standard(copy, rng);
    CHECK(r.branch == 1);
    CHECK(r.preimage == ZqVector(5, {2, 0}));
  }
}

TEST_CASE("hadamard samples always satisfy the claw equation") {
  ParameterSet p = t1_params();
  auto [inst, sec] = t1_instance(11);
  Rng crng = Rng::derive(11, 1, 1);
  CommitResult base = honest_commit(inst, p, 1 << 20, crng);
  REQUIRE(base.state.entries.size() == 2);
  BitString j0 = binary_rep(ZqVector(p.modulus, base.state.entries[0].preimage));
  BitString j1 = binary_rep(ZqVector(p.modulus, base.state.entries[1].preimage));
  BitString delta = xor_bits(j0, j1);

  for (int i = 0; i < 5000; ++i) {
    ProverState copy = base.state;
    Rng rng = Rng::derive(12, static_cast<u64>(i), 0);
    EqResponse r = measure_hadamard(copy, p.bit_width, 20, rng);
    CHECK(gf2_dot(r.mask, delta) == r.parity);
  }
}

TEST_CASE("exact hadamard distribution sums to 1 and matches the closed form") {
  // w = 9 here (n=3 coordinates of 3 bits)
  ParameterSet p = make_params(5, 3, 10, 1, 1.0, 1.05, 1.15);
  ProverState claw;
  claw.q = 5;
  claw.entries = {{0, {1, 2, 3}, 0, 0.6}, {1, {4, 0, 2}, 0, 0.8}};

  std::vector<double> dist = hadamard_distribution(claw, p.bit_width, 16);
  double sum = 0;
  for (double pr : dist) sum += pr;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));

  // closed form: outcomes where parity*(b0^b1) ^ mask.delta = 0 carry
  // |a0+a1|^2 / 2^(w+1), the rest |a0-a1|^2 / 2^(w+1)
  BitString j0 = binary_rep(ZqVector(5, claw.entries[0].preimage));
  BitString j1 = binary_rep(ZqVector(5, claw.entries[1].preimage));
  BitString delta = xor_bits(j0, j1);
  const unsigned w = p.bit_width;
  double agree = std::norm(std::complex<double>(0.6) + 0.8) / std::pow(2.0, w + 1);
  double differ = std::norm(std::complex<double>(0.6) - 0.8) / std::pow(2.0, w + 1);
  for (u64 o = 0; o < dist.size(); ++o) {
    unsigned c = static_cast<unsigned>(o >> w);
    BitString mask(w);
    for (unsigned i = 0; i < w; ++i) mask[i] = (o >> (w - 1 - i)) & 1;
    unsigned rel = (c & 1) ^ gf2_dot(mask, delta);
    CHECK(dist[o] == doctest::Approx(rel == 0 ? agree : differ).epsilon(1e-9));
  }
}

TEST_CASE("closed-form two-element sampling matches the exact distribution") {
  ParameterSet p = make_params(5, 2, 8, 1, 1.0, 1.05, 1.15);  // w = 6
  ProverState claw;
  claw.q = 5;
  claw.entries = {{0, {1, 2}, 0, 0.6}, {1, {3, 3}, 0, 0.8}};
  std::vector<double> want = hadamard_distribution(claw, p.bit_width, 16);

  std::vector<double> got(want.size(), 0.0);
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    ProverState copy = claw;
    Rng rng = Rng::derive(0xaaa, static_cast<u64>(i), 0);
    EqResponse r = measure_hadamard(copy, p.bit_width, 16, rng);
    u64 mask = 0;
    for (std::size_t b = 0; b < r.mask.size(); ++b) mask = (mask << 1) | r.mask[b];
    got[(static_cast<u64>(r.parity) << p.bit_width) | mask] += 1.0 / N;
  }
  CHECK(tv_distance(want, got) < 0.02);
}

TEST_CASE("same-branch superposition uses the parity-free closed form") {
  ParameterSet p = make_params(5, 2, 8, 1, 1.0, 1.05, 1.15);
  ProverState st;
  st.q = 5;
  st.entries = {{0, {1, 2}, 0, M_SQRT1_2}, {0, {3, 3}, 0, M_SQRT1_2}};
  std::vector<double> want = hadamard_distribution(st, p.bit_width, 16);
  std::vector<double> got(want.size(), 0.0);
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    ProverState copy = st;
    Rng rng = Rng::derive(0xabc, static_cast<u64>(i), 0);
    EqResponse r = measure_hadamard(copy, p.bit_width, 16, rng);
    u64 mask = 0;
    for (std::size_t b = 0; b < r.mask.size(); ++b) mask = (mask << 1) | r.mask[b];
    got[(static_cast<u64>(r.parity) << p.bit_width) | mask] += 1.0 / N;
  }
  CHECK(tv_distance(want, got) < 0.02);
}

TEST_CASE("collapsed single-element state gives uniform equation outcomes") {
  ParameterSet p = make_params(5, 2, 8, 1, 1.0, 1.05, 1.15);
  std::map<u64, int> counts;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    ProverState st;
    st.q = 5;
    st.entries = {{1, {2, 4}, 0, 1.0}};
    Rng rng = Rng::derive(0xbcd, static_cast<u64>(i), 0);
    EqResponse r = measure_hadamard(st, p.bit_width, 16, rng);
    u64 mask = 0;
    for (std::size_t b = 0; b < r.mask.size(); ++b) mask = (mask << 1) | r.mask[b];
    counts[(static_cast<u64>(r.parity) << p.bit_width) | mask]++;
  }
  const u64 cells = u64{1} << (p.bit_width + 1);
  std::vector<double> obs(cells, 0.0), expect(cells, static_cast<double>(N) / cells);
  for (const auto& [k, v] : counts) obs[k] = v;
  CHECK(chi_square_gof(obs, expect).pvalue > 0.001);
}

TEST_CASE("entries with distinct environment tags do not interfere") {
  ParameterSet p = make_params(5, 2, 8, 1, 1.0, 1.05, 1.15);
  ProverState st;
  st.q = 5;
  st.entries = {{0, {1, 2}, 0, M_SQRT1_2}, {1, {3, 3}, 5, M_SQRT1_2}};
  std::vector<double> dist = hadamard_distribution(st, p.bit_width, 16);
  for (double pr : dist) CHECK(pr == doctest::Approx(1.0 / dist.size()).epsilon(1e-9));
}

TEST_CASE("extraction on a claw is non-destructive and deterministic") {
  ParameterSet p = t1_params();
  auto [inst, sec] = t1_instance(13);
  Rng crng = Rng::derive(13, 1, 1);
  CommitResult c = honest_commit(inst, p, 1 << 20, crng);
  REQUIRE(c.state.entries.size() == 2);
  ZqVector x0_expected(p.modulus, c.state.entries[0].preimage);

  ProverState st = c.state;
  Rng rng = Rng::derive(13, 2, 2);
  ExtractionResult ex = extract_preimage(st, sec.secret, rng);
  CHECK(ex.x0 == x0_expected);
  CHECK(st.entries.size() == 2);
  CHECK(st.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("extraction groups a uniform superposition of claw pairs") {
  // support {(0,x), (1,x-s)} for x in {0..4}, uniform over 10 elements (q=5, n=1)
  BitString s = BitString::parse("1");
  ProverState st;
  st.q = 5;
  for (u64 x = 0; x < 5; ++x) {
    st.entries.push_back({0, {x}, 0, std::sqrt(0.1)});
    st.entries.push_back({1, {(x + 4) % 5}, 0, std::sqrt(0.1)});
  }
  Rng rng = Rng::derive(0xd00d, 0, 0);
  ExtractionResult ex = extract_preimage(st, s, rng);
  REQUIRE(st.entries.size() == 2);
  CHECK(std::abs(std::norm(st.entries[0].amp) - 0.5) < 1e-9);
  CHECK(std::abs(std::norm(st.entries[1].amp) - 0.5) < 1e-9);
  (void)ex;
}

TEST_CASE("extraction of a branch-0-only state collapses to a single element") {
  BitString s = BitString::parse("01");
  ProverState st;
  st.q = 5;
  st.entries = {{0, {1, 2}, 0, M_SQRT1_2}, {0, {2, 2}, 0, M_SQRT1_2}};
  Rng rng = Rng::derive(0xd11d, 0, 0);
  ExtractionResult ex = extract_preimage(st, s, rng);
  CHECK(st.entries.size() == 1);
  CHECK(ex.x0.v == st.entries[0].preimage);
}

TEST_CASE("extraction marginal matches the amplitude-derived distribution") {
  BitString s = BitString::parse("1");
  ProverState st;
  st.q = 5;
  // weights chosen so aux groups have distinct masses
  double w[5] = {0.05, 0.10, 0.15, 0.30, 0.40};
  std::map<u64, double> want;
  for (u64 x = 0; x < 5; ++x) {
    st.entries.push_back({0, {x}, 0, std::sqrt(w[x] * 0.6)});
    st.entries.push_back({1, {(x + 4) % 5}, 0, std::sqrt(w[x] * 0.4)});
    want[x] = w[x];
  }
  std::map<u64, double> got;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    ProverState copy = st;
    Rng rng = Rng::derive(0xd22d, static_cast<u64>(i), 0);
    got[extract_preimage(copy, s, rng).x0[0]] += 1.0 / N;
  }
  double tv = 0;
  for (u64 x = 0; x < 5; ++x) tv += std::fabs(want[x] - got[x]);
  CHECK(tv / 2 < 0.02);
}

TEST_CASE("exact min-entropy of uniform states") {
  for (std::size_t k : {1u, 2u, 4u, 8u}) {
    ProverState st;
    st.q = 17;
    for (std::size_t i = 0; i < k; ++i)
      st.entries.push_back({0, {static_cast<u64>(i)}, 0, 1.0 / std::sqrt(static_cast<double>(k))});
    CHECK(state_min_entropy_bits(st) == doctest::Approx(std::log2(static_cast<double>(k))).epsilon(1e-12));
  }
}

TEST_CASE("collapsed adversary: generation always passes, test near half") {
  ParameterSet p = t1_params();
  const int N = 3000;
  int gen_ok = 0, test_ok = 0;
  for (int i = 0; i < N; ++i) {
    {
      auto prover = make_prover({AdversaryKind::collapsed, 0}, p, 1 << 20, 18,
                                prover_rng(0xc011, static_cast<u64>(i)));
      InprocChannel ch(*prover);
      SessionOptions opts{"t1", 0xc011, static_cast<u64>(i), AdversaryKind::collapsed,
                          Challenge::generate, false};
      if (run_session(Variant::p3, ch, p, opts).verdict.accept) ++gen_ok;
    }
    {
      auto prover = make_prover({AdversaryKind::collapsed, 0}, p, 1 << 20, 18,
                                prover_rng(0xc012, static_cast<u64>(i)));
      InprocChannel ch(*prover);
      SessionOptions opts{"t1", 0xc012, static_cast<u64>(i), AdversaryKind::collapsed, Challenge::test,
                          false};
      if (run_session(Variant::p3, ch, p, opts).verdict.accept) ++test_ok;
    }
  }
  CHECK(gen_ok == N);
  double rate = static_cast<double>(test_ok) / N;
  CHECK(rate > 0.5 - 0.03);
  CHECK(rate < 0.5 + 0.03);
}

TEST_CASE("skew adversary test pass rate follows 1/2 + alpha*sqrt(1-alpha^2)") {
  ParameterSet p = t1_params();
  for (double alpha : {0.3, 0.6, M_SQRT1_2}) {
    const int N = 2500;
    int ok = 0;
    for (int i = 0; i < N; ++i) {
      auto prover = make_prover({AdversaryKind::skew, alpha}, p, 1 << 20, 18,
                                prover_rng(0x5e3, static_cast<u64>(i)));
      InprocChannel ch(*prover);
      SessionOptions opts{"t1", 0x5e3, static_cast<u64>(i), AdversaryKind::skew, Challenge::test, false};
      if (run_session(Variant::p1, ch, p, opts).verdict.accept) ++ok;
    }
    double expect = 0.5 + alpha * std::sqrt(1 - alpha * alpha);
    double sem3 = 3 * std::sqrt(expect * (1 - expect) / N) + 0.005;
    CHECK(std::fabs(static_cast<double>(ok) / N - expect) < std::max(0.02, sem3));
  }
}

TEST_CASE("classical-zero adversary commits shift with the zero preimage") {
  ParameterSet p = t1_params();
  auto [inst, sec] = t1_instance(17);
  auto prover = make_prover({AdversaryKind::classical_zero, 0}, p, 1 << 20, 18, prover_rng(1, 1));
  ZqVector y = prover->commit(inst);
  CHECK(y == inst.shift);
  GenResponse r = prover->respond_generation();
  CHECK(r.branch == 1);
  CHECK(norm_sq(r.preimage) == 0);
}
