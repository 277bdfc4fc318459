#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crnd/samplers.hpp"
#include "crnd/stats.hpp"
#include "helpers.hpp"

using namespace crnd;
using crnd::testing::make_params;

namespace {

// [-R | I] * A as a matrix, for the identity check
ZqMatrix trapdoor_times(const Trapdoor& t, const ZqMatrix& a) {
  ZqMatrix out(a.q, t.width, a.cols);
  for (std::size_t c = 0; c < a.cols; ++c) {
    ZqVector col(a.q, a.rows);
    for (std::size_t r = 0; r < a.rows; ++r) col[r] = a.at(r, c);
    ZqVector v = t.apply(col);
    for (std::size_t r = 0; r < t.width; ++r) out.at(r, c) = v[r];
  }
  return out;
}

}  // namespace

TEST_CASE("uniform matrix sampling: dims, determinism, uniformity") {
  ParameterSet p = make_params(17, 3, 8, 1, 1, 2, 3);
  Rng a = Rng::derive(1, 2, 3), b = Rng::derive(1, 2, 3);
  ZqMatrix ma = sample_uniform_matrix(p.modulus, 8, 3, a);
  ZqMatrix mb = sample_uniform_matrix(p.modulus, 8, 3, b);
  CHECK(ma.rows == 8);
  CHECK(ma.cols == 3);
  CHECK(ma == mb);

  // entry chi-square at N = 1e5
  Rng rng = Rng::derive(0x5a43, 0, 0);
  std::vector<double> counts(17, 0.0), expect(17, 100000.0 / 17);
  for (int i = 0; i < 100000; ++i) counts[rng.below(17)] += 1;
  CHECK(chi_square_gof(counts, expect).pvalue > 0.001);
}

TEST_CASE("gen_trap produces the exact gadget identity") {
  ParameterSet p = make_params(251, 2, 18, 1, 3, 4, 5);
  Rng rng = Rng::derive(0x91, 0, 0);
  for (int t = 0; t < 10; ++t) {
    TrapdoorSample ts = gen_trap(p, rng);
    CHECK(trapdoor_times(ts.trapdoor, ts.matrix) == gadget_matrix(p));
    for (std::int8_t e : ts.trapdoor.r) {
      CHECK(e >= -1);
      CHECK(e <= 1);
    }
  }
}

TEST_CASE("gen_trap requires room for the gadget block") {
  ParameterSet p = make_params(5, 8, 24, 2, 0.9, 1.0, 1.02);  // m < w + n
  Rng rng(1);
  CHECK_THROWS_AS(gen_trap(p, rng), std::invalid_argument);
}

TEST_CASE("invert recovers every binary secret exhaustively (n=2, q=17, e=0)") {
  ParameterSet p = make_params(17, 2, 14, 1, 1, 2, 3);
  Rng rng = Rng::derive(0x92, 0, 0);
  TrapdoorSample ts = gen_trap(p, rng);
  for (u64 s0 = 0; s0 < 2; ++s0) {
    for (u64 s1 = 0; s1 < 2; ++s1) {
      ZqVector s(17, {s0, s1});
      auto res = invert(ts.matrix, ts.trapdoor, matvec(ts.matrix, s), p);
      REQUIRE(res.has_value());
      CHECK(res->first == s);
      CHECK(norm_sq(res->second) == 0);
    }
  }
}

TEST_CASE("invert recovers general secrets with verifier-level noise (t4 profile)") {
  ParameterSet p = make_params(65537, 4, 80, 1, 4, 300, 3000);
  Rng rng = Rng::derive(0x93, 0, 0);
  TrapdoorSample ts = gen_trap(p, rng);
  DGaussTable chi(p.modulus, p.b_verify);
  int ok = 0, wrong = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    ZqVector s = sample_uniform_vector(p.modulus, p.secret_dim, rng);
    ZqVector e = sample_dgauss_vector(chi, p.image_dim, rng);
    ZqVector u = add(matvec(ts.matrix, s), e);
    auto res = invert(ts.matrix, ts.trapdoor, u, p);
    if (res) {
      if (res->first == s && res->second == e)
        ++ok;
      else
        ++wrong;
    }
  }
  CHECK(wrong == 0);
  CHECK(ok >= 999);
}

TEST_CASE("noise beyond the margin yields a failure flag, not a wrong answer") {
  ParameterSet p = make_params(65537, 4, 80, 1, 4, 300, 3000);
  Rng rng = Rng::derive(0x94, 0, 0);
  TrapdoorSample ts = gen_trap(p, rng);
  ZqVector s = sample_uniform_vector(p.modulus, p.secret_dim, rng);
  // blast every coordinate far past the decode margin
  ZqVector e(p.modulus, p.image_dim);
  for (auto& v : e.v) v = p.modulus / 2 - rng.below(1000);
  ZqVector u = add(matvec(ts.matrix, s), e);
  auto res = invert(ts.matrix, ts.trapdoor, u, p);
  if (res) CHECK(res->first == s);  // either honest failure or the exact answer
}

TEST_CASE("measured decode margin covers the documented worst case") {
  // worst case |[-R|I] e|_inf <= (head+1) * max|e_i|; with t1 numbers this is
  // 3*(b_preimage + b_verify) = 27 < q/8 = 31
  ParameterSet p = make_params(251, 2, 18, 1, 3, 4, 5);
  CHECK(decode_noise_bound(p.modulus) == 31);
  CHECK((p.image_dim - p.bit_width + 1) * (p.b_preimage + p.b_verify) < 31.5);
}

TEST_CASE("lossy sample witness identity holds entry-exactly") {
  ParameterSet p = make_params(5, 8, 24, 2, 1.0, 1.05, 1.15);
  Rng rng = Rng::derive(0x95, 0, 0);
  LossySample ls = sample_lossy(p, rng);
  for (std::size_t r = 0; r < p.image_dim; ++r) {
    for (std::size_t c = 0; c < p.secret_dim; ++c) {
      u64 acc = ls.witness.noise.at(r, c);
      for (std::size_t k = 0; k < p.lossy_rank; ++k)
        acc = (acc + ls.witness.low_left.at(r, k) * ls.witness.low_right.at(k, c)) % p.modulus;
      CHECK(ls.matrix.at(r, c) == acc % p.modulus);
    }
  }
  // noise entries honor the truncation bound
  for (u64 v : ls.witness.noise.a) CHECK(std::abs(centered(v, p.modulus)) <= 1);
}

TEST_CASE("lossy matrix minus noise has rank at most the lossy rank") {
  ParameterSet p = make_params(17, 6, 12, 2, 1.0, 1.5, 2.0);
  Rng rng = Rng::derive(0x96, 0, 0);
  for (int t = 0; t < 5; ++t) {
    LossySample ls = sample_lossy(p, rng);
    ZqMatrix low(p.modulus, p.image_dim, p.secret_dim);
    for (std::size_t i = 0; i < low.a.size(); ++i)
      low.a[i] = (ls.matrix.a[i] + p.modulus - ls.witness.noise.a[i]) % p.modulus;
    CHECK(crnd::testing::zq_rank(low) <= p.lossy_rank);
  }
}

TEST_CASE("kernel vectors of the right factor map through the noise only") {
  ParameterSet p = make_params(17, 6, 12, 2, 1.0, 1.5, 2.0);
  Rng rng = Rng::derive(0x97, 0, 0);
  LossySample ls = sample_lossy(p, rng);
  ZqVector k = crnd::testing::zq_kernel_vector(ls.witness.low_right);
  REQUIRE(matvec(ls.witness.low_right, k) == ZqVector(p.modulus, p.lossy_rank));
  ZqVector via_matrix = matvec(ls.matrix, k);
  ZqVector via_noise = matvec(ls.witness.noise, k);
  CHECK(via_matrix == via_noise);
}

TEST_CASE("samplers are pure functions of (params, seed)") {
  ParameterSet p = make_params(251, 2, 18, 1, 3, 4, 5);
  Rng a = Rng::derive(77, 3, 1), b = Rng::derive(77, 3, 1);
  TrapdoorSample ta = gen_trap(p, a), tb = gen_trap(p, b);
  CHECK(ta.matrix == tb.matrix);
  CHECK(ta.trapdoor.r == tb.trapdoor.r);
  LossySample la = sample_lossy(p, a), lb = sample_lossy(p, b);
  CHECK(la.matrix == lb.matrix);
}
