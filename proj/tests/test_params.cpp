#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crnd/params.hpp"
#include "helpers.hpp"

using namespace crnd;
using crnd::testing::make_params;

namespace {
bool names(const ValidationReport& r, const std::string& what) {
  for (const auto& f : r.failures)
    if (f.find(what) != std::string::npos) return true;
  return false;
}
}  // namespace

TEST_CASE("ordering violation is rejected and named") {
  ParameterSet p = make_params(251, 2, 18, 1, 3, 200, 5);  // b_verify >= b_preimage
  ValidationReport r = validate_params(p);
  CHECK(!r.ok);
  CHECK(names(r, "A.4"));
}

TEST_CASE("bit width must match n*ceil(log2 q) in both modes") {
  for (auto mode : {ValidationMode::relaxed, ValidationMode::strict}) {
    ParameterSet p = make_params(251, 2, 18, 1, 3, 4, 5, mode);
    p.bit_width = 15;
    ValidationReport r = validate_params(p);
    CHECK(!r.ok);
    CHECK(names(r, "A.2"));
  }
}

TEST_CASE("relaxed mode accepts desk profiles with recorded warnings") {
  ParameterSet p = make_params(5, 8, 24, 2, 0.9, 1.0, 1.02);  // b_lossy below 2*sqrt(n)
  ValidationReport r = validate_params(p);
  CHECK(r.ok);
  CHECK(!r.warnings.empty());
  bool magnitude_warn = false, ratio_warn = false;
  for (const auto& w : r.warnings) {
    magnitude_warn = magnitude_warn || w.find("2*sqrt(n)") != std::string::npos;
    ratio_warn = ratio_warn || w.find("A.5") != std::string::npos;
  }
  CHECK(magnitude_warn);
  CHECK(ratio_warn);
  CHECK(r.ratio_preimage_verify == doctest::Approx(1.02));
  CHECK(r.ratio_verify_lossy == doctest::Approx(1.0 / 0.9));
}

TEST_CASE("strict mode enforces the declared magnitude constants") {
  ParameterSet p = make_params(5, 8, 24, 2, 0.9, 1.0, 1.02, ValidationMode::strict);
  p.strict_constants.a5_min_ratio = 100;
  ValidationReport r = validate_params(p);
  CHECK(!r.ok);
  CHECK(names(r, "A.5"));
  CHECK(names(r, "2*sqrt(n)"));
}

TEST_CASE("strict mode passes when the declared constants hold") {
  // q chosen so b_preimage matches q/(2*ct*sqrt(m n log2 q)) with ct = 1
  unsigned n = 16, m = 256, l = 2;
  u64 q = 1048583;  // prime just above 2^20
  double lq = std::log2(static_cast<double>(q));
  double bp = static_cast<double>(q) / (2.0 * std::sqrt(m * n * lq));
  ParameterSet p = make_params(q, n, m, l, 8, 800, bp, ValidationMode::strict);
  p.strict_constants.a1_n_factor = 0.3;
  p.strict_constants.a1_m_factor = 0.7;
  p.strict_constants.ct_const = 1.0;
  p.strict_constants.a3_rel_tol = 0.01;
  p.strict_constants.a5_min_ratio = 30;
  ValidationReport r = validate_params(p);
  for (const auto& f : r.failures) INFO(f);
  CHECK(r.ok);
}

TEST_CASE("composite modulus is rejected") {
  ParameterSet p = make_params(15, 2, 18, 1, 3, 4, 5);
  CHECK(!validate_params(p).ok);
}

TEST_CASE("domain size saturates") {
  ParameterSet p = make_params(67108859, 10, 20, 1, 7, 700000, 7000000);
  CHECK(p.domain_size() == UINT64_MAX);
  ParameterSet small = make_params(5, 8, 24, 2, 0.9, 1.0, 1.02);
  CHECK(small.domain_size() == 390625);
}
