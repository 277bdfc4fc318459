#include "crnd/params.hpp"

#include <cmath>
#include <sstream>

namespace crnd {

double ParameterSet::log2_q() const { return std::log2(static_cast<double>(modulus)); }

u64 ParameterSet::domain_size() const {
  u128 total = 1;
  for (unsigned i = 0; i < secret_dim; ++i) {
    total *= modulus;
    if (total > static_cast<u128>(UINT64_MAX)) return UINT64_MAX;
  }
  return static_cast<u64>(total);
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << (ok ? "valid" : "invalid") << "\n";
  for (const auto& f : failures) os << "  FAIL " << f << "\n";
  for (const auto& w : warnings) os << "  warn " << w << "\n";
  os << "  ratio b_preimage/b_verify = " << ratio_preimage_verify << "\n";
  os << "  ratio b_verify/b_lossy    = " << ratio_verify_lossy << "\n";
  os << "  preimage-bound relation residual = " << a3_residual << "\n";
  return os.str();
}

ValidationReport validate_params(const ParameterSet& p) {
  ValidationReport rep;
  auto fail = [&](const std::string& s) {
    rep.ok = false;
    rep.failures.push_back(s);
  };
  auto warn = [&](const std::string& s) { rep.warnings.push_back(s); };

  if (p.modulus < 2 || !is_prime(p.modulus)) fail("modulus: q must be a prime >= 2");
  if (p.secret_dim == 0 || p.image_dim == 0 || p.lossy_rank == 0) fail("dims: n, m, l must be positive");
  if (p.lossy_rank >= p.secret_dim) warn("lossy rank >= secret dim: lossy mode hides nothing");

  if (p.modulus >= 2) {
    unsigned expect_w = p.secret_dim * coord_bits(p.modulus);
    if (p.bit_width != expect_w) {
      std::ostringstream os;
      os << "A.2: bit_width must equal secret_dim*ceil(log2 q) = " << expect_w << ", got " << p.bit_width;
      fail(os.str());
    }
  }

  if (!(p.b_lossy > 0 && p.b_verify > 0 && p.b_preimage > 0)) fail("A.4: noise widths must be positive");
  if (!(p.b_lossy < p.b_verify && p.b_verify < p.b_preimage))
    fail("A.4: ordering b_lossy < b_verify < b_preimage violated");

  rep.ratio_preimage_verify = p.b_verify > 0 ? p.b_preimage / p.b_verify : 0;
  rep.ratio_verify_lossy = p.b_lossy > 0 ? p.b_verify / p.b_lossy : 0;

  double lq = p.modulus >= 2 ? p.log2_q() : 1.0;
  double lower = 2.0 * std::sqrt(static_cast<double>(p.secret_dim));
  {
    std::ostringstream os;
    os << "A.4 magnitude: 2*sqrt(n) = " << lower << " vs b_lossy = " << p.b_lossy;
    if (p.b_lossy < lower) {
      if (p.mode == ValidationMode::strict)
        fail(os.str());
      else
        warn(os.str() + " (desk-scale profile, recorded)");
    }
  }

  const StrictConstants& sc = p.strict_constants;
  double a3_target =
      static_cast<double>(p.modulus) /
      (2.0 * sc.ct_const * std::sqrt(static_cast<double>(p.image_dim) * p.secret_dim * lq));
  rep.a3_residual = a3_target > 0 ? std::fabs(p.b_preimage - a3_target) / a3_target : 0;

  if (p.mode == ValidationMode::strict) {
    if (static_cast<double>(p.secret_dim) < sc.a1_n_factor * p.lossy_rank * lq)
      fail("A.1: secret_dim below declared multiple of lossy_rank*log2 q");
    if (static_cast<double>(p.image_dim) < sc.a1_m_factor * p.secret_dim * lq)
      fail("A.1: image_dim below declared multiple of secret_dim*log2 q");
    if (rep.a3_residual > sc.a3_rel_tol) {
      std::ostringstream os;
      os << "A.3: b_preimage deviates from q/(2*ct*sqrt(m n log2 q)) = " << a3_target << " by "
         << rep.a3_residual * 100 << "%";
      fail(os.str());
    }
    if (rep.ratio_preimage_verify < sc.a5_min_ratio || rep.ratio_verify_lossy < sc.a5_min_ratio) {
      std::ostringstream os;
      os << "A.5: ratios " << rep.ratio_preimage_verify << ", " << rep.ratio_verify_lossy
         << " below declared minimum " << sc.a5_min_ratio;
      fail(os.str());
    }
  } else {
    std::ostringstream os;
    os << "A.3 relation residual " << rep.a3_residual << "; A.5 ratios " << rep.ratio_preimage_verify << " and "
       << rep.ratio_verify_lossy << " (superpolynomial growth not checkable at fixed scale)";
    warn(os.str());
  }

  return rep;
}

}  // namespace crnd
