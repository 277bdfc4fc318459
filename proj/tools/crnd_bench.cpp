// Times the serial reference kernels against the OpenMP versions and checks
// that both produce identical results on the benchmark inputs.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crnd/analysis.hpp"
#include "crnd/harness.hpp"

using namespace crnd;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Row {
  std::string name;
  double serial_ms;
  double parallel_ms;
  bool match;
};

void print_row(const Row& r) {
  std::printf("%-28s %10.1f ms %10.1f ms   x%.2f   %s\n", r.name.c_str(), r.serial_ms, r.parallel_ms,
              r.parallel_ms > 0 ? r.serial_ms / r.parallel_ms : 0.0, r.match ? "match" : "MISMATCH");
}

Row bench_preimage_scan(int reps) {
  const Profile& prof = builtin_profile("t2");
  Rng rng = Rng::derive(0xbe7c, 0, 0);
  auto [inst, sec] = verifier_start(Variant::p2, prof.params, rng);
  DGaussTable noise(prof.params.modulus, prof.params.b_preimage);
  ZqVector y = add(matvec(inst.matrix, sample_uniform_vector(prof.params.modulus,
                                                             prof.params.secret_dim, rng)),
                   sample_dgauss_vector(noise, prof.params.image_dim, rng));

  Row row{"preimage scan (t2)", 0, 0, true};
  PreimageSet ser, par;
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i)
    ser = enumerate_preimages_serial(inst.matrix, inst.shift, y, i & 1, prof.params, prof.enum_budget);
  row.serial_ms = ms_since(t0) / reps;
  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i)
    par = enumerate_preimages(inst.matrix, inst.shift, y, i & 1, prof.params, prof.enum_budget);
  row.parallel_ms = ms_since(t0) / reps;
  row.match = ser.elements == par.elements;
  return row;
}

Row bench_posterior(int reps) {
  // synthetic wide-secret profile: 2^18 posterior evaluations
  Profile prof = builtin_profile("t2");
  prof.params.secret_dim = 18;
  prof.params.bit_width = 18 * coord_bits(prof.params.modulus);
  prof.params.image_dim = 24;
  Rng rng = Rng::derive(0xbe7d, 0, 0);
  LossySample ls = sample_lossy(prof.params, rng);
  BitString s = sample_uniform_bits(prof.params.secret_dim, rng);
  DGaussTable chi(prof.params.modulus, prof.params.b_verify);
  ZqVector u = add(matvec(ls.matrix, embed_bits(s, prof.params.modulus)),
                   sample_dgauss_vector(chi, prof.params.image_dim, rng));

  Row row{"posterior (2^18 masks)", 0, 0, true};
  PosteriorDistribution ser, par;
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) ser = posterior_serial(ls.matrix, u, prof.params);
  row.serial_ms = ms_since(t0) / reps;
  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) par = posterior(ls.matrix, u, prof.params);
  row.parallel_ms = ms_since(t0) / reps;
  row.match = ser.argmax_mask == par.argmax_mask;
  for (std::size_t i = 0; i < ser.probs.size() && row.match; ++i)
    row.match = std::fabs(ser.probs[i] - par.probs[i]) < 1e-12;
  return row;
}

Row bench_sessions(std::size_t n) {
  const Profile& prof = builtin_profile("t1");
  BatchOptions opts;
  opts.variant = Variant::p1;
  opts.sessions = n;
  opts.master_seed = 0xbe7e;

  Row row{"sessions (t1, p1)", 0, 0, true};
  auto t0 = std::chrono::steady_clock::now();
  std::vector<TranscriptRecord> ser, par;
  {
#ifdef _OPENMP
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    ser = run_batch(prof, opts);
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
  }
  row.serial_ms = ms_since(t0);
  t0 = std::chrono::steady_clock::now();
  par = run_batch(prof, opts);
  row.parallel_ms = ms_since(t0);
  row.match = ser.size() == par.size();
  for (std::size_t i = 0; i < ser.size() && row.match; ++i) row.match = ser[i].same_canonical(par[i]);
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::size_t sessions = argc > 2 ? static_cast<std::size_t>(std::atoll(argv[2])) : 200;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled\n");
#endif
  std::printf("%-28s %13s %13s\n", "kernel", "serial", "parallel");

  Row rows[] = {bench_preimage_scan(reps), bench_posterior(reps), bench_sessions(sessions)};
  bool all = true;
  for (const Row& r : rows) {
    print_row(r);
    all = all && r.match;
  }
  return all ? 0 : 1;
}
