#pragma once

#include <functional>
#include <memory>

#include "crnd/protocol.hpp"
#include "crnd/wire.hpp"

namespace crnd {

// Direct calls into a prover living in the same process; the only transport
// that can hand the register to the verifier (variant P2 test rounds).
class InprocChannel : public ProverChannel {
public:
  explicit InprocChannel(Prover& p) : prover_(p) {}

  ZqVector commit(const Instance& inst) override { return prover_.commit(inst); }
  GenResponse request_generation() override { return prover_.respond_generation(); }
  EqResponse request_test() override { return prover_.respond_test(); }
  ProverState* state_handle() override { return prover_.state_handle(); }
  void finish(const Verdict&) override {}
  bool empty_sector_seen() const override { return prover_.empty_sector_seen(); }

private:
  Prover& prover_;
};

// Verifier-side channel speaking the framed wire protocol over a byte-stream
// file descriptor. Does not own the descriptor.
class StreamChannel : public ProverChannel {
public:
  StreamChannel(int fd, u64 modulus, int timeout_ms = 30000)
      : fd_(fd), q_(modulus), timeout_ms_(timeout_ms) {}

  ZqVector commit(const Instance& inst) override;
  GenResponse request_generation() override;
  EqResponse request_test() override;
  ProverState* state_handle() override { return nullptr; }
  void finish(const Verdict& v) override;

private:
  Message exchange(const Message& out, WireTag expect);
  int fd_;
  u64 q_;
  int timeout_ms_;
};

// Prover-side loop: serves sessions over fd until the peer closes. A fresh
// prover is built per INSTANCE frame with the per-session randomness stream
// derived from (master_seed, first_session_index + k).
struct ProverServerOptions {
  ProverConfig prover;
  u64 master_seed = 0;
  u64 first_session_index = 0;
  int timeout_ms = 30000;
};

// Returns the number of completed sessions.
std::size_t serve_prover_stream(int fd, const ParameterSet& params, u64 enum_budget,
                                unsigned hadamard_exact_max_bits, const ProverServerOptions& opts);

// Frame-level helpers shared by both sides.
void write_frame(int fd, const Message& m, int timeout_ms);
Message read_frame(int fd, u64 q, int timeout_ms, WireTag* tag_out = nullptr);

// Small socket helpers (IPv4 loopback oriented).
int tcp_listen(const std::string& host, int port);       // returns listening fd
int tcp_accept(int listen_fd, int timeout_ms);            // returns connection fd
int tcp_connect(const std::string& host, int port, int timeout_ms);
std::pair<int, int> local_socketpair();                   // in-process stream pair

}  // namespace crnd
