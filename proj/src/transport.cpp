#include "crnd/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace crnd {

namespace {

void wait_readable(int fd, int timeout_ms) {
  pollfd pfd{fd, POLLIN, 0};
  int rc = ::poll(&pfd, 1, timeout_ms);
  if (rc == 0) throw TransportError(Reason::timeout, "timed out waiting for peer");
  if (rc < 0) throw TransportError(Reason::malformed, std::string("poll: ") + std::strerror(errno));
}

void read_exact(int fd, std::uint8_t* buf, std::size_t n, int timeout_ms) {
  std::size_t got = 0;
  while (got < n) {
    wait_readable(fd, timeout_ms);
    ssize_t rc = ::read(fd, buf + got, n - got);
    if (rc == 0) throw TransportError(Reason::malformed, "peer closed mid-frame");
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(Reason::malformed, std::string("read: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(rc);
  }
}

void write_all(int fd, const std::uint8_t* buf, std::size_t n) {
  std::size_t sent = 0;
  while (sent < n) {
    ssize_t rc = ::write(fd, buf + sent, n - sent);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(Reason::malformed, std::string("write: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(rc);
  }
}

}  // namespace

void write_frame(int fd, const Message& m, int /*timeout_ms*/) {
  std::vector<std::uint8_t> frame = encode_message(m);
  write_all(fd, frame.data(), frame.size());
}

Message read_frame(int fd, u64 q, int timeout_ms, WireTag* tag_out) {
  std::uint8_t hdr[wire_header_size];
  read_exact(fd, hdr, wire_header_size, timeout_ms);
  FrameHeader h = parse_frame_header(hdr);
  std::vector<std::uint8_t> payload(h.payload_len);
  if (h.payload_len > 0) read_exact(fd, payload.data(), h.payload_len, timeout_ms);
  if (tag_out) *tag_out = h.tag;
  return decode_payload(h.tag, payload.data(), payload.size(), q);
}

Message StreamChannel::exchange(const Message& out, WireTag expect) {
  write_frame(fd_, out, timeout_ms_);
  WireTag got;
  Message in = read_frame(fd_, q_, timeout_ms_, &got);
  if (got != expect) throw TransportError(Reason::out_of_order, "unexpected frame tag");
  return in;
}

ZqVector StreamChannel::commit(const Instance& inst) {
  Message in = exchange(Message{inst}, WireTag::image);
  return std::get<Image>(in.payload).y;
}

GenResponse StreamChannel::request_generation() {
  Message in = exchange(Message{Challenge::generate}, WireTag::gen_resp);
  return std::get<GenResponse>(in.payload);
}

EqResponse StreamChannel::request_test() {
  Message in = exchange(Message{Challenge::test}, WireTag::eq_resp);
  return std::get<EqResponse>(in.payload);
}

void StreamChannel::finish(const Verdict& v) { write_frame(fd_, Message{v}, timeout_ms_); }

std::size_t serve_prover_stream(int fd, const ParameterSet& params, u64 enum_budget,
                                unsigned hadamard_exact_max_bits, const ProverServerOptions& opts) {
  std::size_t sessions = 0;
  for (;;) {
    WireTag tag;
    Message m;
    try {
      m = read_frame(fd, params.modulus, opts.timeout_ms, &tag);
    } catch (const TransportError&) {
      break;  // peer closed or stream broke between sessions
    }
    if (tag != WireTag::instance) throw TransportError(Reason::out_of_order, "expected INSTANCE");
    const Instance& inst = std::get<Instance>(m.payload);

    auto prover = make_prover(opts.prover, params, enum_budget, hadamard_exact_max_bits,
                              prover_rng(opts.master_seed, opts.first_session_index + sessions));
    ZqVector y = prover->commit(inst);
    write_frame(fd, Message{Image{y}}, opts.timeout_ms);

    Message cm = read_frame(fd, params.modulus, opts.timeout_ms, &tag);
    if (tag != WireTag::challenge) throw TransportError(Reason::out_of_order, "expected CHALLENGE");
    Challenge c = std::get<Challenge>(cm.payload);
    if (c == Challenge::generate)
      write_frame(fd, Message{prover->respond_generation()}, opts.timeout_ms);
    else
      write_frame(fd, Message{prover->respond_test()}, opts.timeout_ms);

    Message vm = read_frame(fd, params.modulus, opts.timeout_ms, &tag);
    if (tag != WireTag::verdict) throw TransportError(Reason::out_of_order, "expected VERDICT");
    ++sessions;
  }
  return sessions;
}

int tcp_listen(const std::string& host, int port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError(Reason::malformed, "socket failed");
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw TransportError(Reason::malformed, "bad listen address");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 8) < 0) {
    ::close(fd);
    throw TransportError(Reason::malformed, std::string("bind/listen: ") + std::strerror(errno));
  }
  return fd;
}

int tcp_accept(int listen_fd, int timeout_ms) {
  wait_readable(listen_fd, timeout_ms);
  int fd = ::accept(listen_fd, nullptr, nullptr);
  if (fd < 0) throw TransportError(Reason::malformed, std::string("accept: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

int tcp_connect(const std::string& host, int port, int /*timeout_ms*/) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError(Reason::malformed, "socket failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw TransportError(Reason::malformed, "bad connect address");
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    ::close(fd);
    throw TransportError(Reason::malformed, std::string("connect: ") + std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

std::pair<int, int> local_socketpair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) < 0)
    throw TransportError(Reason::malformed, "socketpair failed");
  return {fds[0], fds[1]};
}

}  // namespace crnd
