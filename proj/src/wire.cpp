#include "crnd/wire.hpp"

#include <cstring>

namespace crnd {

namespace {

constexpr std::size_t max_payload = std::size_t{1} << 26;

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_be16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_le64(std::vector<std::uint8_t>& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
  const std::uint8_t* p;
  std::size_t len;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > len) throw TransportError(Reason::malformed, "payload truncated");
  }
  std::uint8_t byte() {
    need(1);
    return p[pos++];
  }
  std::uint32_t be32() {
    need(4);
    std::uint32_t v = (std::uint32_t{p[pos]} << 24) | (std::uint32_t{p[pos + 1]} << 16) |
                      (std::uint32_t{p[pos + 2]} << 8) | std::uint32_t{p[pos + 3]};
    pos += 4;
    return v;
  }
  std::uint16_t be16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((std::uint16_t{p[pos]} << 8) | p[pos + 1]);
    pos += 2;
    return v;
  }
  u64 le64() {
    need(8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= u64{p[pos + i]} << (8 * i);
    pos += 8;
    return v;
  }
  void done() const {
    if (pos != len) throw TransportError(Reason::malformed, "trailing bytes in payload");
  }
};

void put_vector(std::vector<std::uint8_t>& out, const ZqVector& v) {
  put_be32(out, static_cast<std::uint32_t>(v.size()));
  for (u64 e : v.v) put_le64(out, e);
}

ZqVector get_vector(Reader& r, u64 q) {
  std::uint32_t n = r.be32();
  if (n > (1u << 20)) throw TransportError(Reason::malformed, "vector too long");
  ZqVector v(q, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    u64 e = r.le64();
    if (e >= q) throw TransportError(Reason::malformed, "scalar out of range");
    v[i] = e;
  }
  return v;
}

void put_matrix(std::vector<std::uint8_t>& out, const ZqMatrix& m) {
  put_be32(out, static_cast<std::uint32_t>(m.rows));
  put_be32(out, static_cast<std::uint32_t>(m.cols));
  for (u64 e : m.a) put_le64(out, e);
}

ZqMatrix get_matrix(Reader& r, u64 q) {
  std::uint32_t rows = r.be32(), cols = r.be32();
  if (static_cast<u64>(rows) * cols > (1u << 22))
    throw TransportError(Reason::malformed, "matrix too large");
  ZqMatrix m(q, rows, cols);
  for (auto& e : m.a) {
    u64 v = r.le64();
    if (v >= q) throw TransportError(Reason::malformed, "scalar out of range");
    e = v;
  }
  return m;
}

void put_bits(std::vector<std::uint8_t>& out, const BitString& b) {
  put_be32(out, static_cast<std::uint32_t>(b.size()));
  std::uint8_t cur = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    cur |= static_cast<std::uint8_t>((b[i] & 1) << (i % 8));
    if (i % 8 == 7) {
      out.push_back(cur);
      cur = 0;
    }
  }
  if (b.size() % 8 != 0) out.push_back(cur);
}

BitString get_bits(Reader& r) {
  std::uint32_t n = r.be32();
  if (n > (1u << 20)) throw TransportError(Reason::malformed, "bitstring too long");
  std::size_t nbytes = (n + 7) / 8;
  r.need(nbytes);
  BitString b(n);
  for (std::uint32_t i = 0; i < n; ++i) b[i] = (r.p[r.pos + i / 8] >> (i % 8)) & 1;
  for (std::size_t i = n; i < nbytes * 8; ++i)
    if ((r.p[r.pos + i / 8] >> (i % 8)) & 1) throw TransportError(Reason::malformed, "nonzero pad bits");
  r.pos += nbytes;
  return b;
}

}  // namespace

std::vector<std::uint8_t> encode_message(const Message& m) {
  std::vector<std::uint8_t> payload;
  WireTag tag;
  if (const auto* inst = std::get_if<Instance>(&m.payload)) {
    tag = WireTag::instance;
    put_matrix(payload, inst->matrix);
    put_vector(payload, inst->shift);
  } else if (const auto* img = std::get_if<Image>(&m.payload)) {
    tag = WireTag::image;
    put_vector(payload, img->y);
  } else if (const auto* ch = std::get_if<Challenge>(&m.payload)) {
    tag = WireTag::challenge;
    payload.push_back(static_cast<std::uint8_t>(*ch));
  } else if (const auto* gr = std::get_if<GenResponse>(&m.payload)) {
    tag = WireTag::gen_resp;
    payload.push_back(gr->branch);
    put_vector(payload, gr->preimage);
  } else if (const auto* er = std::get_if<EqResponse>(&m.payload)) {
    tag = WireTag::eq_resp;
    payload.push_back(er->parity);
    put_bits(payload, er->mask);
  } else {
    const auto& v = std::get<Verdict>(m.payload);
    tag = WireTag::verdict;
    payload.push_back(v.accept ? 1 : 0);
    put_be16(payload, static_cast<std::uint16_t>(v.reason));
  }

  std::vector<std::uint8_t> frame;
  frame.reserve(wire_header_size + payload.size());
  frame.insert(frame.end(), wire_magic, wire_magic + 4);
  frame.push_back(wire_version);
  frame.push_back(static_cast<std::uint8_t>(tag));
  put_be32(frame, static_cast<std::uint32_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

FrameHeader parse_frame_header(const std::uint8_t* hdr) {
  if (std::memcmp(hdr, wire_magic, 4) != 0) throw TransportError(Reason::bad_magic, "bad frame magic");
  if (hdr[4] != wire_version) throw TransportError(Reason::bad_version, "unsupported wire version");
  std::uint8_t tag = hdr[5];
  if (tag < 0x01 || tag > 0x06) throw TransportError(Reason::bad_tag, "unknown frame tag");
  std::uint32_t len = (std::uint32_t{hdr[6]} << 24) | (std::uint32_t{hdr[7]} << 16) |
                      (std::uint32_t{hdr[8]} << 8) | std::uint32_t{hdr[9]};
  if (len > max_payload) throw TransportError(Reason::malformed, "payload length too large");
  return {static_cast<WireTag>(tag), len};
}

Message decode_payload(WireTag tag, const std::uint8_t* p, std::size_t len, u64 q) {
  Reader r{p, len};
  Message m;
  switch (tag) {
    case WireTag::instance: {
      Instance inst;
      inst.matrix = get_matrix(r, q);
      inst.shift = get_vector(r, q);
      m.payload = std::move(inst);
      break;
    }
    case WireTag::image:
      m.payload = Image{get_vector(r, q)};
      break;
    case WireTag::challenge: {
      std::uint8_t c = r.byte();
      if (c > 1) throw TransportError(Reason::malformed, "bad challenge byte");
      m.payload = static_cast<Challenge>(c);
      break;
    }
    case WireTag::gen_resp: {
      GenResponse gr;
      gr.branch = r.byte();
      if (gr.branch > 1) throw TransportError(Reason::malformed, "bad branch byte");
      gr.preimage = get_vector(r, q);
      m.payload = std::move(gr);
      break;
    }
    case WireTag::eq_resp: {
      EqResponse er;
      er.parity = r.byte();
      if (er.parity > 1) throw TransportError(Reason::malformed, "bad parity byte");
      er.mask = get_bits(r);
      m.payload = std::move(er);
      break;
    }
    case WireTag::verdict: {
      Verdict v;
      std::uint8_t a = r.byte();
      if (a > 1) throw TransportError(Reason::malformed, "bad accept byte");
      v.accept = a == 1;
      v.reason = static_cast<Reason>(r.be16());
      m.payload = v;
      break;
    }
  }
  r.done();
  return m;
}

Message decode_frame(const std::vector<std::uint8_t>& frame, u64 q) {
  if (frame.size() < wire_header_size) throw TransportError(Reason::malformed, "frame truncated");
  FrameHeader h = parse_frame_header(frame.data());
  if (frame.size() != wire_header_size + h.payload_len)
    throw TransportError(Reason::malformed, "frame length mismatch");
  return decode_payload(h.tag, frame.data() + wire_header_size, h.payload_len, q);
}

}  // namespace crnd
