#pragma once

#include <cstdint>
#include <vector>

#include "crnd/messages.hpp"
#include "crnd/protocol.hpp"

namespace crnd {

// Frame layout: magic "CRND", version 0x01, tag byte, 4-byte big-endian
// payload length, payload.
//
// Payload encodings:
//   scalar      8-byte little-endian, value < q
//   vector      u32 length (big-endian), then scalars
//   matrix      u32 rows, u32 cols (big-endian), then row-major scalars
//   bitstring   u32 bit length (big-endian), then bytes packed LSB-first;
//               trailing pad bits must be zero
//   INSTANCE    matrix, vector
//   IMAGE       vector
//   CHALLENGE   one byte: 0x00 generate, 0x01 test
//   GEN_RESP    branch byte, vector
//   EQ_RESP     parity byte, bitstring
//   VERDICT     accept byte, u16 big-endian reason code
//
// The modulus is part of the profile both sides agreed on and is not carried
// on the wire.

constexpr std::uint8_t wire_version = 0x01;
constexpr std::uint8_t wire_magic[4] = {0x43, 0x52, 0x4e, 0x44};  // "CRND"
constexpr std::size_t wire_header_size = 10;

enum class WireTag : std::uint8_t {
  instance = 0x01,
  image = 0x02,
  challenge = 0x03,
  gen_resp = 0x04,
  eq_resp = 0x05,
  verdict = 0x06,
};

std::vector<std::uint8_t> encode_message(const Message& m);

struct FrameHeader {
  WireTag tag;
  std::uint32_t payload_len;
};

// Validates magic and version; throws TransportError with the matching reason.
FrameHeader parse_frame_header(const std::uint8_t* hdr);

Message decode_payload(WireTag tag, const std::uint8_t* p, std::size_t len, u64 q);

// Whole-frame round trip used by tests and the in-memory transport.
Message decode_frame(const std::vector<std::uint8_t>& frame, u64 q);

}  // namespace crnd
