#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "crnd/zq.hpp"

namespace crnd {

enum class Variant { p1, p2, p3 };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);

enum class Challenge : std::uint8_t { generate = 0, test = 1 };

// Session abort / rejection reason codes (also the wire representation).
enum class Reason : std::uint16_t {
  none = 0x0000,
  bad_magic = 0x0001,
  bad_version = 0x0002,
  bad_tag = 0x0003,
  malformed = 0x0004,
  timeout = 0x0005,
  out_of_order = 0x0006,
  preimage_bound = 0x0010,
  equation_failed = 0x0011,
  zero_mask = 0x0012,
  trapdoor_decode = 0x0013,
  budget_exceeded = 0x0014,
};

std::string reason_name(Reason r);

// The public pair the prover sees; deliberately carries no witness so prover
// code cannot branch on how the matrix was produced.
struct Instance {
  ZqMatrix matrix;
  ZqVector shift;  // the masked secret, matrix*s + e
};

struct Image {
  ZqVector y;
};

struct GenResponse {
  std::uint8_t branch = 0;
  ZqVector preimage;
};

struct EqResponse {
  std::uint8_t parity = 0;
  BitString mask;
};

struct Verdict {
  bool accept = false;
  Reason reason = Reason::none;
};

struct Message {
  std::variant<Instance, Image, Challenge, GenResponse, EqResponse, Verdict> payload;
};

}  // namespace crnd
