#pragma once

#include <string>

#include "evo/num.hpp"

namespace evo {

// sorted keys, no whitespace, shortest round-trip numbers
std::string canonical_json(const json& j);
std::string sha256_hex(const std::string& bytes);
// first 16 hex chars of sha256(canonical_json(j))
std::string json_hash16(const json& j);

}  // namespace evo
