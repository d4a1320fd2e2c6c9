#include "evo/canon.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace evo {

std::string canonical_json(const json& j) {
    // nlohmann objects are std::map backed and floats print via Grisu2 (shortest round trip)
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string json_hash16(const json& j) { return sha256_hex(canonical_json(j)).substr(0, 16); }

}  // namespace evo
