#pragma once
// Small helpers shared by the problem registrations.

#include <cmath>
#include <stdexcept>
#include <string>

#include "evo/certify.hpp"
#include "evo/problem.hpp"

namespace evo::detail {

inline long inst_long(const json& inst, const char* key, long fallback) {
    auto it = inst.find(key);
    if (it == inst.end() || it->is_null()) return fallback;
    return it->get<long>();
}

inline double inst_double(const json& inst, const char* key, double fallback) {
    auto it = inst.find(key);
    if (it == inst.end() || it->is_null()) return fallback;
    return double_from_json(*it);
}

inline std::string inst_str(const json& inst, const char* key, const std::string& fallback) {
    auto it = inst.find(key);
    if (it == inst.end() || it->is_null()) return fallback;
    return it->get<std::string>();
}

// nonempty message when the instance pins a size the construction does not have
inline std::string size_mismatch(const json& inst, const char* key, std::size_t actual) {
    auto it = inst.find(key);
    if (it == inst.end() || it->is_null()) return {};
    if (it->get<long>() != static_cast<long>(actual))
        return std::string("instance ") + key + "=" + std::to_string(it->get<long>()) + " but construction has " +
               std::to_string(actual);
    return {};
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace evo::detail
