#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pergraph/periodic_builder.hpp"

namespace pergraph {

/// \brief Reads a spec file: name, vertices, edges {id, from, to, length}, donors, receivers,
/// sigma {donor, receiver}.
///
/// Unknown or missing fields, duplicate keys or ids, dangling endpoints and nonpositive
/// lengths raise InputError with one "path:line: message" entry per problem. Structural
/// conditions on the pasting rule are left to validate_spec.
PeriodicSpec parse_spec(const std::string& path);
PeriodicSpec parse_spec_text(std::string_view text, const std::string& source = "<input>");

/// Pretty-printed document in the same format, fields in canonical order.
std::string serialize_spec(const PeriodicSpec& s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);

}  // namespace pergraph
