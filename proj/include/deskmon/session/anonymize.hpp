#pragma once

#include "deskmon/session/types.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace deskmon {

/// Real identity key (see Identity::key) -> anonymized numeric user id.
using IdentityMap = std::map<std::string, std::uint64_t>;

class UnknownIdentity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Replaces the identity block with the mapped numeric user id and redacts
/// identity strings from recorded answers. A manifest without identity is
/// returned unchanged. Throws UnknownIdentity when the map has no entry.
SessionManifest anonymize(const SessionManifest& manifest, const IdentityMap& identity_map);

/// True when no real-identity fields remain.
bool is_anonymized(const SessionManifest& manifest);

/// Keyed-hash key code ("h:" + 16 hex digits of HMAC-SHA256). Equal codes map to
/// equal hashes, so digraph identity survives.
std::string hash_key_code(std::string_view key_code, std::string_view secret);

/// Applies hash_key_code to every key event of every keyboard stream.
SessionManifest hash_key_codes(const SessionManifest& manifest, std::string_view secret);

}  // namespace deskmon
