#include "deskmon/session/anonymize.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>

namespace deskmon {
namespace {

void redact(std::string& text, const std::string& needle)
{
    if (needle.empty()) return;
    static const std::string kRedacted = "[redacted]";
    for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + kRedacted.size())) {
        text.replace(pos, needle.size(), kRedacted);
    }
}

}  // namespace

SessionManifest anonymize(const SessionManifest& manifest, const IdentityMap& identity_map)
{
    if (!manifest.identity) return manifest;
    const Identity& id = *manifest.identity;
    auto it = identity_map.find(id.key());
    if (it == identity_map.end()) {
        throw UnknownIdentity("identity of session '" + manifest.session_id +
                              "' is not in the identity map; extend the map before anonymizing");
    }
    SessionManifest out = manifest;
    out.user_id = it->second;
    out.identity.reset();
    for (auto& answer : out.context.answers) {
        redact(answer.text, id.name);
        redact(answer.text, id.email);
        redact(answer.text, id.id_number);
    }
    for (auto& s : out.streams) {
        if (auto* records = std::get_if<std::vector<ContextRecord>>(&s.samples)) {
            for (auto& r : *records) {
                for (auto& answer : r.snapshot.answers) {
                    redact(answer.text, id.name);
                    redact(answer.text, id.email);
                    redact(answer.text, id.id_number);
                }
            }
        }
    }
    return out;
}

bool is_anonymized(const SessionManifest& manifest)
{
    return !manifest.identity.has_value() && manifest.user_id.has_value();
}

std::string hash_key_code(std::string_view key_code, std::string_view secret)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
         reinterpret_cast<const unsigned char*>(key_code.data()), key_code.size(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out = "h:";
    for (unsigned int i = 0; i < 8 && i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

SessionManifest hash_key_codes(const SessionManifest& manifest, std::string_view secret)
{
    SessionManifest out = manifest;
    for (auto& s : out.streams) {
        if (auto* keys = std::get_if<std::vector<KeyEvent>>(&s.samples)) {
            for (auto& k : *keys) k.key_code = hash_key_code(k.key_code, secret);
        }
    }
    return out;
}

}  // namespace deskmon
