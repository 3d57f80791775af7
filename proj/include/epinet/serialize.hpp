#ifndef EPINET_SERIALIZE_HPP
#define EPINET_SERIALIZE_HPP

#include <string>

#include "json.hpp"

#include "epinet/epinet.hpp"

namespace epinet {

nlohmann::json formula_to_json(const Formula& f);
Formula formula_from_json(const nlohmann::json& j);

// Canonical snapshot: object keys are sorted, every array is emitted in a
// fixed order, so identical nets serialize to identical bytes.
std::string snapshot(const Epinet& net);
nlohmann::json snapshot_json(const Epinet& net);

// Inverse of snapshot. Malformed input raises EpinetError(ParseError) with a
// position or key path in the message.
Epinet load(const std::string& bytes);
Epinet load_json(const nlohmann::json& j);

// FNV-1a 64 over the canonical snapshot, e.g. "fnv1a64:cbf29ce484222325".
std::string digest(const Epinet& net);

}  // namespace epinet

#endif
