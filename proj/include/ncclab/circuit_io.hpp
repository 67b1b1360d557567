#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "ncclab/circuit.hpp"

namespace ncclab {

/// Parses and validates a circuit document:
///
///   {"field": "Q" | {"GF": p}, "x_vars": n, "z_vars": m,
///    "nodes": [{"id", "kind": "input", "var"} | {"id", "kind": "const", "poly"}
///              | {"id", "kind": "sum", "args": [{"node", "scalar"}]}
///              | {"id", "kind": "prod", "left", "right"}],
///    "output": id}
///
/// Document ids are arbitrary distinct integers; the result uses dense ids in
/// bottom-up order (ties broken by document order). Errors name document ids.
Circuit parse_circuit(std::string_view text);
Circuit circuit_from_json(const nlohmann::json& doc);

nlohmann::ordered_json circuit_to_json(const Circuit& c);
/// Canonical serialization (two-space indent, trailing newline).
std::string write_circuit(const Circuit& c);

nlohmann::ordered_json field_to_json(const Field& f);
Field field_from_json(const nlohmann::json& j);
nlohmann::ordered_json coeff_to_json(const FieldElem& c);
FieldElem coeff_from_json(const Field& f, const nlohmann::json& j);

}  // namespace ncclab
