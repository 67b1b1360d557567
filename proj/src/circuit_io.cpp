#include "ncclab/circuit_io.hpp"

#include <map>
#include <queue>

#include "ncclab/errors.hpp"

namespace ncclab {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json field_to_json(const Field& f) {
  if (f.is_rational()) return "Q";
  ordered_json j;
  j["GF"] = f.modulus();
  return j;
}

Field field_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "Q") return Field::rationals();
  if (j.is_object() && j.size() == 1 && j.contains("GF") && j["GF"].is_number_unsigned()) {
    return Field::prime(j["GF"].get<std::uint64_t>());
  }
  throw ParseError("field must be \"Q\" or {\"GF\": p}, got " + j.dump());
}

ordered_json coeff_to_json(const FieldElem& c) {
  if (!c.field().is_rational()) return c.residue();
  const mpq_class& q = c.rational();
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
  return q.get_str();
}

FieldElem coeff_from_json(const Field& f, const json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) {
      return FieldElem::parse(f, std::to_string(j.get<std::uint64_t>()));
    }
    return FieldElem::from_int(f, j.get<long>());
  }
  if (j.is_string()) return FieldElem::parse(f, j.get<std::string>());
  throw ParseError("coefficient must be an integer or \"a/b\" string, got " + j.dump());
}

namespace {

struct RawNode {
  long long id = 0;
  const json* body = nullptr;
};

long long get_id(const json& node, const char* key, long long owner) {
  if (!node.contains(key)) {
    throw ParseError("node " + std::to_string(owner) + ": missing \"" + key + "\"");
  }
  const json& v = node[key];
  if (!v.is_number_integer()) {
    throw ParseError("node " + std::to_string(owner) + ": \"" + key + "\" must be an integer");
  }
  return v.get<long long>();
}

std::size_t get_size(const json& doc, const char* key) {
  if (!doc.contains(key)) return 0;
  if (!doc[key].is_number_unsigned()) {
    throw ParseError(std::string("\"") + key + "\" must be a non-negative integer");
  }
  return doc[key].get<std::size_t>();
}

}  // namespace

Circuit circuit_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("circuit document must be a JSON object");
  if (!doc.contains("field")) throw ParseError("missing \"field\"");
  const Field field = field_from_json(doc["field"]);
  const std::size_t x_vars = get_size(doc, "x_vars");
  const std::size_t z_vars = get_size(doc, "z_vars");
  if (x_vars >= kZBase || z_vars >= kZBase) throw ParseError("too many variables");
  if (!doc.contains("nodes") || !doc["nodes"].is_array() || doc["nodes"].empty()) {
    throw ParseError("\"nodes\" must be a non-empty array");
  }
  if (!doc.contains("output") || !doc["output"].is_number_integer()) {
    throw ParseError("\"output\" must be a node id");
  }

  const json& nodes = doc["nodes"];
  std::vector<RawNode> raw;
  std::map<long long, std::size_t> index_of;
  for (const json& n : nodes) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_number_integer()) {
      throw ParseError("every node needs an integer \"id\"");
    }
    const long long id = n["id"].get<long long>();
    if (!index_of.emplace(id, raw.size()).second) {
      throw ParseError("duplicate node id " + std::to_string(id));
    }
    raw.push_back({id, &n});
  }

  // Children (as raw indices) per node, with arity / reference checks.
  std::vector<std::vector<std::size_t>> kids(raw.size());
  const auto resolve = [&](long long owner, long long ref) {
    auto it = index_of.find(ref);
    if (it == index_of.end()) {
      throw ParseError("dangling reference: node " + std::to_string(owner) +
                       " refers to missing node " + std::to_string(ref));
    }
    return it->second;
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const json& n = *raw[i].body;
    const long long id = raw[i].id;
    if (!n.contains("kind") || !n["kind"].is_string()) {
      throw ParseError("node " + std::to_string(id) + ": missing \"kind\"");
    }
    const std::string kind = n["kind"].get<std::string>();
    if (kind == "sum") {
      if (!n.contains("args") || !n["args"].is_array() || n["args"].empty()) {
        throw ParseError("node " + std::to_string(id) + ": sum gate needs a non-empty \"args\"");
      }
      for (const json& a : n["args"]) {
        if (!a.is_object()) throw ParseError("node " + std::to_string(id) + ": malformed sum arg");
        kids[i].push_back(resolve(id, get_id(a, "node", id)));
      }
    } else if (kind == "prod") {
      std::size_t arity = 0;
      if (n.contains("args")) {
        arity = n["args"].is_array() ? n["args"].size() : 1;
      } else {
        arity = static_cast<std::size_t>(n.contains("left")) + static_cast<std::size_t>(n.contains("right"));
      }
      if (n.contains("args") || arity != 2) {
        throw ParseError("node " + std::to_string(id) + ": product arity " + std::to_string(arity) +
                         " != 2 (need ordered \"left\" and \"right\")");
      }
      kids[i].push_back(resolve(id, get_id(n, "left", id)));
      kids[i].push_back(resolve(id, get_id(n, "right", id)));
    } else if (kind != "input" && kind != "const") {
      throw ParseError("node " + std::to_string(id) + ": unknown kind \"" + kind + "\"");
    }
  }
  const long long out_doc_id = doc["output"].get<long long>();
  if (!index_of.count(out_doc_id)) {
    throw ParseError("dangling reference: output refers to missing node " + std::to_string(out_doc_id));
  }

  // Kahn's algorithm; the ready set is ordered by document position.
  std::vector<std::size_t> pending(raw.size(), 0);
  std::vector<std::vector<std::size_t>> users(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t ch : kids[i]) {
      ++pending[i];
      users[ch].push_back(i);
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(i);
    for (std::size_t u : users[i]) {
      if (--pending[u] == 0) ready.push(u);
    }
  }
  if (order.size() != raw.size()) {
    std::string ids;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (pending[i] != 0) ids += (ids.empty() ? "" : ", ") + std::to_string(raw[i].id);
    }
    throw ParseError("cycle detected among nodes " + ids);
  }

  Circuit c(field, x_vars, z_vars);
  std::vector<NodeId> dense(raw.size());
  for (std::size_t i : order) {
    const json& n = *raw[i].body;
    const long long id = raw[i].id;
    const std::string where = "node " + std::to_string(id) + ": ";
    const std::string kind = n["kind"].get<std::string>();
    try {
      if (kind == "input") {
        const long long var = get_id(n, "var", id);
        if (var < 1 || static_cast<std::size_t>(var) > x_vars) {
          throw ParseError("input var " + std::to_string(var) + " outside 1.." + std::to_string(x_vars));
        }
        dense[i] = c.add_input(static_cast<std::size_t>(var));
      } else if (kind == "const") {
        if (!n.contains("poly") || !n["poly"].is_array()) throw ParseError("const needs a \"poly\" array");
        NcPoly value(field, c.const_alphabet());
        for (const json& term : n["poly"]) {
          if (!term.is_array() || term.size() != 2 || !term[1].is_array()) {
            throw ParseError("const term must be [coeff, [z indices]]");
          }
          Word w;
          for (const json& z : term[1]) {
            if (!z.is_number_integer()) throw ParseError("z index must be an integer");
            const long long zi = z.get<long long>();
            if (zi < 1 || static_cast<std::size_t>(zi) > z_vars) {
              throw FieldMismatch("const mentions z" + std::to_string(zi) + " but the circuit has " +
                                  std::to_string(z_vars) + " Z variables");
            }
            w.push_back(z_var(static_cast<std::size_t>(zi)));
          }
          value.add_term(w, coeff_from_json(field, term[0]));
        }
        dense[i] = c.add_constant(value);
      } else if (kind == "sum") {
        std::vector<SumArg> args;
        std::size_t k = 0;
        for (const json& a : n["args"]) {
          FieldElem s = a.contains("scalar") ? coeff_from_json(field, a["scalar"]) : FieldElem::one(field);
          args.push_back({dense[kids[i][k++]], s});
        }
        dense[i] = c.add_sum(std::move(args));
      } else {
        dense[i] = c.add_product(dense[kids[i][0]], dense[kids[i][1]]);
      }
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    } catch (const FieldMismatch& e) {
      throw FieldMismatch(where + e.what());
    }
  }
  c.set_output(dense[index_of.at(out_doc_id)]);

  std::vector<long long> doc_id(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) doc_id[dense[i]] = raw[i].id;
  std::string extra;
  for (NodeId s : c.sinks()) {
    if (s != c.output()) extra += (extra.empty() ? "" : ", ") + std::to_string(doc_id[s]);
  }
  if (!extra.empty()) {
    throw ParseError("multiple sinks: nodes " + extra + " have out-degree 0 but are not the output " +
                     std::to_string(out_doc_id));
  }
  return c;
}

Circuit parse_circuit(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return circuit_from_json(doc);
}

ordered_json circuit_to_json(const Circuit& c) {
  ordered_json doc;
  doc["field"] = field_to_json(c.field());
  doc["x_vars"] = c.x_vars();
  doc["z_vars"] = c.z_vars();
  ordered_json nodes = ordered_json::array();
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const Node& n = c.node(id);
    ordered_json j;
    j["id"] = id;
    j["kind"] = kind_name(n.kind);
    switch (n.kind) {
      case NodeKind::input: j["var"] = var_index(n.var); break;
      case NodeKind::constant: {
        ordered_json poly = ordered_json::array();
        for (const auto& [w, coeff] : n.value.terms()) {
          ordered_json zs = ordered_json::array();
          for (Var v : w) zs.push_back(var_index(v));
          poly.push_back(ordered_json::array({coeff_to_json(coeff), zs}));
        }
        j["poly"] = poly;
        break;
      }
      case NodeKind::sum: {
        ordered_json args = ordered_json::array();
        for (const auto& a : n.args) {
          ordered_json arg;
          arg["node"] = a.node;
          arg["scalar"] = coeff_to_json(a.scalar);
          args.push_back(arg);
        }
        j["args"] = args;
        break;
      }
      case NodeKind::product:
        j["left"] = n.left;
        j["right"] = n.right;
        break;
    }
    nodes.push_back(j);
  }
  doc["nodes"] = nodes;
  doc["output"] = c.output();
  return doc;
}

std::string write_circuit(const Circuit& c) { return circuit_to_json(c).dump(2) + "\n"; }

}  // namespace ncclab
