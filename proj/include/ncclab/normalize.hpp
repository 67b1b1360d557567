#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncclab/circuit.hpp"

namespace ncclab {

/// The five structural properties a normalized circuit satisfies.
struct Properties {
  bool p1 = false;  // no scalar-product gates; scalars live only on sum-edge labels
  bool p2 = false;  // every node computes a nonzero polynomial without constant term
  bool p3 = false;  // every edge out of a leaf goes to a sum gate
  bool p4 = false;  // the output is a sum gate
  bool p5 = false;  // sum and product gates alternate
  std::vector<std::string> violations;

  bool all() const { return p1 && p2 && p3 && p4 && p5; }
};

Properties check_properties(const Circuit& c, const EvalOptions& opt = {});

/// Result of splitting every node v into v^0 (constant part) and v^{>0}.
struct DegreeSplit {
  Circuit circuit;                  // output is the positive part of the old output
  std::vector<NodeId> zero_part;    // indexed by original node id
  std::vector<NodeId> positive_part;
  std::vector<NodeId> origin;       // original node id, indexed by new node id
  std::vector<bool> gadget;         // node was created inside a non-scalar product gadget
};

/// Step 1 alone. Verifies f_{v^0} + f_{v^{>0}} = f_v for every original node.
DegreeSplit split_degree_parts(const Circuit& c, const EvalOptions& opt = {});

struct ProvenanceEntry {
  NodeId node;                      // id in the normalized circuit
  std::optional<NodeId> origin;     // id in the input circuit
  std::string step;                 // "1", "1-gadget", "2" or "4"
};

struct NormalizationReport {
  GateCounts before;
  GateCounts after;
  Properties properties;
  std::vector<ProvenanceEntry> provenance;
};

struct Normalized {
  Circuit circuit;
  NormalizationReport report;
};

/// Full pipeline: steps 1, 2, 3.1, 3.2, 3.3, 3.4, 4, 3.2. The result computes
/// the positive part of the input polynomial and satisfies P1..P5. Throws
/// PreconditionError when that positive part is zero.
Normalized normalize(const Circuit& c, const EvalOptions& opt = {});

nlohmann::ordered_json to_json(const GateCounts& k);
nlohmann::ordered_json to_json(const Properties& p);
nlohmann::ordered_json to_json(const NormalizationReport& r);

}  // namespace ncclab
