#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ncclab/field.hpp"
#include "ncclab/poly.hpp"

namespace ncclab {

using NodeId = std::uint32_t;

enum class NodeKind { input, constant, sum, product };

const char* kind_name(NodeKind k);

struct SumArg {
  NodeId node;
  FieldElem scalar;
};

struct Node {
  NodeKind kind = NodeKind::input;
  Var var = 0;                 // input
  NcPoly value;                // constant, over F<Z> (just a scalar when there is no Z)
  std::vector<SumArg> args;    // sum
  NodeId left = 0;             // product
  NodeId right = 0;            // product

  bool is_leaf() const { return kind == NodeKind::input || kind == NodeKind::constant; }
  /// Children in edge order; a child appears once per edge.
  std::vector<NodeId> children() const;
};

/// Circuit DAG over a field, optionally with ring constants from F<Z>.
///
/// Ids are dense and every child id is smaller than its parent's, so
/// ascending id order is a bottom-up topological order. Extra sinks are
/// tolerated in memory (passes create them transiently); parse and
/// require_single_sink() reject them.
class Circuit {
 public:
  Circuit() = default;
  Circuit(Field field, std::size_t x_vars, std::size_t z_vars = 0)
      : field_(field), x_vars_(x_vars), z_vars_(z_vars) {}

  NodeId add_input(std::size_t index);
  NodeId add_scalar(const FieldElem& c);
  NodeId add_constant(const NcPoly& value);
  NodeId add_sum(std::vector<SumArg> args);
  NodeId add_product(NodeId left, NodeId right);
  void set_output(NodeId id);

  const Field& field() const { return field_; }
  std::size_t x_vars() const { return x_vars_; }
  std::size_t z_vars() const { return z_vars_; }
  bool is_ring() const { return z_vars_ > 0; }
  Alphabet poly_alphabet() const { return {x_vars_, z_vars_}; }
  Alphabet const_alphabet() const { return {0, z_vars_}; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  NodeId output() const { return output_; }

  std::vector<std::vector<NodeId>> parents() const;
  std::vector<NodeId> sinks() const;
  /// Throws PreconditionError naming the extra sinks.
  void require_single_sink() const;

 private:
  NodeId push(Node n);
  void require_node(NodeId id) const;

  Field field_;
  std::size_t x_vars_ = 0;
  std::size_t z_vars_ = 0;
  std::vector<Node> nodes_;
  NodeId output_ = 0;
};

struct EvalOptions {
  std::size_t max_word_length = kDefaultMaxWordLength;
};

/// f_v for every node, over F<Z,X> (F<X> for field circuits).
std::vector<NcPoly> node_polynomials(const Circuit& c, const EvalOptions& opt = {});
NcPoly compute_polynomial(const Circuit& c, const EvalOptions& opt = {});

/// Evaluation of the circuit as a function R^n -> R with R = F<Z>. The inputs
/// must share one Z alphabet with at least c.z_vars() letters and no X letters.
NcPoly evaluate_function(const Circuit& c, const std::vector<NcPoly>& inputs,
                         const EvalOptions& opt = {});

enum class GateClass { nonscalar, scalar };

struct GateCounts {
  std::size_t inputs = 0;
  std::size_t constants = 0;
  std::size_t sums = 0;
  std::size_t products = 0;
  std::size_t nonscalar = 0;
  std::size_t scalar = 0;
  std::size_t size = 0;   // wires
  std::size_t depth = 0;  // edges on the longest leaf-to-output path
  std::size_t gates() const { return sums + products; }
};

struct GateReport {
  std::vector<std::optional<GateClass>> product_class;  // indexed by node id
  GateCounts counts;
};

/// Non-scalar iff both children compute polynomials of degree >= 1.
GateReport classify_gates(const Circuit& c, const std::vector<NcPoly>& node_polys);
GateReport classify_gates(const Circuit& c);
/// Structural counts only (no product classification).
GateCounts structural_counts(const Circuit& c);

/// Copy restricted to nodes with a path to the output, ids renumbered in
/// ascending old-id order. old_to_new (if given) receives the id map.
Circuit prune_unreachable(const Circuit& c,
                          std::vector<std::optional<NodeId>>* old_to_new = nullptr);

/// Descendants of `id` (excluding itself), as a bitmap over node ids.
std::vector<bool> descendants(const Circuit& c, NodeId id);

}  // namespace ncclab
