#include "ncclab/circuit.hpp"

#include <algorithm>
#include <string>

#include "ncclab/errors.hpp"

namespace ncclab {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::input: return "input";
    case NodeKind::constant: return "const";
    case NodeKind::sum: return "sum";
    case NodeKind::product: return "prod";
  }
  return "?";
}

std::vector<NodeId> Node::children() const {
  switch (kind) {
    case NodeKind::sum: {
      std::vector<NodeId> out;
      out.reserve(args.size());
      for (const auto& a : args) out.push_back(a.node);
      return out;
    }
    case NodeKind::product: return {left, right};
    default: return {};
  }
}

NodeId Circuit::push(Node n) {
  nodes_.push_back(std::move(n));
  output_ = static_cast<NodeId>(nodes_.size() - 1);
  return output_;
}

void Circuit::require_node(NodeId id) const {
  if (id >= nodes_.size()) throw Error("reference to missing node " + std::to_string(id));
}

NodeId Circuit::add_input(std::size_t index) {
  if (index == 0 || index > x_vars_) {
    throw Error("input variable x" + std::to_string(index) + " outside x1..x" +
                std::to_string(x_vars_));
  }
  Node n;
  n.kind = NodeKind::input;
  n.var = x_var(index);
  return push(std::move(n));
}

NodeId Circuit::add_scalar(const FieldElem& c) {
  return add_constant(NcPoly::constant(field_, const_alphabet(), c));
}

NodeId Circuit::add_constant(const NcPoly& value) {
  if (!(value.field() == field_)) {
    throw FieldMismatch("constant over " + value.field().name() + " in circuit over " +
                        field_.name());
  }
  Node n;
  n.kind = NodeKind::constant;
  n.value = value.with_alphabet(const_alphabet());
  return push(std::move(n));
}

NodeId Circuit::add_sum(std::vector<SumArg> args) {
  if (args.empty()) throw Error("sum gate needs in-degree >= 1");
  for (const auto& a : args) {
    require_node(a.node);
    if (!(a.scalar.field() == field_)) throw FieldMismatch("sum label over another field");
  }
  Node n;
  n.kind = NodeKind::sum;
  n.args = std::move(args);
  return push(std::move(n));
}

NodeId Circuit::add_product(NodeId left, NodeId right) {
  require_node(left);
  require_node(right);
  Node n;
  n.kind = NodeKind::product;
  n.left = left;
  n.right = right;
  return push(std::move(n));
}

void Circuit::set_output(NodeId id) {
  require_node(id);
  output_ = id;
}

std::vector<std::vector<NodeId>> Circuit::parents() const {
  std::vector<std::vector<NodeId>> out(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    for (NodeId ch : nodes_[id].children()) {
      auto& ps = out[ch];
      if (ps.empty() || ps.back() != id) ps.push_back(id);
    }
  }
  return out;
}

std::vector<NodeId> Circuit::sinks() const {
  std::vector<bool> has_parent(nodes_.size(), false);
  for (const auto& n : nodes_) {
    for (NodeId ch : n.children()) has_parent[ch] = true;
  }
  std::vector<NodeId> out;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (!has_parent[id]) out.push_back(id);
  }
  return out;
}

void Circuit::require_single_sink() const {
  if (nodes_.empty()) throw PreconditionError("empty circuit");
  std::string extra;
  for (NodeId s : sinks()) {
    if (s != output_) extra += (extra.empty() ? "" : ", ") + std::to_string(s);
  }
  if (!extra.empty()) {
    throw PreconditionError("multiple sinks: nodes " + extra + " have out-degree 0 besides output " +
                            std::to_string(output_));
  }
}

std::vector<NcPoly> node_polynomials(const Circuit& c, const EvalOptions& opt) {
  const Alphabet alpha = c.poly_alphabet();
  std::vector<NcPoly> f;
  f.reserve(c.node_count());
  for (const Node& n : c.nodes()) {
    switch (n.kind) {
      case NodeKind::input: f.push_back(NcPoly::variable(c.field(), alpha, n.var)); break;
      case NodeKind::constant: f.push_back(n.value.with_alphabet(alpha)); break;
      case NodeKind::sum: {
        NcPoly acc(c.field(), alpha);
        for (const auto& a : n.args) {
          for (const auto& [w, coeff] : f[a.node].terms()) acc.add_term(w, coeff * a.scalar);
        }
        f.push_back(std::move(acc));
        break;
      }
      case NodeKind::product:
        f.push_back(poly_mul(f[n.left], f[n.right], opt.max_word_length));
        break;
    }
  }
  return f;
}

NcPoly compute_polynomial(const Circuit& c, const EvalOptions& opt) {
  if (c.node_count() == 0) throw PreconditionError("empty circuit");
  return node_polynomials(c, opt)[c.output()];
}

NcPoly evaluate_function(const Circuit& c, const std::vector<NcPoly>& inputs,
                         const EvalOptions& opt) {
  if (inputs.size() != c.x_vars()) {
    throw PreconditionError("missing input assignment: circuit has " + std::to_string(c.x_vars()) +
                            " inputs, got " + std::to_string(inputs.size()));
  }
  Alphabet ring{0, c.z_vars()};
  if (!inputs.empty()) {
    ring = inputs.front().alphabet();
    for (const auto& h : inputs) {
      if (!(h.alphabet() == ring) || ring.x != 0) {
        throw PreconditionError("inputs must share one alphabet over Z only");
      }
      if (!(h.field() == c.field())) throw FieldMismatch("input over another field");
    }
    if (ring.z < c.z_vars()) throw PreconditionError("input alphabet smaller than circuit's Z");
  }
  std::vector<NcPoly> f;
  f.reserve(c.node_count());
  for (const Node& n : c.nodes()) {
    switch (n.kind) {
      case NodeKind::input: f.push_back(inputs[var_index(n.var) - 1]); break;
      case NodeKind::constant: f.push_back(n.value.with_alphabet(ring)); break;
      case NodeKind::sum: {
        NcPoly acc(c.field(), ring);
        for (const auto& a : n.args) {
          for (const auto& [w, coeff] : f[a.node].terms()) acc.add_term(w, coeff * a.scalar);
        }
        f.push_back(std::move(acc));
        break;
      }
      case NodeKind::product:
        f.push_back(poly_mul(f[n.left], f[n.right], opt.max_word_length));
        break;
    }
  }
  return f.at(c.output());
}

GateCounts structural_counts(const Circuit& c) {
  GateCounts k;
  std::vector<std::size_t> height(c.node_count(), 0);
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const Node& n = c.node(id);
    switch (n.kind) {
      case NodeKind::input: ++k.inputs; break;
      case NodeKind::constant: ++k.constants; break;
      case NodeKind::sum: ++k.sums; break;
      case NodeKind::product: ++k.products; break;
    }
    for (NodeId ch : n.children()) {
      ++k.size;
      height[id] = std::max(height[id], height[ch] + 1);
    }
  }
  if (c.node_count() != 0) k.depth = height[c.output()];
  return k;
}

GateReport classify_gates(const Circuit& c, const std::vector<NcPoly>& f) {
  GateReport r;
  r.counts = structural_counts(c);
  r.product_class.assign(c.node_count(), std::nullopt);
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const Node& n = c.node(id);
    if (n.kind != NodeKind::product) continue;
    const bool nonscalar = f[n.left].degree() >= std::size_t{1} && f[n.right].degree() >= std::size_t{1};
    r.product_class[id] = nonscalar ? GateClass::nonscalar : GateClass::scalar;
    ++(nonscalar ? r.counts.nonscalar : r.counts.scalar);
  }
  return r;
}

GateReport classify_gates(const Circuit& c) { return classify_gates(c, node_polynomials(c)); }

Circuit prune_unreachable(const Circuit& c, std::vector<std::optional<NodeId>>* old_to_new) {
  std::vector<bool> keep(c.node_count(), false);
  if (c.node_count() != 0) {
    keep[c.output()] = true;
    for (NodeId id = c.output() + 1; id-- > 0;) {
      if (!keep[id]) continue;
      for (NodeId ch : c.node(id).children()) keep[ch] = true;
    }
  }
  std::vector<std::optional<NodeId>> map(c.node_count());
  Circuit out(c.field(), c.x_vars(), c.z_vars());
  for (NodeId id = 0; id < c.node_count(); ++id) {
    if (!keep[id]) continue;
    const Node& n = c.node(id);
    switch (n.kind) {
      case NodeKind::input: map[id] = out.add_input(var_index(n.var)); break;
      case NodeKind::constant: map[id] = out.add_constant(n.value); break;
      case NodeKind::sum: {
        std::vector<SumArg> args;
        for (const auto& a : n.args) args.push_back({*map[a.node], a.scalar});
        map[id] = out.add_sum(std::move(args));
        break;
      }
      case NodeKind::product: map[id] = out.add_product(*map[n.left], *map[n.right]); break;
    }
  }
  if (c.node_count() != 0) out.set_output(*map[c.output()]);
  if (old_to_new != nullptr) *old_to_new = std::move(map);
  return out;
}

std::vector<bool> descendants(const Circuit& c, NodeId id) {
  std::vector<bool> below(c.node_count(), false);
  std::vector<NodeId> stack = c.node(id).children();
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (below[v]) continue;
    below[v] = true;
    for (NodeId ch : c.node(v).children()) stack.push_back(ch);
  }
  return below;
}

}  // namespace ncclab
