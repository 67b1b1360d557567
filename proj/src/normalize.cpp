#include "ncclab/normalize.hpp"

#include <algorithm>
#include <string>

#include "ncclab/errors.hpp"

namespace ncclab {

Properties check_properties(const Circuit& c, const EvalOptions& opt) {
  Properties p;
  p.p1 = p.p2 = p.p3 = p.p4 = p.p5 = true;
  if (c.node_count() == 0) {
    p.p4 = false;
    p.violations.push_back("P4: empty circuit");
    return p;
  }
  const std::vector<NcPoly> f = node_polynomials(c, opt);
  const auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    p.violations.push_back(std::move(msg));
  };
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const Node& n = c.node(id);
    const std::string where = "node " + std::to_string(id);
    if (n.kind == NodeKind::product &&
        !(f[n.left].degree() >= std::size_t{1} && f[n.right].degree() >= std::size_t{1})) {
      fail(p.p1, "P1: " + where + " is a scalar-product gate");
    }
    if (f[id].is_zero()) {
      fail(p.p2, "P2: " + where + " computes 0");
    } else if (!f[id].constant_term().is_zero()) {
      fail(p.p2, "P2: " + where + " has a nonzero constant term");
    }
    for (NodeId ch : n.children()) {
      const Node& child = c.node(ch);
      if (child.is_leaf() && n.kind != NodeKind::sum) {
        fail(p.p3, "P3: leaf " + std::to_string(ch) + " feeds non-sum " + where);
      }
      if (child.kind == NodeKind::product && n.kind != NodeKind::sum) {
        fail(p.p5, "P5: product " + std::to_string(ch) + " feeds product " + where);
      }
      if (child.kind == NodeKind::sum && n.kind != NodeKind::product) {
        fail(p.p5, "P5: sum " + std::to_string(ch) + " feeds sum " + where);
      }
    }
  }
  if (c.node(c.output()).kind != NodeKind::sum) {
    fail(p.p4, "P4: output node " + std::to_string(c.output()) + " is a " +
                   kind_name(c.node(c.output()).kind));
  }
  return p;
}

DegreeSplit split_degree_parts(const Circuit& c, const EvalOptions& opt) {
  const std::vector<NcPoly> f = node_polynomials(c, opt);
  const Field& F = c.field();
  const FieldElem one = FieldElem::one(F);

  DegreeSplit s;
  s.circuit = Circuit(F, c.x_vars(), c.z_vars());
  Circuit& out = s.circuit;
  const auto tag = [&](NodeId made, NodeId origin, bool gadget) {
    s.origin.resize(made + 1);
    s.gadget.resize(made + 1);
    s.origin[made] = origin;
    s.gadget[made] = gadget;
    return made;
  };

  s.zero_part.resize(c.node_count());
  s.positive_part.resize(c.node_count());
  for (NodeId v = 0; v < c.node_count(); ++v) {
    const Node& n = c.node(v);
    NodeId& v0 = s.zero_part[v];
    NodeId& vp = s.positive_part[v];
    switch (n.kind) {
      case NodeKind::input:
        vp = tag(out.add_input(var_index(n.var)), v, false);
        v0 = tag(out.add_scalar(FieldElem::zero(F)), v, false);
        break;
      case NodeKind::constant:
        if (c.is_ring()) throw PreconditionError("normalize needs a field circuit; translate ring circuits first");
        v0 = tag(out.add_constant(n.value), v, false);
        vp = tag(out.add_scalar(FieldElem::zero(F)), v, false);
        break;
      case NodeKind::sum: {
        std::vector<SumArg> a0;
        std::vector<SumArg> ap;
        for (const auto& a : n.args) {
          a0.push_back({s.zero_part[a.node], a.scalar});
          ap.push_back({s.positive_part[a.node], a.scalar});
        }
        v0 = tag(out.add_sum(std::move(a0)), v, false);
        vp = tag(out.add_sum(std::move(ap)), v, false);
        break;
      }
      case NodeKind::product: {
        const NodeId l = n.left;
        const NodeId r = n.right;
        v0 = tag(out.add_product(s.zero_part[l], s.zero_part[r]), v, false);
        const bool left_const = positive_part(f[l]).is_zero();
        const bool right_const = positive_part(f[r]).is_zero();
        if (left_const) {
          vp = tag(out.add_product(s.zero_part[l], s.positive_part[r]), v, false);
        } else if (right_const) {
          vp = tag(out.add_product(s.positive_part[l], s.zero_part[r]), v, false);
        } else {
          const NodeId a = tag(out.add_product(s.zero_part[l], s.positive_part[r]), v, true);
          const NodeId b = tag(out.add_product(s.positive_part[l], s.zero_part[r]), v, true);
          const NodeId ab = tag(out.add_product(s.positive_part[l], s.positive_part[r]), v, true);
          vp = tag(out.add_sum({{a, one}, {b, one}, {ab, one}}), v, true);
        }
        break;
      }
    }
  }
  out.set_output(s.positive_part[c.output()]);

  const std::vector<NcPoly> g = node_polynomials(out, opt);
  for (NodeId v = 0; v < c.node_count(); ++v) {
    if (!(g[s.zero_part[v]] + g[s.positive_part[v]] == f[v]) ||
        !(g[s.positive_part[v]] == positive_part(f[v]))) {
      throw InvariantViolation("degree split of node " + std::to_string(v) + " does not recombine");
    }
  }
  return s;
}

namespace {

// Mutable graph for steps 3 and 4. Edges into product gates may carry labels
// transiently (step 3.3 moves them onto the product's out-edges).
struct Edge {
  std::size_t child;
  FieldElem label;
};

struct WNode {
  NodeKind kind = NodeKind::input;
  Var var = 0;
  FieldElem value;
  std::vector<Edge> in;  // sum: any number; product: exactly [left, right]
  bool alive = true;
  std::optional<NodeId> origin;
  std::string step;
};

struct Graph {
  Field field;
  std::size_t x_vars = 0;
  std::vector<WNode> nodes;
  std::size_t output = 0;

  // Children-first order over live nodes reachable from the output.
  std::vector<std::size_t> topo_order() const {
    std::vector<std::size_t> order;
    std::vector<int> state(nodes.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{output, 0}};
    state[output] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < nodes[v].in.size()) {
        const std::size_t ch = nodes[v].in[next++].child;
        if (state[ch] == 0) {
          state[ch] = 1;
          stack.emplace_back(ch, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
    return order;
  }

  // Step 3.2.
  void drop_unreachable() {
    std::vector<bool> seen(nodes.size(), false);
    for (std::size_t v : topo_order()) seen[v] = true;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (!seen[v]) nodes[v].alive = false;
    }
  }

  std::size_t add(WNode n) {
    nodes.push_back(std::move(n));
    return nodes.size() - 1;
  }

  // Every (parent, edge index) pair whose edge points at v.
  std::vector<std::pair<std::size_t, std::size_t>> in_edges_to(std::size_t v) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t p = 0; p < nodes.size(); ++p) {
      if (!nodes[p].alive) continue;
      for (std::size_t e = 0; e < nodes[p].in.size(); ++e) {
        if (nodes[p].in[e].child == v) out.emplace_back(p, e);
      }
    }
    return out;
  }
};

Graph to_graph(const Circuit& c, const std::vector<std::optional<NodeId>>& origin,
               const std::vector<std::string>& step) {
  Graph g{c.field(), c.x_vars(), {}, c.output()};
  const FieldElem one = FieldElem::one(c.field());
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const Node& n = c.node(id);
    WNode w;
    w.kind = n.kind;
    w.var = n.var;
    if (n.kind == NodeKind::constant) w.value = n.value.constant_term();
    for (const auto& a : n.args) w.in.push_back({a.node, a.scalar});
    if (n.kind == NodeKind::product) w.in = {{n.left, one}, {n.right, one}};
    w.origin = origin[id];
    w.step = step[id];
    g.nodes.push_back(std::move(w));
  }
  return g;
}

Circuit to_circuit(const Graph& g, std::vector<ProvenanceEntry>& provenance) {
  Circuit c(g.field, g.x_vars);
  std::vector<NodeId> id(g.nodes.size());
  for (std::size_t v : g.topo_order()) {
    const WNode& n = g.nodes[v];
    switch (n.kind) {
      case NodeKind::input: id[v] = c.add_input(var_index(n.var)); break;
      case NodeKind::constant: id[v] = c.add_scalar(n.value); break;
      case NodeKind::sum: {
        std::vector<SumArg> args;
        for (const auto& e : n.in) args.push_back({id[e.child], e.label});
        id[v] = c.add_sum(std::move(args));
        break;
      }
      case NodeKind::product:
        if (!n.in[0].label.is_one() || !n.in[1].label.is_one()) {
          throw InvariantViolation("label left on a product-gate input after step 3.3");
        }
        id[v] = c.add_product(id[n.in[0].child], id[n.in[1].child]);
        break;
    }
    provenance.push_back({id[v], n.origin, n.step});
  }
  c.set_output(id[g.output]);
  return c;
}

// Step 3.1: nodes with zero positive part become constant leaves.
void replace_constant_nodes(Graph& g, const std::vector<NcPoly>& f) {
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    WNode& n = g.nodes[v];
    if (n.kind == NodeKind::constant || !positive_part(f[v]).is_zero()) continue;
    n.kind = NodeKind::constant;
    n.value = f[v].constant_term();
    n.in.clear();
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const WNode& n = g.nodes[v];
    if (n.kind != NodeKind::constant && !f[v].constant_term().is_zero()) {
      throw InvariantViolation("node with both constant and positive-degree parts survived step 1");
    }
  }
}

// Step 3.3: fold scalar-product gates into labels, then push labels off
// product-gate inputs onto the product's out-edges, bottom-up.
void fold_scalar_products(Graph& g) {
  const FieldElem one = FieldElem::one(g.field);
  for (std::size_t v : g.topo_order()) {
    WNode& n = g.nodes[v];
    if (n.kind != NodeKind::product) continue;
    const bool lconst = g.nodes[n.in[0].child].kind == NodeKind::constant;
    const bool rconst = g.nodes[n.in[1].child].kind == NodeKind::constant;
    if (!lconst && !rconst) continue;
    if (lconst && rconst) throw InvariantViolation("product of two constants survived step 3.1");
    const Edge& keep = lconst ? n.in[1] : n.in[0];
    const Edge& leaf = lconst ? n.in[0] : n.in[1];
    const FieldElem factor = g.nodes[leaf.child].value * leaf.label * keep.label;
    const std::size_t u = keep.child;
    for (auto [p, e] : g.in_edges_to(v)) {
      g.nodes[p].in[e].child = u;
      g.nodes[p].in[e].label *= factor;
    }
    n.alive = false;
    n.in.clear();
  }
  for (std::size_t v : g.topo_order()) {
    WNode& n = g.nodes[v];
    if (n.kind != NodeKind::product) continue;
    const FieldElem m = n.in[0].label * n.in[1].label;
    n.in[0].label = one;
    n.in[1].label = one;
    if (m.is_one()) continue;
    for (auto [p, e] : g.in_edges_to(v)) g.nodes[p].in[e].label *= m;
  }
}

// Step 3.4.
void drop_constant_leaves(Graph& g) {
  for (WNode& n : g.nodes) {
    if (!n.alive) continue;
    if (n.kind == NodeKind::constant) {
      n.alive = false;
      continue;
    }
    const auto is_const = [&](const Edge& e) { return g.nodes[e.child].kind == NodeKind::constant; };
    if (n.kind == NodeKind::product && std::any_of(n.in.begin(), n.in.end(), is_const)) {
      throw InvariantViolation("constant leaf still feeds a product gate after step 3.3");
    }
    std::erase_if(n.in, is_const);
    if (n.kind == NodeKind::sum && n.in.empty()) {
      throw InvariantViolation("sum gate left without children after step 3.4");
    }
  }
}

// Step 4.
void alternate(Graph& g) {
  const FieldElem one = FieldElem::one(g.field);
  const std::vector<std::size_t> order = g.topo_order();
  for (std::size_t v : order) {
    if (g.nodes[v].kind != NodeKind::product) continue;
    for (std::size_t e = 0; e < 2; ++e) {
      const std::size_t ch = g.nodes[v].in[e].child;
      const NodeKind k = g.nodes[ch].kind;
      if (k == NodeKind::input || k == NodeKind::product) {
        WNode s;
        s.kind = NodeKind::sum;
        s.in = {{ch, one}};
        s.origin = g.nodes[v].origin;
        s.step = "4";
        const std::size_t id = g.add(std::move(s));
        g.nodes[v].in[e].child = id;
      }
    }
  }
  for (std::size_t v : g.topo_order()) {
    WNode& n = g.nodes[v];
    if (n.kind != NodeKind::sum) continue;
    std::vector<Edge> merged;
    for (const Edge& e : n.in) {
      const WNode& child = g.nodes[e.child];
      if (child.kind != NodeKind::sum) {
        merged.push_back(e);
        continue;
      }
      for (const Edge& inner : child.in) merged.push_back({inner.child, inner.label * e.label});
    }
    n.in = std::move(merged);
  }
}

}  // namespace

Normalized normalize(const Circuit& c, const EvalOptions& opt) {
  if (c.is_ring()) throw PreconditionError("normalize needs a field circuit; translate ring circuits first");
  const NcPoly f = compute_polynomial(c, opt);
  const NcPoly target = positive_part(f);
  if (target.is_zero()) {
    throw PreconditionError("normalize requires f^{>0} != 0, but the circuit computes the constant " +
                            f.constant_term().to_string());
  }
  const GateReport before = classify_gates(c);

  // Step 1.
  DegreeSplit split = split_degree_parts(c, opt);
  Circuit work = std::move(split.circuit);
  std::vector<std::optional<NodeId>> origin(split.origin.begin(), split.origin.end());
  std::vector<std::string> step;
  for (bool gadget : split.gadget) step.emplace_back(gadget ? "1-gadget" : "1");

  // Step 2.
  if (work.node(work.output()).kind != NodeKind::sum) {
    const NodeId inner = work.output();
    work.set_output(work.add_sum({{inner, FieldElem::one(c.field())}}));
    origin.push_back(c.output());
    step.emplace_back("2");
  }

  Graph g = to_graph(work, origin, step);
  replace_constant_nodes(g, node_polynomials(work, opt));  // 3.1
  g.drop_unreachable();                                     // 3.2
  fold_scalar_products(g);                                  // 3.3
  drop_constant_leaves(g);                                  // 3.4
  alternate(g);                                             // 4
  g.drop_unreachable();                                     // 3.2 again

  Normalized out;
  out.circuit = to_circuit(g, out.report.provenance);
  const GateReport after = classify_gates(out.circuit);
  out.report.before = before.counts;
  out.report.after = after.counts;
  out.report.properties = check_properties(out.circuit, opt);

  if (!(compute_polynomial(out.circuit, opt) == target)) {
    throw InvariantViolation("normalized circuit does not compute f^{>0}");
  }
  if (!out.report.properties.all()) {
    throw InvariantViolation("normalized circuit violates " + out.report.properties.violations.front());
  }
  if (after.counts.nonscalar > before.counts.nonscalar) {
    throw InvariantViolation("normalization increased the number of non-scalar product gates");
  }
  return out;
}

nlohmann::ordered_json to_json(const GateCounts& k) {
  nlohmann::ordered_json j;
  j["inputs"] = k.inputs;
  j["constants"] = k.constants;
  j["sums"] = k.sums;
  j["products"] = k.products;
  j["nonscalar_products"] = k.nonscalar;
  j["scalar_products"] = k.scalar;
  j["gates"] = k.gates();
  j["size"] = k.size;
  j["depth"] = k.depth;
  return j;
}

nlohmann::ordered_json to_json(const Properties& p) {
  nlohmann::ordered_json j;
  j["P1"] = p.p1;
  j["P2"] = p.p2;
  j["P3"] = p.p3;
  j["P4"] = p.p4;
  j["P5"] = p.p5;
  j["violations"] = p.violations;
  return j;
}

nlohmann::ordered_json to_json(const NormalizationReport& r) {
  nlohmann::ordered_json j;
  j["before"] = to_json(r.before);
  j["after"] = to_json(r.after);
  j["properties"] = to_json(r.properties);
  nlohmann::ordered_json prov = nlohmann::ordered_json::array();
  for (const auto& e : r.provenance) {
    nlohmann::ordered_json p;
    p["node"] = e.node;
    if (e.origin) {
      p["origin"] = *e.origin;
    } else {
      p["origin"] = nullptr;
    }
    p["step"] = e.step;
    prov.push_back(p);
  }
  j["provenance"] = prov;
  return j;
}

}  // namespace ncclab
