#include "ncclab/hardpoly.hpp"

#include <algorithm>
#include <string>

#include "ncclab/errors.hpp"

namespace ncclab {

void HardPolySpec::validate() const {
  if (n < 2) throw PreconditionError("hardpoly: n must be at least 2 (got " + std::to_string(n) + ")");
  if (d < 2 || d % 2 != 0) {
    throw PreconditionError("hardpoly: d must be even and at least 2 (got " + std::to_string(d) + ")");
  }
}

NcPoly palindrome_poly(const HardPolySpec& spec, Field field, std::size_t guard) {
  spec.validate();
  const std::size_t half = spec.d / 2;
  require_within_guard(spec.n, half, half, guard);

  NcPoly f(field, Alphabet{spec.n, 0});
  const FieldElem one = FieldElem::one(field);
  Word w(half, x_var(1));
  while (true) {
    Word full = w;
    full.insert(full.end(), w.rbegin(), w.rend());
    f.add_term(full, one);
    // odometer over x1..xn
    std::size_t i = half;
    while (i > 0 && w[i - 1] == x_var(spec.n)) w[--i] = x_var(1);
    if (i == 0) break;
    ++w[i - 1];
  }
  return f;
}

namespace {

NodeId product_tree(Circuit& c, const std::vector<NodeId>& leaves, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return leaves[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  const NodeId l = product_tree(c, leaves, lo, mid);
  const NodeId r = product_tree(c, leaves, mid, hi);
  return c.add_product(l, r);
}

}  // namespace

Circuit naive_circuit(const NcPoly& f) {
  if (f.alphabet().z != 0) throw PreconditionError("naive_circuit: polynomial mentions Z letters");
  if (f.is_zero()) throw PreconditionError("naive_circuit: zero polynomial");
  Circuit c(f.field(), f.alphabet().x);

  std::vector<NodeId> input(f.alphabet().x + 1, 0);
  std::vector<bool> have(f.alphabet().x + 1, false);
  for (const auto& [w, coeff] : f.terms()) {
    for (Var v : w) have[var_index(v)] = true;
  }
  for (std::size_t i = 1; i <= f.alphabet().x; ++i) {
    if (have[i]) input[i] = c.add_input(i);
  }

  std::vector<SumArg> top;
  for (const auto& [w, coeff] : f.terms()) {
    if (w.empty()) {
      top.push_back({c.add_scalar(FieldElem::one(f.field())), coeff});
      continue;
    }
    std::vector<NodeId> leaves;
    leaves.reserve(w.size());
    for (Var v : w) leaves.push_back(input[var_index(v)]);
    top.push_back({product_tree(c, leaves, 0, leaves.size()), coeff});
  }
  c.add_sum(std::move(top));
  return c;
}

}  // namespace ncclab
