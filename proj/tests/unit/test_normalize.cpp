#include <gtest/gtest.h>

#include "helpers.hpp"
#include "ncclab/corpus.hpp"
#include "ncclab/errors.hpp"
#include "ncclab/normalize.hpp"
#include "oracle/oracle.hpp"

using namespace ncclab;
using testing_support::poly;

namespace {

const Field Q = Field::rationals();
const Alphabet X2{2, 0};

}  // namespace

TEST(SplitDegree, LeafAndProduct) {
  Circuit c(Q, 2);
  const NodeId one = c.add_scalar(FieldElem::one(Q));
  const NodeId x1 = c.add_input(1);
  const NodeId x2 = c.add_input(2);
  const NodeId a = c.add_sum({{one, FieldElem::one(Q)}, {x1, FieldElem::one(Q)}});
  const NodeId b = c.add_sum({{one, FieldElem::one(Q)}, {x2, FieldElem::one(Q)}});
  const NodeId p = c.add_product(a, b);
  const DegreeSplit s = split_degree_parts(c);
  const auto f = node_polynomials(s.circuit);
  EXPECT_TRUE(f[s.zero_part[x1]].is_zero());
  EXPECT_EQ(f[s.positive_part[x1]], poly("1 * x1", X2));
  EXPECT_EQ(f[s.zero_part[p]], poly("1", X2));
  EXPECT_EQ(f[s.positive_part[p]], poly("1 * x1 + 1 * x2 + 1 * x1.x2", X2));
  EXPECT_EQ(compute_polynomial(s.circuit), poly("1 * x1 + 1 * x2 + 1 * x1.x2", X2));
}

TEST(SplitDegree, SumOfConstants) {
  Circuit c(Q, 1);
  const NodeId two = c.add_scalar(FieldElem::from_int(Q, 2));
  const NodeId three = c.add_scalar(FieldElem::from_int(Q, 3));
  const NodeId s = c.add_sum({{two, FieldElem::one(Q)}, {three, FieldElem::one(Q)}});
  const DegreeSplit d = split_degree_parts(c);
  const auto f = node_polynomials(d.circuit);
  EXPECT_EQ(f[d.zero_part[s]], poly("5", Alphabet{1, 0}));
  EXPECT_TRUE(f[d.positive_part[s]].is_zero());
}

TEST(Normalize, DropsConstantTerm) {
  Circuit c(Q, 2);
  const NodeId x1 = c.add_input(1);
  const NodeId x2 = c.add_input(2);
  const NodeId three = c.add_scalar(FieldElem::from_int(Q, 3));
  const NodeId p = c.add_product(x1, x2);
  c.add_sum({{three, FieldElem::one(Q)}, {p, FieldElem::one(Q)}});
  const Normalized n = normalize(c);
  EXPECT_EQ(compute_polynomial(n.circuit), poly("1 * x1.x2", X2));
  EXPECT_TRUE(n.report.properties.all());
  EXPECT_TRUE(check_properties(n.circuit).all());
}

TEST(Normalize, FoldsScalarProduct) {
  Circuit c(Q, 1);
  const NodeId five = c.add_scalar(FieldElem::from_int(Q, 5));
  const NodeId x1 = c.add_input(1);
  c.add_product(five, x1);
  const Normalized n = normalize(c);
  EXPECT_EQ(compute_polynomial(n.circuit), poly("5 * x1", Alphabet{1, 0}));
  const GateCounts k = structural_counts(n.circuit);
  EXPECT_EQ(k.products, 0u);
  EXPECT_EQ(k.sums, 1u);
  const Node& out = n.circuit.node(n.circuit.output());
  ASSERT_EQ(out.kind, NodeKind::sum);
  ASSERT_EQ(out.args.size(), 1u);
  EXPECT_EQ(out.args[0].scalar, FieldElem::from_int(Q, 5));
  EXPECT_EQ(n.circuit.node(out.args[0].node).kind, NodeKind::input);
}

TEST(Normalize, RejectsConstantPolynomial) {
  Circuit c(Q, 1);
  c.add_input(1);
  const NodeId seven = c.add_scalar(FieldElem::from_int(Q, 7));
  c.set_output(seven);
  Circuit pruned = prune_unreachable(c);
  EXPECT_THROW(normalize(pruned), PreconditionError);
}

TEST(Properties, DetectViolations) {
  Circuit c(Q, 1);
  const NodeId x = c.add_input(1);
  const NodeId k = c.add_scalar(FieldElem::from_int(Q, 2));
  c.add_product(k, x);
  const Properties p = check_properties(c);
  EXPECT_FALSE(p.p1);
  EXPECT_FALSE(p.p4);
  EXPECT_FALSE(p.violations.empty());

  Circuit d(Q, 2);
  const NodeId x1 = d.add_input(1);
  const NodeId x2 = d.add_input(2);
  const NodeId s1 = d.add_sum({{x1, FieldElem::one(Q)}});
  const NodeId s2 = d.add_sum({{x2, FieldElem::one(Q)}});
  d.add_product(s1, s2);
  const Properties q = check_properties(d);
  EXPECT_TRUE(q.p1 && q.p2 && q.p3 && q.p5);
  EXPECT_FALSE(q.p4);
}

TEST(Normalize, CorpusSoundness) {
  for (std::size_t i = 0; i < 60; ++i) {
    const Circuit c = random_circuit(entry_seed(7, i), CorpusLimits{}, corpus_field(i));
    const NcPoly f = compute_polynomial(c);
    const Normalized n = normalize(c);
    EXPECT_EQ(compute_polynomial(n.circuit), positive_part(f)) << i;
    // independent evaluator on the result
    EXPECT_EQ(oracle::reduce_poly(oracle::evaluate(n.circuit), c.field().modulus()),
              oracle::as_qpoly(positive_part(f))) << i;
    EXPECT_TRUE(check_properties(n.circuit).all()) << i;
    EXPECT_LE(n.report.after.nonscalar, n.report.before.nonscalar) << i;
    EXPECT_EQ(classify_gates(n.circuit).counts.scalar, 0u) << i;
    for (const NcPoly& g : node_polynomials(n.circuit)) {
      EXPECT_FALSE(g.is_zero());
      EXPECT_TRUE(g.constant_term().is_zero());
    }
  }
}

TEST(Normalize, IdempotentOnProperties) {
  for (std::size_t i = 0; i < 20; ++i) {
    const Circuit c = random_circuit(entry_seed(8, i), CorpusLimits{}, corpus_field(i));
    const Normalized once = normalize(c);
    const Normalized twice = normalize(once.circuit);
    EXPECT_TRUE(check_properties(twice.circuit).all());
    EXPECT_EQ(compute_polynomial(twice.circuit), compute_polynomial(once.circuit));
    EXPECT_LE(twice.report.after.nonscalar, once.report.after.nonscalar);
  }
}

TEST(Normalize, ProvenanceCoversEveryNode) {
  const Circuit c = random_circuit(entry_seed(9, 0), CorpusLimits{}, Q);
  const Normalized n = normalize(c);
  EXPECT_EQ(n.report.provenance.size(), n.circuit.node_count());
  for (const auto& p : n.report.provenance) {
    EXPECT_LT(p.node, n.circuit.node_count());
    if (p.origin) EXPECT_LT(*p.origin, c.node_count());
  }
}
