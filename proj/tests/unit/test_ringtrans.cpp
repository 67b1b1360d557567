#include <gtest/gtest.h>

#include "helpers.hpp"
#include "ncclab/corpus.hpp"
#include "ncclab/errors.hpp"
#include "ncclab/hardpoly.hpp"
#include "ncclab/normalize.hpp"
#include "ncclab/pathtrace.hpp"
#include "ncclab/ringtrans.hpp"

using namespace ncclab;
using testing_support::poly;

namespace {

const Field Q = Field::rationals();
const Alphabet XZ{2, 2};
const Alphabet X2{2, 0};

// Ring circuit for x1.x2 + z1.x1 (the constant carries 3 + z1).
Circuit small_ring() {
  Circuit c(Q, 2, 2);
  const NodeId x1 = c.add_input(1);
  const NodeId x2 = c.add_input(2);
  const NodeId k = c.add_constant(poly("3 + 1 * z1", Alphabet{0, 2}));
  const NodeId a = c.add_product(x1, x2);
  const NodeId b = c.add_product(k, x1);
  c.add_sum({{a, FieldElem::one(Q)}, {b, FieldElem::one(Q)}});
  return c;
}

}  // namespace

TEST(RingPoly, Examples) {
  Circuit c(Q, 1, 1);
  const NodeId z = c.add_constant(poly("1 * z1", Alphabet{0, 1}));
  EXPECT_EQ(ring_circuit_polynomial(c), poly("1 * z1", Alphabet{1, 1}));
  const NodeId x = c.add_input(1);
  c.add_product(z, x);
  EXPECT_EQ(ring_circuit_polynomial(c), poly("1 * z1.x1", Alphabet{1, 1}));
  EXPECT_NE(ring_circuit_polynomial(c), poly("1 * x1.z1", Alphabet{1, 1}));
  EXPECT_EQ(ring_circuit_polynomial(small_ring()), poly("1 * x1.x2 + 3 * x1 + 1 * z1.x1", XZ));
}

TEST(Restrict, Partition) {
  const NcPoly g = poly("1 * x1.x2 + 1 * z1.x1 + -2 * x2.z2", XZ);
  EXPECT_EQ(restrict_g0(g), poly("1 * x1.x2", X2));
  EXPECT_TRUE(restrict_g0(poly("1 * z1 + 1 * x1.z1", XZ)).is_zero());
  EXPECT_EQ(restrict_g0(g).with_alphabet(XZ) + restrict_gprime(g), g);
}

TEST(Translate, ReplacesConstantsAndKeepsCounts) {
  const Circuit rc = small_ring();
  const Circuit t = translate(rc);
  EXPECT_FALSE(t.is_ring());
  EXPECT_EQ(compute_polynomial(t), poly("1 * x1.x2 + 3 * x1", X2));
  EXPECT_EQ(t.node(2).value.constant_term(), FieldElem::from_int(Q, 3));
  const GateCounts a = structural_counts(rc);
  const GateCounts b = structural_counts(t);
  EXPECT_EQ(a.sums, b.sums);
  EXPECT_EQ(a.products, b.products);
  EXPECT_EQ(a.size, b.size);
  EXPECT_EQ(a.depth, b.depth);
}

TEST(Translate, FieldCircuitIsUnchanged) {
  for (std::size_t i = 0; i < 10; ++i) {
    const Circuit c = random_circuit(entry_seed(4, i), CorpusLimits{}, corpus_field(i));
    EXPECT_EQ(compute_polynomial(translate(c)), compute_polynomial(c));
  }
}

TEST(Lemma, CancellingNoise) {
  const NcPoly g = poly("1 * x1.x2 + 1 * z1.x1 + -1 * z1.x1", XZ);
  const SubstitutionCheck s = verify_lemma_substitution(g, poly("1 * x1.x2", X2), 3);
  EXPECT_TRUE(s.passed());
  EXPECT_TRUE(s.g0_equals_f);
}

TEST(Lemma, NegativeControl) {
  const Alphabet xz{1, 1};
  const SubstitutionCheck s = verify_lemma_substitution(poly("1 * x1 + 1 * z1", xz), poly("1 * x1", Alphabet{1, 0}), 2);
  EXPECT_FALSE(s.functional);
  EXPECT_FALSE(s.gprime_vanishes);
  EXPECT_EQ(s.gprime_subst, poly("1 * z1", Alphabet{0, 1}));
  EXPECT_FALSE(s.passed());
}

TEST(Lemma, NoZTermsPass) {
  const NcPoly f = poly("2 * x1.x2 + -1 * x2", X2);
  for (std::size_t D = 3; D < 6; ++D) EXPECT_TRUE(verify_lemma_substitution(f.with_alphabet(XZ), f, D).passed());
}

TEST(Lemma, DetectsCollisionsThatHideNonFunctionalNoise) {
  // z1.x1 - x1.z1 vanishes at x1 = z1^D but is not zero as a function.
  const NcPoly g = poly("1 * x1.x2 + 1 * z1.x1 + -1 * x1.z1", XZ);
  const SubstitutionCheck s = verify_lemma_substitution(g, poly("1 * x1.x2", X2), 3);
  EXPECT_TRUE(s.functional);
  EXPECT_TRUE(s.g0_equals_f);
  EXPECT_TRUE(s.degrees_ok);
}

TEST(Lemma, ExponentPrecondition) {
  const NcPoly g = poly("1 * x1.x2 + 1 * z1", XZ);
  try {
    verify_lemma_substitution(g, poly("1 * x1.x2", X2), 2);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("must exceed"), std::string::npos);
  }
}

TEST(Agreement, NoiseCancelsOnSamples) {
  // g = x1.x2 + z1 - z1
  Circuit rc(Q, 2, 2);
  const NodeId x1 = rc.add_input(1);
  const NodeId x2 = rc.add_input(2);
  const NodeId p = rc.add_product(x1, x2);
  const NodeId z = rc.add_constant(poly("1 * z1", Alphabet{0, 2}));
  rc.add_sum({{p, FieldElem::one(Q)}, {z, FieldElem::one(Q)}, {z, -FieldElem::one(Q)}});
  const Alphabet z2{0, 2};
  const std::vector<std::vector<NcPoly>> samples{{poly("1 * z1", z2), poly("1 * z2", z2)},
                                                 {poly("1 * z2", z2), poly("1 * z1", z2)},
                                                 {poly("1 * z1.z1", z2), poly("1 * z2", z2)}};
  const AgreementReport r = check_function_agreement(rc, poly("1 * x1.x2", X2), samples);
  EXPECT_TRUE(r.all_samples_agree());
  EXPECT_TRUE(r.passed());
  const AgreementReport only = check_function_agreement(rc, poly("1 * x1.x2", X2), {});
  EXPECT_TRUE(only.passed());
}

TEST(Agreement, OrderMismatchIsReported) {
  Circuit rc(Q, 2);
  rc.add_product(rc.add_input(1), rc.add_input(2));
  const Alphabet z2{0, 2};
  const AgreementReport r =
      check_function_agreement(rc, poly("1 * x2.x1", X2), {{poly("1 * z1", z2), poly("1 * z2", z2)}});
  EXPECT_FALSE(r.samples[0].agree);
  EXPECT_EQ(r.samples[0].circuit_value, "1 * z1.z2");
  EXPECT_FALSE(r.passed());
}

TEST(Noise, InjectedCircuitsComputeTheSameFunction) {
  for (std::size_t i = 0; i < 40; ++i) {
    const Circuit c = random_circuit(entry_seed(5, i), CorpusLimits{3, 4, 16}, corpus_field(i));
    const NcPoly f = compute_polynomial(c);
    const Circuit rc = inject_z_noise(c, 2, i);
    EXPECT_TRUE(rc.is_ring());
    EXPECT_NO_THROW(rc.require_single_sink());
    EXPECT_GT(rc.node_count(), c.node_count());
    EXPECT_EQ(compute_polynomial(translate(rc)), f) << i;
    const auto samples = random_samples(c.field(), c.x_vars(), 2, 3, i);
    const AgreementReport r = check_function_agreement(rc, f, samples);
    EXPECT_TRUE(r.passed()) << i;
    EXPECT_TRUE(r.all_samples_agree()) << i;
  }
}

TEST(Noise, TranslatedPalindromeTracesIdentically) {
  const NcPoly f = palindrome_poly({2, 4});
  const Circuit rc = inject_z_noise(naive_circuit(f), 2, 99);
  const Circuit t = translate(rc);
  EXPECT_EQ(compute_polynomial(t), f);
  const Circuit n = normalize(t).circuit;
  TraceConfig cfg;
  cfg.d = 4;
  const PathTrace tr = trace_path(n, cfg);
  const TraceVerification v = verify_trace(tr, n);
  EXPECT_TRUE(v.ok());
  EXPECT_TRUE(v.full_rank_hypothesis);
}
