// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "ncclab/corpus.hpp"
#include "ncclab/errors.hpp"
#include "ncclab/hardpoly.hpp"
#include "ncclab/nisan.hpp"
#include "ncclab/normalize.hpp"
#include "ncclab/pathtrace.hpp"
#include "ncclab/ringtrans.hpp"
#include "oracle/oracle.hpp"
#include "unit/helpers.hpp"

using namespace ncclab;

namespace {

constexpr std::uint64_t kCorpusSeed = 0;
constexpr std::size_t kCorpusSize = 200;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 = no time limit
  std::function<Outcome()> body;
};

const std::vector<Circuit>& corpus() {
  static const std::vector<Circuit> c = generate_corpus(kCorpusSeed, kCorpusSize, CorpusLimits{});
  return c;
}

const std::vector<Circuit>& normalized_corpus() {
  static const std::vector<Circuit> out = [] {
    std::vector<Circuit> v;
    for (const Circuit& c : corpus()) v.push_back(normalize(c).circuit);
    return v;
  }();
  return out;
}

std::size_t pow_size(std::size_t n, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= n;
  return r;
}

Outcome free_algebra_axioms() {
  std::mt19937_64 rng(1);
  const Alphabet a{3, 0};
  std::size_t bad = 0;
  for (const Field f : {Field::rationals(), Field::prime(101)}) {
    for (int t = 0; t < 500; ++t) {
      const NcPoly p = testing_support::random_poly(rng, f, a, 5, 3);
      const NcPoly q = testing_support::random_poly(rng, f, a, 5, 3);
      const NcPoly r = testing_support::random_poly(rng, f, a, 5, 3);
      const NcPoly zero(f, a);
      const NcPoly one = NcPoly::constant(f, a, FieldElem::one(f));
      const bool ok = (p * q) * r == p * (q * r) && p * (q + r) == p * q + p * r &&
                      (p + q) * r == p * r + q * r && p + (-p) == zero && (p + q) + r == p + (q + r) &&
                      p + q == q + p && p * one == p && one * p == p;
      bad += ok ? 0 : 1;
    }
  }
  return {bad == 0, "1000 triples, " + std::to_string(bad) + " failures"};
}

Outcome normalization_soundness() {
  std::size_t bad = 0;
  double worst_k = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const Circuit& c = corpus()[i];
    const NcPoly f = compute_polynomial(c);
    const Normalized n = normalize(c);
    const bool ok = compute_polynomial(n.circuit) == positive_part(f) &&
                    oracle::reduce_poly(oracle::evaluate(n.circuit), c.field().modulus()) ==
                        oracle::as_qpoly(positive_part(f)) &&
                    check_properties(n.circuit).all() && n.report.after.nonscalar <= n.report.before.nonscalar;
    bad += ok ? 0 : 1;
    const double k = static_cast<double>(n.report.after.sums + n.report.after.products) /
                     static_cast<double>(std::max<std::size_t>(1, n.report.before.sums + n.report.before.products));
    worst_k = std::max(worst_k, k);
  }
  std::ostringstream os;
  os << corpus().size() << " circuits, " << bad << " violations, max gates after/before " << worst_k;
  return {bad == 0, os.str()};
}

Outcome rank_oracle_equivalence() {
  std::size_t checked = 0, mismatches = 0, nonzero = 0;
  for (const Circuit& c : corpus()) {
    if (c.field().modulus() == 101) continue;
    const std::size_t n = c.x_vars();
    for (const NcPoly& p : node_polynomials(c)) {
      const std::size_t deg = p.degree().value_or(0);
      for (std::size_t a = 0; a <= deg; ++a) {
        for (std::size_t b = 0; a + b <= deg; ++b) {
          if (pow_size(n, a) > 64 || pow_size(n, b) > 64) continue;
          const NisanMatrix m = build_matrix(p, a, b);
          const std::size_t r = rank(m).rank;
          ++checked;
          nonzero += m.is_zero() ? 0 : 1;
          if (r != oracle::dense_rank(p, a, b)) ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0 && nonzero > 0, std::to_string(checked) + " matrices (" + std::to_string(nonzero) +
                                              " nonzero) over Q and GF(2), " + std::to_string(mismatches) +
                                              " mismatches"};
}

Outcome gate_inequalities() {
  std::size_t checks = 0, rank_bad = 0, identity_bad = 0;
  for (const Circuit& c : normalized_corpus()) {
    const std::vector<NcPoly> f = node_polynomials(c);
    const std::size_t deg = *f[c.output()].degree();
    const RankTable table = compute_rank_table(f, deg);
    for (const GateCheck& g : check_gates(c, f, table, all_gate_jobs(c, deg))) {
      ++checks;
      rank_bad += g.holds ? 0 : 1;
      identity_bad += g.identity_holds ? 0 : 1;
    }
  }
  return {rank_bad == 0 && identity_bad == 0,
          std::to_string(checks) + " gate checks, " + std::to_string(rank_bad) + " rank violations, " +
              std::to_string(identity_bad) + " decomposition mismatches"};
}

Outcome trace_integrity() {
  std::size_t runs = 0, failed = 0, defects = 0;
  for (const Circuit& c : normalized_corpus()) {
    const std::size_t deg = *compute_polynomial(c).degree();
    for (std::size_t d = 2; d <= deg; d += 2) {
      TraceConfig cfg;
      cfg.d = d;
      ++runs;
      try {
        const PathTrace tr = trace_path(c, cfg);
        failed += verify_trace(tr, c).ok() ? 0 : 1;
      } catch (const InvariantViolation&) {
        ++defects;
      }
    }
  }
  const Circuit pal = normalize(naive_circuit(palindrome_poly({2, 2}))).circuit;
  TraceConfig cfg;
  cfg.d = 2;
  const PathTrace tr = trace_path(pal, cfg);
  const bool worked = tr.t() == 1 && tr.steps[0].kind == StepKind::rule2 && tr.steps[0].k == 3u &&
                      tr.steps[0].witness.size() == 2 && verify_trace(tr, pal).ok();
  return {failed == 0 && defects == 0 && runs > 0 && worked,
          std::to_string(runs) + " traces, " + std::to_string(failed) + " failed verification, " +
              std::to_string(defects) + " invariant defects; worked example k0=" +
              (tr.t() ? std::to_string(tr.steps[0].k.value_or(0)) : "-") +
              " |S1|=" + (tr.t() ? std::to_string(tr.steps[0].witness.size()) : "-") + " t=" + std::to_string(tr.t())};
}

Outcome hard_polynomial_rank() {
  std::size_t bad = 0;
  std::string detail;
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 4}, {3, 2}, {2, 6}, {4, 2}}) {
    for (const Field f : {Field::rationals(), Field::prime(2)}) {
      const NcPoly p = palindrome_poly({n, d}, f);
      const std::size_t r = rank(build_matrix(p, d / 2, d / 2)).rank;
      const std::size_t want = pow_size(n, d / 2);
      const bool ok = r == want && oracle::dense_rank(p, d / 2, d / 2) == want;
      bad += ok ? 0 : 1;
    }
  }
  return {bad == 0, "10 (n,d,field) cases, " + std::to_string(bad) + " mismatches"};
}

Outcome translation() {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const Circuit rc = inject_z_noise(corpus()[i], 2, i);
    const Circuit t = translate(rc);
    const GateCounts a = structural_counts(rc);
    const GateCounts b = structural_counts(t);
    const bool ok = rc.is_ring() && a.sums == b.sums && a.products == b.products && a.size == b.size &&
                    a.depth == b.depth && compute_polynomial(t) == restrict_g0(ring_circuit_polynomial(rc));
    bad += ok ? 0 : 1;
  }
  return {bad == 0, "100 ring circuits, " + std::to_string(bad) + " violations"};
}

Outcome lemma_substitution() {
  const CorpusLimits small{3, 4, 16};
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    const Circuit c = random_circuit(entry_seed(kCorpusSeed + 1, i), small, corpus_field(i));
    const Circuit rc = inject_z_noise(c, 2, i);
    const NcPoly f = compute_polynomial(c);
    const NcPoly g = ring_circuit_polynomial(rc);
    const SubstitutionCheck s = verify_lemma_substitution(g, f, default_exponent(g, f));
    bad += s.passed() && s.g0_equals_f ? 0 : 1;
  }
  const NcPoly g = testing_support::poly("1 * x1 + 1 * z1", Alphabet{1, 1});
  const NcPoly f = testing_support::poly("1 * x1", Alphabet{1, 0});
  const bool rejected = !verify_lemma_substitution(g, f, default_exponent(g, f)).passed();
  return {bad == 0 && rejected, "60 noisy ring circuits, " + std::to_string(bad) +
                                    " failures; negative control " + (rejected ? "rejected" : "accepted")};
}

Outcome end_to_end() {
  const NcPoly f = palindrome_poly({2, 4});
  const Circuit rc = inject_z_noise(naive_circuit(f), 2, 7);
  const AgreementReport agree = check_function_agreement(rc, f, random_samples(f.field(), 2, 2, 4, 7));
  const Circuit t = translate(rc);
  const Normalized n = normalize(t);
  TraceConfig cfg;
  cfg.d = 4;
  const PathTrace tr = trace_path(n.circuit, cfg);
  const TraceVerification v = verify_trace(tr, n.circuit);
  const bool ok = rc.is_ring() && agree.passed() && compute_polynomial(t) == f &&
                  compute_polynomial(n.circuit) == f && n.report.properties.all() && v.ok() &&
                  v.full_rank_hypothesis;
  return {ok, "t=" + std::to_string(tr.t()) + " |S|=" + std::to_string(v.witness_size) +
                  " sum_k=" + std::to_string(v.sum_k) + " verification " + (v.ok() ? "ok" : "failed")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "free-algebra axioms", 10, free_algebra_axioms},
      {2, "normalization soundness", 60, normalization_soundness},
      {3, "rank oracle equivalence", 0, rank_oracle_equivalence},
      {4, "gate inequalities", 0, gate_inequalities},
      {5, "trace integrity", 0, trace_integrity},
      {6, "hard polynomial rank", 30, hard_polynomial_rank},
      {7, "ring-to-field translation", 0, translation},
      {8, "substitution lemma", 0, lemma_substitution},
      {9, "end-to-end pipeline", 120, end_to_end},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s == 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string limit = c.limit_s == 0 ? "no limit" : "limit " + std::to_string(static_cast<int>(c.limit_s)) + "s";
    std::printf("criterion %d %s: %s  %s  [%.2fs, %s]\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                limit.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
