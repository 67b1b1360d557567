#include "ncclab/ringtrans.hpp"

#include <algorithm>
#include <random>

#include "ncclab/circuit_io.hpp"
#include "ncclab/errors.hpp"
#include "parallel.hpp"

namespace ncclab {

NcPoly ring_circuit_polynomial(const Circuit& rc, const EvalOptions& opt) {
  return compute_polynomial(rc, opt);
}

namespace {

bool touches_z(const Word& w) { return std::any_of(w.begin(), w.end(), is_z); }

std::size_t deg_or_zero(const NcPoly& p) { return p.degree().value_or(0); }

}  // namespace

NcPoly restrict_g0(const NcPoly& g) {
  NcPoly out(g.field(), Alphabet{g.alphabet().x, 0});
  for (const auto& [w, c] : g.terms()) {
    if (!touches_z(w)) out.add_term(w, c);
  }
  return out;
}

NcPoly restrict_gprime(const NcPoly& g) {
  NcPoly out(g.field(), g.alphabet());
  for (const auto& [w, c] : g.terms()) {
    if (touches_z(w)) out.add_term(w, c);
  }
  return out;
}

Circuit translate(const Circuit& rc, const EvalOptions& opt) {
  Circuit out(rc.field(), rc.x_vars());
  for (const Node& n : rc.nodes()) {
    switch (n.kind) {
      case NodeKind::input: out.add_input(var_index(n.var)); break;
      case NodeKind::constant: out.add_scalar(n.value.constant_term()); break;
      case NodeKind::sum: out.add_sum(n.args); break;
      case NodeKind::product: out.add_product(n.left, n.right); break;
    }
  }
  out.set_output(rc.output());

  const GateCounts before = structural_counts(rc);
  const GateCounts after = structural_counts(out);
  if (before.sums != after.sums || before.products != after.products || before.size != after.size ||
      before.depth != after.depth) {
    throw InvariantViolation("translate: gate counts, size or depth changed");
  }
  if (!(compute_polynomial(out, opt) == restrict_g0(ring_circuit_polynomial(rc, opt)))) {
    throw InvariantViolation("translate: translated polynomial differs from g^0");
  }
  return out;
}

std::size_t default_exponent(const NcPoly& g, const NcPoly& f) {
  return std::max(deg_or_zero(g), deg_or_zero(f)) + 1;
}

namespace {

// x_i -> z_i^D into F<z1..z{zs}>.
Substitution power_map(const Field& field, std::size_t n, std::size_t zs, std::size_t D) {
  Substitution sigma;
  for (std::size_t i = 1; i <= n; ++i) {
    sigma.emplace(x_var(i), NcPoly::monomial(field, Alphabet{0, zs}, Word(D, z_var(i)),
                                             FieldElem::one(field)));
  }
  return sigma;
}

}  // namespace

SubstitutionCheck verify_lemma_substitution(const NcPoly& g, const NcPoly& f, std::size_t D) {
  if (f.alphabet().z != 0) throw PreconditionError("lemma check: f must not mention Z letters");
  if (!(g.field() == f.field())) throw FieldMismatch("lemma check: g and f over different fields");
  if (g.alphabet().x != f.alphabet().x) {
    throw PreconditionError("lemma check: g and f use different X alphabets");
  }
  if (D <= deg_or_zero(g) || D <= deg_or_zero(f)) {
    throw PreconditionError("lemma check: D = " + std::to_string(D) +
                            " must exceed deg g = " + std::to_string(deg_or_zero(g)) +
                            " and deg f = " + std::to_string(deg_or_zero(f)));
  }
  SubstitutionCheck s;
  s.D = D;
  s.g = g;
  s.f = f;
  s.g0 = restrict_g0(g);
  s.gprime = restrict_gprime(g);

  const std::size_t n = g.alphabet().x;
  const std::size_t zs = std::max(n, g.alphabet().z);
  const Alphabet target{0, zs};
  const Substitution sigma = power_map(g.field(), n, zs, D);
  const std::size_t guard = std::max(kDefaultMaxWordLength, D * (deg_or_zero(g) + 1));

  s.g_subst = substitute(g, sigma, target, guard);
  s.f_subst = substitute(f, sigma, target, guard);
  s.gprime_subst = substitute(s.gprime, sigma, target, guard);
  const NcPoly g0_subst = substitute(s.g0, sigma, target, guard);

  s.functional = s.g_subst == s.f_subst;
  s.gprime_vanishes = s.gprime_subst.is_zero();
  s.g0_subst_matches = g0_subst == s.f_subst;
  s.g0_equals_f = s.g0 == f;

  s.degrees_ok = true;
  for (const auto& [w, c] : s.gprime.terms()) {
    const auto k = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), is_z));
    if (k == 0 || k >= D) s.degrees_ok = false;
  }
  for (const auto& [w, c] : s.gprime_subst.terms()) {
    if (w.size() % D == 0) s.degrees_ok = false;
  }

  // Undo the bijection x_i <-> z_i^D on g^0(z^D).
  s.decoded_matches = true;
  NcPoly decoded(g.field(), Alphabet{n, 0});
  for (const auto& [w, c] : g0_subst.terms()) {
    if (w.size() % D != 0) {
      s.decoded_matches = false;
      break;
    }
    Word x;
    for (std::size_t at = 0; at < w.size() && s.decoded_matches; at += D) {
      const Var head = w[at];
      const bool block = std::all_of(w.begin() + at, w.begin() + at + D, [&](Var v) { return v == head; });
      if (!block || var_index(head) > n) {
        s.decoded_matches = false;
      } else {
        x.push_back(x_var(var_index(head)));
      }
    }
    if (!s.decoded_matches) break;
    decoded.add_term(x, c);
  }
  s.decoded_matches = s.decoded_matches && decoded == f;
  return s;
}

bool AgreementReport::all_samples_agree() const {
  return std::all_of(samples.begin(), samples.end(), [](const SampleOutcome& s) { return s.agree; });
}

namespace {

std::size_t max_node_degree(const Circuit& rc) {
  std::size_t d = 0;
  for (const NcPoly& p : node_polynomials(rc)) d = std::max(d, deg_or_zero(p));
  return d;
}

SampleOutcome run_sample(const Circuit& rc, const NcPoly& f, const std::vector<NcPoly>& h,
                         std::size_t index, std::size_t guard) {
  if (h.size() != rc.x_vars()) {
    throw PreconditionError("sample " + std::to_string(index) + " has " + std::to_string(h.size()) +
                            " entries, expected " + std::to_string(rc.x_vars()));
  }
  const Alphabet target = h.front().alphabet();
  Substitution sigma;
  for (std::size_t i = 0; i < h.size(); ++i) sigma.emplace(x_var(i + 1), h[i]);
  const NcPoly got = evaluate_function(rc, h, EvalOptions{guard});
  const NcPoly want = substitute(f, sigma, target, guard);
  return {index, got == want, terms_to_text(got), terms_to_text(want)};
}

std::size_t sample_guard(const Circuit& rc, const std::vector<NcPoly>& h) {
  std::size_t longest = 1;
  for (const NcPoly& p : h) longest = std::max(longest, deg_or_zero(p));
  std::size_t const_len = 0;
  for (const Node& n : rc.nodes()) {
    if (n.kind == NodeKind::constant) const_len = std::max(const_len, deg_or_zero(n.value));
  }
  return std::max(kDefaultMaxWordLength, (longest + const_len) * (max_node_degree(rc) + 1));
}

}  // namespace

AgreementReport check_function_agreement(const Circuit& rc, const NcPoly& f,
                                         const std::vector<std::vector<NcPoly>>& samples) {
  if (rc.x_vars() == 0) throw PreconditionError("agreement check: circuit has no inputs");
  AgreementReport r;
  const NcPoly g = ring_circuit_polynomial(rc);
  const std::size_t D = default_exponent(g, f);
  r.lemma = verify_lemma_substitution(g, f, D);

  r.samples.resize(samples.size());
  detail::parallel_for(samples.size(), [&](std::size_t i) {
    r.samples[i] = run_sample(rc, f, samples[i], i, sample_guard(rc, samples[i]));
  });

  const std::size_t zs = std::max(rc.x_vars(), rc.z_vars());
  std::vector<NcPoly> structured;
  for (std::size_t i = 1; i <= rc.x_vars(); ++i) {
    structured.push_back(NcPoly::monomial(rc.field(), Alphabet{0, zs}, Word(D, z_var(i)),
                                          FieldElem::one(rc.field())));
  }
  r.structured = run_sample(rc, f, structured, samples.size(), sample_guard(rc, structured));
  return r;
}

namespace {

FieldElem random_nonzero(const Field& field, std::mt19937_64& rng) {
  if (!field.is_rational()) {
    const std::uint64_t p = field.modulus();
    return FieldElem::from_int(field, static_cast<long>(1 + rng() % (p - 1 < 5 ? p - 1 : 5)));
  }
  const long v = static_cast<long>(rng() % 5) + 1;
  return FieldElem::from_int(field, rng() % 2 ? v : -v);
}

NcPoly random_z_poly(const Field& field, std::size_t zs, std::size_t max_terms, std::size_t min_len,
                     std::size_t max_len, std::mt19937_64& rng) {
  NcPoly p(field, Alphabet{0, zs});
  const std::size_t terms = 1 + rng() % max_terms;
  for (std::size_t t = 0; t < terms; ++t) {
    Word w(min_len + rng() % (max_len - min_len + 1));
    for (Var& v : w) v = z_var(1 + rng() % zs);
    p.add_term(w, random_nonzero(field, rng));
  }
  return p;
}

}  // namespace

std::vector<std::vector<NcPoly>> random_samples(Field field, std::size_t n, std::size_t z_vars,
                                                std::size_t count, std::uint64_t seed) {
  if (z_vars == 0) throw PreconditionError("random samples need at least one Z letter");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<NcPoly>> out(count);
  for (auto& h : out) {
    for (std::size_t i = 0; i < n; ++i) {
      NcPoly p(field, Alphabet{0, z_vars});
      while (p.is_zero()) p = random_z_poly(field, z_vars, 3, 0, 3, rng);
      h.push_back(std::move(p));
    }
  }
  return out;
}

Circuit inject_z_noise(const Circuit& c, std::size_t z_vars, std::uint64_t seed) {
  if (c.is_ring()) throw PreconditionError("inject_z_noise expects a field circuit");
  if (z_vars == 0) throw PreconditionError("inject_z_noise needs at least one Z letter");
  std::mt19937_64 rng(seed);
  const Field& field = c.field();
  Circuit out(field, c.x_vars(), z_vars);
  const FieldElem one = FieldElem::one(field);
  const Alphabet za{0, z_vars};

  // p = q + (terms with at least one Z letter), q an arbitrary scalar.
  const auto noise = [&] {
    NcPoly p = random_z_poly(field, z_vars, 2, 1, 2, rng);
    if (rng() % 2) p.add_term({}, random_nonzero(field, rng));
    return p;
  };
  const auto wrap = [&](NodeId u) {
    const NcPoly p = noise();
    const bool left = rng() % 2;
    const NodeId pa = out.add_constant(p);
    const NodeId n1 = left ? out.add_product(pa, u) : out.add_product(u, pa);
    const NodeId pb = out.add_constant(p);
    const NodeId n2 = left ? out.add_product(pb, u) : out.add_product(u, pb);
    return out.add_sum({{u, one}, {n1, one}, {n2, -one}});
  };

  std::vector<NodeId> map(c.node_count());
  bool injected = false;
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const Node& n = c.node(id);
    NodeId v = 0;
    switch (n.kind) {
      case NodeKind::input: v = out.add_input(var_index(n.var)); break;
      case NodeKind::constant:
        if (rng() % 2) {
          const NcPoly p = noise();
          const NodeId a = out.add_constant(n.value.with_alphabet(za) + p);
          const NodeId b = out.add_constant(-p);
          v = out.add_sum({{a, one}, {b, one}});
          injected = true;
        } else {
          v = out.add_constant(n.value.with_alphabet(za));
        }
        break;
      case NodeKind::sum: {
        std::vector<SumArg> args;
        for (const auto& a : n.args) args.push_back({map[a.node], a.scalar});
        v = out.add_sum(std::move(args));
        break;
      }
      case NodeKind::product: v = out.add_product(map[n.left], map[n.right]); break;
    }
    if (rng() % 3 == 0) {
      v = wrap(v);
      injected = true;
    }
    map[id] = v;
  }
  NodeId output = map[c.output()];
  if (!injected) output = wrap(output);
  out.set_output(output);
  return out;
}

nlohmann::ordered_json to_json(const SubstitutionCheck& s) {
  nlohmann::ordered_json j;
  j["D"] = s.D;
  j["g"] = terms_to_text(s.g);
  j["f"] = terms_to_text(s.f);
  j["g0"] = terms_to_text(s.g0);
  j["gprime"] = terms_to_text(s.gprime);
  j["gprime_substituted"] = terms_to_text(s.gprime_subst);
  j["functional"] = s.functional;
  j["degrees_not_divisible"] = s.degrees_ok;
  j["gprime_vanishes"] = s.gprime_vanishes;
  j["g0_substituted_matches"] = s.g0_subst_matches;
  j["decoded_matches"] = s.decoded_matches;
  j["g0_equals_f"] = s.g0_equals_f;
  j["passed"] = s.passed();
  return j;
}

nlohmann::ordered_json to_json(const AgreementReport& r) {
  const auto sample = [](const SampleOutcome& s) {
    nlohmann::ordered_json j;
    j["index"] = s.index;
    j["agree"] = s.agree;
    if (!s.agree) {
      j["circuit"] = s.circuit_value;
      j["expected"] = s.expected_value;
    }
    return j;
  };
  nlohmann::ordered_json j;
  j["passed"] = r.passed();
  j["all_samples_agree"] = r.all_samples_agree();
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const auto& s : r.samples) samples.push_back(sample(s));
  j["samples"] = samples;
  j["structured"] = sample(r.structured);
  j["lemma"] = to_json(r.lemma);
  return j;
}

}  // namespace ncclab
