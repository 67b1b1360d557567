#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncclab/circuit.hpp"
#include "ncclab/poly.hpp"

namespace ncclab {

/// g(z, x) in F<Z,X> for a circuit whose constants live in F<Z>.
NcPoly ring_circuit_polynomial(const Circuit& rc, const EvalOptions& opt = {});

/// g^0: the terms of g with no Z letter, over the alphabet {x1..xn}.
NcPoly restrict_g0(const NcPoly& g);
/// g' = g - g^0, over the alphabet of g.
NcPoly restrict_gprime(const NcPoly& g);

/// Same DAG with every constant p replaced by its constant term p^0 and the
/// Z alphabet dropped. Throws InvariantViolation if gate counts, size, depth
/// or the computed polynomial fail to match.
Circuit translate(const Circuit& rc, const EvalOptions& opt = {});

/// Default exponent: one more than the larger of the two degrees.
std::size_t default_exponent(const NcPoly& g, const NcPoly& f);

struct SubstitutionCheck {
  std::size_t D = 0;
  NcPoly g, f, g0, gprime;
  /// g(z, z^D) and f(z^D), over z1..z{max(m, n)}.
  NcPoly g_subst, f_subst, gprime_subst;

  bool functional = false;         // g(z, z^D) = f(z^D)
  bool degrees_ok = false;         // every term of g' has between 1 and D-1 Z letters,
                                   // every word of g'(z, z^D) has length not divisible by D
  bool gprime_vanishes = false;    // g'(z, z^D) = 0
  bool g0_subst_matches = false;   // g^0(z^D) = f(z^D)
  bool decoded_matches = false;    // z^D blocks of g^0(z^D) decode back to f
  bool g0_equals_f = false;

  bool passed() const {
    return functional && degrees_ok && gprime_vanishes && g0_subst_matches && decoded_matches &&
           g0_equals_f;
  }
};

/// Throws PreconditionError unless D > deg g and D > deg f, f has no Z
/// letters, and both share the field and the X alphabet.
SubstitutionCheck verify_lemma_substitution(const NcPoly& g, const NcPoly& f, std::size_t D);

struct SampleOutcome {
  std::size_t index = 0;
  bool agree = false;
  std::string circuit_value;
  std::string expected_value;
};

struct AgreementReport {
  std::vector<SampleOutcome> samples;
  /// h_i = z_i^D with D = default_exponent(g, f).
  SampleOutcome structured;
  SubstitutionCheck lemma;

  bool all_samples_agree() const;
  /// Decisive verdict: structured sample and the lemma checks pass.
  bool passed() const { return structured.agree && lemma.passed(); }
};

/// Each sample holds n inputs over one Z-only alphabet with at least
/// rc.z_vars() letters. Samples are evaluated in parallel.
AgreementReport check_function_agreement(const Circuit& rc, const NcPoly& f,
                                         const std::vector<std::vector<NcPoly>>& samples);

/// `count` random n-tuples over F<z1..z{z_vars}>, each entry a sum of up to
/// three terms with words of length at most 3.
std::vector<std::vector<NcPoly>> random_samples(Field field, std::size_t n, std::size_t z_vars,
                                                std::size_t count, std::uint64_t seed);

/// Ring circuit over z1..z{z_vars} computing the same function as the field
/// circuit c. Constants are split as (c + p) + (-p) and nodes u are wrapped
/// as u + p.u - p.u with fresh Z-polynomials p.
Circuit inject_z_noise(const Circuit& c, std::size_t z_vars, std::uint64_t seed);

nlohmann::ordered_json to_json(const SubstitutionCheck& s);
nlohmann::ordered_json to_json(const AgreementReport& r);

}  // namespace ncclab
