#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ncclab/circuit.hpp"
#include "ncclab/poly.hpp"

namespace testing_support {

inline ncclab::NcPoly poly(const std::string& terms, ncclab::Alphabet a,
                           ncclab::Field f = ncclab::Field::rationals()) {
  return ncclab::parse_poly_text("field: " + f.name() + "\n" + terms + "\n", a);
}

inline ncclab::NcPoly random_poly(std::mt19937_64& rng, ncclab::Field f, ncclab::Alphabet a,
                                  std::size_t max_terms, std::size_t max_len) {
  ncclab::NcPoly p(f, a);
  const std::size_t terms = rng() % (max_terms + 1);
  for (std::size_t t = 0; t < terms; ++t) {
    ncclab::Word w(rng() % (max_len + 1));
    for (auto& v : w) v = ncclab::x_var(1 + rng() % a.x);
    p.add_term(w, ncclab::FieldElem::from_int(f, static_cast<long>(rng() % 11) - 5));
  }
  return p;
}

}  // namespace testing_support
