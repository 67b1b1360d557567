#pragma once

#include <cstddef>

#include "ncclab/circuit.hpp"
#include "ncclab/nisan.hpp"
#include "ncclab/poly.hpp"

namespace ncclab {

struct HardPolySpec {
  std::size_t n = 2;
  std::size_t d = 2;

  /// Throws PreconditionError unless n >= 2 and d is even and >= 2.
  void validate() const;
};

/// Sum over all words w of length d/2 of w.reverse(w), every coefficient 1.
/// Its middle matrix has a single 1 in each row and column. Rejects specs
/// whose middle matrix exceeds `guard` logical entries.
NcPoly palindrome_poly(const HardPolySpec& spec, Field field = Field::rationals(),
                       std::size_t guard = kDefaultMatrixGuard);

/// Sum-of-monomials circuit: one balanced product tree per monomial (split
/// at len/2), shared input leaves, and a single top sum carrying the
/// coefficients. A monomial of length L contributes L-1 product gates.
Circuit naive_circuit(const NcPoly& f);

}  // namespace ncclab
