#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ncclab/field.hpp"

namespace ncclab {

/// Variable identifier. x_i (1-based) is encoded as i-1, z_j as kZBase + j-1,
/// so every x letter sorts before every z letter.
using Var = std::uint16_t;
inline constexpr Var kZBase = 0x4000;

constexpr Var x_var(std::size_t i) { return static_cast<Var>(i - 1); }
constexpr Var z_var(std::size_t j) { return static_cast<Var>(kZBase + j - 1); }
constexpr bool is_z(Var v) { return v >= kZBase; }
/// 1-based index within its own alphabet.
constexpr std::size_t var_index(Var v) { return is_z(v) ? v - kZBase + 1 : std::size_t{v} + 1; }
std::string var_name(Var v);

using Word = std::vector<Var>;

/// Declared variables: x1..x{x}, z1..z{z}.
struct Alphabet {
  std::size_t x = 0;
  std::size_t z = 0;

  bool contains(Var v) const {
    return is_z(v) ? var_index(v) <= z : var_index(v) <= x;
  }
  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

/// Degree of a polynomial; std::nullopt stands for the degree of the zero
/// polynomial (-infinity). std::optional ordering puts it below every value.
using Degree = std::optional<std::size_t>;

inline constexpr std::size_t kDefaultMaxWordLength = 64;

/// Sparse non-commutative polynomial: word -> nonzero coefficient. Ordered by
/// the lexicographic order on variable indices (a proper prefix sorts first).
class NcPoly {
 public:
  using TermMap = std::map<Word, FieldElem>;

  NcPoly() = default;
  NcPoly(Field field, Alphabet alphabet) : field_(field), alphabet_(alphabet) {}

  static NcPoly constant(Field f, Alphabet a, const FieldElem& c);
  static NcPoly variable(Field f, Alphabet a, Var v);
  static NcPoly monomial(Field f, Alphabet a, Word w, const FieldElem& c);

  const Field& field() const { return field_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  Degree degree() const;

  FieldElem coefficient(const Word& w) const;
  FieldElem constant_term() const { return coefficient({}); }

  /// Adds c * w in place, dropping the entry if it cancels.
  void add_term(const Word& w, const FieldElem& c);

  NcPoly scaled(const FieldElem& c) const;
  /// Same terms, larger alphabet; throws if some letter would be undeclared.
  NcPoly with_alphabet(Alphabet a) const;

  friend bool operator==(const NcPoly& p, const NcPoly& q) {
    return p.field_ == q.field_ && p.alphabet_ == q.alphabet_ && p.terms_ == q.terms_;
  }

 private:
  Field field_;
  Alphabet alphabet_;
  TermMap terms_;
};

void require_compatible(const NcPoly& p, const NcPoly& q);

NcPoly poly_add(const NcPoly& p, const NcPoly& q);
NcPoly poly_sub(const NcPoly& p, const NcPoly& q);
/// Throws GuardExceeded if a product word would exceed max_word_length.
NcPoly poly_mul(const NcPoly& p, const NcPoly& q,
                std::size_t max_word_length = kDefaultMaxWordLength);

inline NcPoly operator+(const NcPoly& p, const NcPoly& q) { return poly_add(p, q); }
inline NcPoly operator-(const NcPoly& p, const NcPoly& q) { return poly_sub(p, q); }
inline NcPoly operator*(const NcPoly& p, const NcPoly& q) { return poly_mul(p, q); }
inline NcPoly operator-(const NcPoly& p) { return p.scaled(-FieldElem::one(p.field())); }

NcPoly homogeneous_part(const NcPoly& p, std::size_t r);
NcPoly positive_part(const NcPoly& p);

/// Images for a subset of the source letters; unmapped letters map to
/// themselves and must belong to the target alphabet.
using Substitution = std::map<Var, NcPoly>;

/// Ring homomorphism extension of the letter map into F<target>.
NcPoly substitute(const NcPoly& p, const Substitution& sigma, Alphabet target,
                  std::size_t max_word_length = kDefaultMaxWordLength);

/// Text form: header line "field: Q" or "field: GF(p)", then one line of
/// terms "coeff * v1.v2" joined by " + " (a bare coeff for the empty word,
/// "0" for the zero polynomial).
std::string to_text(const NcPoly& p);
/// Just the term line of to_text.
std::string terms_to_text(const NcPoly& p);
NcPoly parse_poly_text(std::string_view text, Alphabet alphabet);

std::string word_to_string(const Word& w);

/// "Q" or "GF(p)".
Field parse_field_name(std::string_view name);

}  // namespace ncclab
