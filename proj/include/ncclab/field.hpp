#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace ncclab {

/// Either the rationals Q or a prime field GF(p).
class Field {
 public:
  Field() = default;

  static Field rationals() { return Field{}; }
  /// Throws Error unless p is a prime below 2^62.
  static Field prime(std::uint64_t p);

  bool is_rational() const { return p_ == 0; }
  /// 0 for Q.
  std::uint64_t modulus() const { return p_; }
  std::string name() const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  explicit Field(std::uint64_t p) : p_(p) {}
  std::uint64_t p_ = 0;
};

/// Exact field scalar. Rationals are kept in lowest terms by GMP; residues
/// are always reduced into [0, p).
class FieldElem {
 public:
  /// Rational zero.
  FieldElem() : value_(mpq_class(0)) {}

  static FieldElem zero(const Field& f) { return from_int(f, 0); }
  static FieldElem one(const Field& f) { return from_int(f, 1); }
  static FieldElem from_int(const Field& f, long v);
  /// Maps num/den into the field; throws FieldMismatch when den vanishes in it.
  static FieldElem from_rational(const Field& f, const mpq_class& q);
  /// Accepts "a", "-a" or "a/b".
  static FieldElem parse(const Field& f, std::string_view text);

  const Field& field() const { return field_; }
  bool is_zero() const;
  bool is_one() const;

  /// Only valid over Q.
  const mpq_class& rational() const;
  /// Only valid over GF(p).
  std::uint64_t residue() const;

  FieldElem inverse() const;

  FieldElem& operator+=(const FieldElem& o);
  FieldElem& operator-=(const FieldElem& o);
  FieldElem& operator*=(const FieldElem& o);
  FieldElem& operator/=(const FieldElem& o) { return *this *= o.inverse(); }

  friend FieldElem operator+(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator-(FieldElem a, const FieldElem& b) { return a -= b; }
  friend FieldElem operator*(FieldElem a, const FieldElem& b) { return a *= b; }
  friend FieldElem operator/(FieldElem a, const FieldElem& b) { return a /= b; }
  FieldElem operator-() const;

  friend bool operator==(const FieldElem& a, const FieldElem& b);
  friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

  /// "a/b" (or "a" when b = 1) over Q; bare residue over GF(p).
  std::string to_string() const;

 private:
  FieldElem(Field f, std::uint64_t r) : field_(f), value_(r) {}
  FieldElem(Field f, mpq_class q) : field_(f), value_(std::move(q)) {}
  void require_same_field(const FieldElem& o) const;

  Field field_;
  std::variant<mpq_class, std::uint64_t> value_;
};

}  // namespace ncclab
