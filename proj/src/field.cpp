#include "ncclab/field.hpp"

#include "ncclab/errors.hpp"

namespace ncclab {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
  std::uint64_t acc = 1 % p;
  while (e != 0) {
    if (e & 1U) acc = mul_mod(acc, base, p);
    base = mul_mod(base, base, p);
    e >>= 1U;
  }
  return acc;
}

std::uint64_t reduce(const mpz_class& v, std::uint64_t p) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), p);
  return r.get_ui();
}

}  // namespace

Field Field::prime(std::uint64_t p) {
  if (p < 2 || p >= (std::uint64_t{1} << 62U)) {
    throw Error("GF(p): modulus " + std::to_string(p) + " out of range [2, 2^62)");
  }
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(p), 0, 0, &p);
  if (mpz_probab_prime_p(z.get_mpz_t(), 40) == 0) {
    throw Error("GF(p): modulus " + std::to_string(p) + " is not prime");
  }
  return Field{p};
}

std::string Field::name() const {
  return is_rational() ? std::string("Q") : "GF(" + std::to_string(p_) + ")";
}

FieldElem FieldElem::from_int(const Field& f, long v) {
  if (f.is_rational()) return FieldElem(f, mpq_class(v));
  const auto p = static_cast<__int128>(f.modulus());
  __int128 r = static_cast<__int128>(v) % p;
  if (r < 0) r += p;
  return FieldElem(f, static_cast<std::uint64_t>(r));
}

FieldElem FieldElem::from_rational(const Field& f, const mpq_class& q) {
  if (f.is_rational()) return FieldElem(f, q);
  const std::uint64_t p = f.modulus();
  const std::uint64_t den = reduce(q.get_den(), p);
  if (den == 0) {
    throw FieldMismatch("coefficient " + q.get_str() + " has denominator divisible by " +
                        std::to_string(p));
  }
  const std::uint64_t num = reduce(q.get_num(), p);
  return FieldElem(f, mul_mod(num, pow_mod(den, p - 2, p), p));
}

FieldElem FieldElem::parse(const Field& f, std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ParseError("empty coefficient");
  mpq_class q;
  // mpq_class::set_str accepts a leading '+', reject it for a tight grammar.
  if (s.front() == '+' || q.set_str(s, 10) != 0) {
    throw ParseError("malformed coefficient '" + s + "'");
  }
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
  q.canonicalize();
  return from_rational(f, q);
}

bool FieldElem::is_zero() const {
  if (const auto* r = std::get_if<std::uint64_t>(&value_)) return *r == 0;
  return sgn(std::get<mpq_class>(value_)) == 0;
}

bool FieldElem::is_one() const {
  if (const auto* r = std::get_if<std::uint64_t>(&value_)) return *r == 1;
  return std::get<mpq_class>(value_) == 1;
}

const mpq_class& FieldElem::rational() const { return std::get<mpq_class>(value_); }

std::uint64_t FieldElem::residue() const { return std::get<std::uint64_t>(value_); }

void FieldElem::require_same_field(const FieldElem& o) const {
  if (!(field_ == o.field_)) {
    throw FieldMismatch("field mismatch: " + field_.name() + " vs " + o.field_.name());
  }
}

FieldElem FieldElem::inverse() const {
  if (is_zero()) throw Error("inverse of zero");
  if (field_.is_rational()) {
    return FieldElem(field_, mpq_class(1) / std::get<mpq_class>(value_));
  }
  const std::uint64_t p = field_.modulus();
  return FieldElem(field_, pow_mod(residue(), p - 2, p));
}

FieldElem& FieldElem::operator+=(const FieldElem& o) {
  require_same_field(o);
  if (field_.is_rational()) {
    std::get<mpq_class>(value_) += o.rational();
  } else {
    const std::uint64_t p = field_.modulus();
    std::uint64_t s = residue() + o.residue();
    if (s >= p) s -= p;
    value_ = s;
  }
  return *this;
}

FieldElem& FieldElem::operator-=(const FieldElem& o) {
  require_same_field(o);
  if (field_.is_rational()) {
    std::get<mpq_class>(value_) -= o.rational();
  } else {
    const std::uint64_t p = field_.modulus();
    value_ = residue() >= o.residue() ? residue() - o.residue() : residue() + p - o.residue();
  }
  return *this;
}

FieldElem& FieldElem::operator*=(const FieldElem& o) {
  require_same_field(o);
  if (field_.is_rational()) {
    std::get<mpq_class>(value_) *= o.rational();
  } else {
    value_ = mul_mod(residue(), o.residue(), field_.modulus());
  }
  return *this;
}

FieldElem FieldElem::operator-() const {
  if (field_.is_rational()) return FieldElem(field_, mpq_class(-rational()));
  return residue() == 0 ? *this : FieldElem(field_, field_.modulus() - residue());
}

bool operator==(const FieldElem& a, const FieldElem& b) {
  return a.field_ == b.field_ && a.value_ == b.value_;
}

std::string FieldElem::to_string() const {
  if (field_.is_rational()) return rational().get_str();
  return std::to_string(residue());
}

}  // namespace ncclab
