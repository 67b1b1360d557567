#include "ncclab/poly.hpp"

#include <charconv>
#include <sstream>

#include "ncclab/errors.hpp"

namespace ncclab {

std::string var_name(Var v) {
  return (is_z(v) ? "z" : "x") + std::to_string(var_index(v));
}

std::string word_to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i != 0) out += '.';
    out += var_name(w[i]);
  }
  return out;
}

NcPoly NcPoly::constant(Field f, Alphabet a, const FieldElem& c) {
  return monomial(f, a, {}, c);
}

NcPoly NcPoly::variable(Field f, Alphabet a, Var v) {
  return monomial(f, a, {v}, FieldElem::one(f));
}

NcPoly NcPoly::monomial(Field f, Alphabet a, Word w, const FieldElem& c) {
  NcPoly p(f, a);
  for (Var v : w) {
    if (!a.contains(v)) throw Error("variable " + var_name(v) + " not in alphabet");
  }
  p.add_term(w, c);
  return p;
}

Degree NcPoly::degree() const {
  if (terms_.empty()) return std::nullopt;
  std::size_t d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.size());
  return d;
}

FieldElem NcPoly::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? FieldElem::zero(field_) : it->second;
}

void NcPoly::add_term(const Word& w, const FieldElem& c) {
  if (!(c.field() == field_)) {
    throw FieldMismatch("coefficient over " + c.field().name() + " added to polynomial over " +
                        field_.name());
  }
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

NcPoly NcPoly::scaled(const FieldElem& c) const {
  NcPoly out(field_, alphabet_);
  if (c.is_zero()) return out;
  for (const auto& [w, coeff] : terms_) out.terms_.emplace_hint(out.terms_.end(), w, coeff * c);
  return out;
}

NcPoly NcPoly::with_alphabet(Alphabet a) const {
  NcPoly out(field_, a);
  for (const auto& [w, c] : terms_) {
    for (Var v : w) {
      if (!a.contains(v)) throw Error("variable " + var_name(v) + " not in target alphabet");
    }
    out.terms_.emplace_hint(out.terms_.end(), w, c);
  }
  return out;
}

void require_compatible(const NcPoly& p, const NcPoly& q) {
  if (!(p.field() == q.field())) {
    throw FieldMismatch("polynomials over different fields: " + p.field().name() + " vs " +
                        q.field().name());
  }
  if (!(p.alphabet() == q.alphabet())) throw Error("polynomials over different alphabets");
}

NcPoly poly_add(const NcPoly& p, const NcPoly& q) {
  require_compatible(p, q);
  NcPoly out = p;
  for (const auto& [w, c] : q.terms()) out.add_term(w, c);
  return out;
}

NcPoly poly_sub(const NcPoly& p, const NcPoly& q) {
  require_compatible(p, q);
  NcPoly out = p;
  for (const auto& [w, c] : q.terms()) out.add_term(w, -c);
  return out;
}

NcPoly poly_mul(const NcPoly& p, const NcPoly& q, std::size_t max_word_length) {
  require_compatible(p, q);
  NcPoly out(p.field(), p.alphabet());
  Word w;
  for (const auto& [u, cu] : p.terms()) {
    for (const auto& [v, cv] : q.terms()) {
      if (u.size() + v.size() > max_word_length) {
        throw GuardExceeded("word length " + std::to_string(u.size() + v.size()) +
                            " exceeds guard " + std::to_string(max_word_length));
      }
      w.assign(u.begin(), u.end());
      w.insert(w.end(), v.begin(), v.end());
      out.add_term(w, cu * cv);
    }
  }
  return out;
}

NcPoly homogeneous_part(const NcPoly& p, std::size_t r) {
  NcPoly out(p.field(), p.alphabet());
  for (const auto& [w, c] : p.terms()) {
    if (w.size() == r) out.add_term(w, c);
  }
  return out;
}

NcPoly positive_part(const NcPoly& p) {
  NcPoly out = p;
  out.add_term({}, -p.constant_term());
  return out;
}

NcPoly substitute(const NcPoly& p, const Substitution& sigma, Alphabet target,
                  std::size_t max_word_length) {
  for (const auto& [v, image] : sigma) {
    if (!(image.alphabet() == target)) {
      throw Error("image of " + var_name(v) + " is not over the target alphabet");
    }
    if (!(image.field() == p.field())) throw FieldMismatch("substitution image over another field");
  }
  const auto image_of = [&](Var v) {
    if (auto it = sigma.find(v); it != sigma.end()) return it->second;
    if (!target.contains(v)) {
      throw Error("unmapped variable " + var_name(v) + " is not in the target alphabet");
    }
    return NcPoly::variable(p.field(), target, v);
  };

  NcPoly out(p.field(), target);
  for (const auto& [w, c] : p.terms()) {
    NcPoly term = NcPoly::constant(p.field(), target, c);
    for (Var v : w) term = poly_mul(term, image_of(v), max_word_length);
    out = poly_add(out, term);
  }
  return out;
}

std::string terms_to_text(const NcPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    if (!first) out += " + ";
    first = false;
    out += c.to_string();
    if (!w.empty()) out += " * " + word_to_string(w);
  }
  return out;
}

std::string to_text(const NcPoly& p) {
  return "field: " + p.field().name() + "\n" + terms_to_text(p) + "\n";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

Var parse_var(std::string_view tok, Alphabet alphabet) {
  if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'z')) {
    throw ParseError("malformed variable '" + std::string(tok) + "'");
  }
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || idx == 0 || idx >= kZBase) {
    throw ParseError("malformed variable '" + std::string(tok) + "'");
  }
  Var v = tok[0] == 'x' ? x_var(idx) : z_var(idx);
  if (!alphabet.contains(v)) {
    throw ParseError("variable '" + std::string(tok) + "' outside the declared alphabet");
  }
  return v;
}

Field parse_field_header(std::string_view line) {
  line = trim(line);
  constexpr std::string_view kPrefix = "field:";
  if (line.substr(0, kPrefix.size()) != kPrefix) {
    throw ParseError("expected 'field: Q' or 'field: GF(p)' header");
  }
  return parse_field_name(line.substr(kPrefix.size()));
}

}  // namespace

Field parse_field_name(std::string_view name) {
  name = trim(name);
  if (name == "Q") return Field::rationals();
  if (name.size() > 4 && name.substr(0, 3) == "GF(" && name.back() == ')') {
    std::string_view digits = name.substr(3, name.size() - 4);
    std::uint64_t p = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return Field::prime(p);
  }
  throw ParseError("unknown field '" + std::string(name) + "'");
}

NcPoly parse_poly_text(std::string_view text, Alphabet alphabet) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<Field> field;
  std::string body;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (!field) {
      field = parse_field_header(line);
    } else {
      if (!body.empty()) body += " + ";
      body += std::string(trim(line));
    }
  }
  if (!field) throw ParseError("missing field header");
  NcPoly p(*field, alphabet);
  if (body.empty()) throw ParseError("missing term line");
  if (trim(body) == "0") return p;

  std::string_view rest = body;
  while (true) {
    const std::size_t sep = rest.find(" + ");
    std::string_view term = trim(rest.substr(0, sep));
    const std::size_t star = term.find('*');
    std::string_view coeff = trim(term.substr(0, star));
    Word w;
    if (star != std::string_view::npos) {
      std::string_view letters = trim(term.substr(star + 1));
      while (true) {
        const std::size_t dot = letters.find('.');
        w.push_back(parse_var(letters.substr(0, dot), alphabet));
        if (dot == std::string_view::npos) break;
        letters.remove_prefix(dot + 1);
      }
    }
    p.add_term(w, FieldElem::parse(*field, coeff));
    if (sep == std::string_view::npos) break;
    rest.remove_prefix(sep + 3);
  }
  return p;
}

}  // namespace ncclab
