#pragma once

// Independent reference implementations used by the tests. Nothing here
// calls into the sparse elimination, build_matrix or the circuit evaluator.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <vector>

#include "ncclab/circuit.hpp"
#include "ncclab/poly.hpp"

namespace oracle {

using QMatrix = std::vector<std::vector<mpq_class>>;

// All words of length len over x1..xn in lexicographic order.
inline std::vector<ncclab::Word> all_words(std::size_t n, std::size_t len) {
  std::vector<ncclab::Word> out{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<ncclab::Word> next;
    for (const auto& w : out) {
      for (std::size_t v = 1; v <= n; ++v) {
        ncclab::Word e = w;
        e.push_back(ncclab::x_var(v));
        next.push_back(e);
      }
    }
    out = std::move(next);
  }
  return out;
}

// Coefficient of u.w looked up term by term; residues come back as integers.
inline mpq_class coefficient_of(const ncclab::NcPoly& p, const ncclab::Word& word) {
  for (const auto& [w, c] : p.terms()) {
    if (w == word) {
      return c.field().is_rational() ? c.rational() : mpq_class(static_cast<unsigned long>(c.residue()));
    }
  }
  return 0;
}

inline QMatrix dense_matrix(const ncclab::NcPoly& p, std::size_t a, std::size_t b) {
  const std::size_t n = p.alphabet().x;
  const auto rows = all_words(n, a);
  const auto cols = all_words(n, b);
  QMatrix m(rows.size(), std::vector<mpq_class>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      ncclab::Word w = rows[i];
      w.insert(w.end(), cols[j].begin(), cols[j].end());
      m[i][j] = coefficient_of(p, w);
    }
  }
  return m;
}

// Textbook Gauss-Jordan over Q.
inline std::size_t rank_q(QMatrix m) {
  std::size_t rank = 0;
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][col] == 0) continue;
      const mpq_class f = m[r][col] / m[rank][col];
      for (std::size_t k = col; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e) {
    if (e & 1) r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * b % p);
    b = static_cast<std::uint64_t>(static_cast<unsigned __int128>(b) * b % p);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t reduce(const mpq_class& q, std::uint64_t p) {
  mpz_class num = q.get_num() % static_cast<unsigned long>(p);
  if (num < 0) num += static_cast<unsigned long>(p);
  mpz_class den = q.get_den() % static_cast<unsigned long>(p);
  const std::uint64_t inv = pow_mod(den.get_ui(), p - 2, p);
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(num.get_ui()) * inv % p);
}

// Gaussian elimination mod p, inverses by Fermat.
inline std::size_t rank_mod(const QMatrix& q, std::uint64_t p) {
  std::vector<std::vector<std::uint64_t>> m(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (const auto& v : q[i]) m[i].push_back(reduce(v, p));
  }
  std::size_t rank = 0;
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    const std::uint64_t inv = pow_mod(m[rank][col], p - 2, p);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][col] == 0) continue;
      const std::uint64_t f = static_cast<std::uint64_t>(static_cast<unsigned __int128>(m[r][col]) * inv % p);
      for (std::size_t k = col; k < cols; ++k) {
        const std::uint64_t sub = static_cast<std::uint64_t>(static_cast<unsigned __int128>(f) * m[rank][k] % p);
        m[r][k] = (m[r][k] + p - sub) % p;
      }
    }
    ++rank;
  }
  return rank;
}

inline std::size_t dense_rank(const ncclab::NcPoly& p, std::size_t a, std::size_t b) {
  const QMatrix m = dense_matrix(p, a, b);
  return p.field().is_rational() ? rank_q(m) : rank_mod(m, p.field().modulus());
}

// Polynomials as plain maps over Q; GF(p) circuits are evaluated over the
// integers and reduced at the end (the circuits never divide).
using QPoly = std::map<std::vector<int>, mpq_class>;

inline void add_into(QPoly& acc, const QPoly& p, const mpq_class& s) {
  for (const auto& [w, c] : p) {
    mpq_class& slot = acc[w];
    slot += s * c;
    if (slot == 0) acc.erase(w);
  }
}

inline QPoly mul(const QPoly& p, const QPoly& q) {
  QPoly out;
  for (const auto& [u, a] : p) {
    for (const auto& [v, b] : q) {
      std::vector<int> w = u;
      w.insert(w.end(), v.begin(), v.end());
      mpq_class& slot = out[w];
      slot += a * b;
      if (slot == 0) out.erase(w);
    }
  }
  return out;
}

inline mpq_class lift(const ncclab::FieldElem& c) {
  return c.field().is_rational() ? c.rational() : mpq_class(static_cast<unsigned long>(c.residue()));
}

// Letters: x_i -> i, z_j -> -j.
inline QPoly evaluate(const ncclab::Circuit& c) {
  std::vector<QPoly> val;
  for (const auto& n : c.nodes()) {
    QPoly v;
    switch (n.kind) {
      case ncclab::NodeKind::input: v[{static_cast<int>(ncclab::var_index(n.var))}] = 1; break;
      case ncclab::NodeKind::constant:
        for (const auto& [w, k] : n.value.terms()) {
          std::vector<int> word;
          for (auto l : w) word.push_back(-static_cast<int>(ncclab::var_index(l)));
          v[word] = lift(k);
        }
        break;
      case ncclab::NodeKind::sum:
        for (const auto& a : n.args) add_into(v, val[a.node], lift(a.scalar));
        break;
      case ncclab::NodeKind::product: v = mul(val[n.left], val[n.right]); break;
    }
    val.push_back(std::move(v));
  }
  return val[c.output()];
}

// Same letter encoding, coefficients reduced into the field of p.
inline QPoly as_qpoly(const ncclab::NcPoly& p) {
  QPoly out;
  for (const auto& [w, k] : p.terms()) {
    std::vector<int> word;
    for (auto l : w) {
      const int i = static_cast<int>(ncclab::var_index(l));
      word.push_back(ncclab::is_z(l) ? -i : i);
    }
    out[word] = lift(k);
  }
  return out;
}

inline QPoly reduce_poly(const QPoly& q, std::uint64_t p) {
  if (p == 0) return q;
  QPoly out;
  for (const auto& [w, c] : q) {
    const std::uint64_t r = reduce(c, p);
    if (r) out[w] = mpq_class(static_cast<unsigned long>(r));
  }
  return out;
}

}  // namespace oracle
