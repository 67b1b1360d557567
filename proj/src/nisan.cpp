#include "ncclab/nisan.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "ncclab/errors.hpp"
#include "parallel.hpp"

namespace ncclab {

std::size_t logical_entries(std::size_t n, std::size_t a, std::size_t b) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < a + b; ++i) {
    if (n != 0 && out > SIZE_MAX / n) return SIZE_MAX;
    out *= n;
  }
  return out;
}

void require_within_guard(std::size_t n, std::size_t a, std::size_t b, std::size_t guard) {
  const std::size_t e = logical_entries(n, a, b);
  if (e > guard) {
    const std::string size = e == SIZE_MAX ? "more than 2^64" : std::to_string(e);
    throw GuardExceeded("matrix M^{" + std::to_string(a) + "," + std::to_string(b) + "} over " +
                        std::to_string(n) + " letters has " + size + " entries (guard " +
                        std::to_string(guard) + ")");
  }
}

FieldElem NisanMatrix::at(const Word& row, const Word& col) const {
  auto it = entries_.find({row, col});
  return it == entries_.end() ? FieldElem::zero(field_) : it->second;
}

void NisanMatrix::add(const Word& row, const Word& col, const FieldElem& c) {
  if (row.size() != a_ || col.size() != b_) throw Error("matrix index has the wrong word length");
  if (c.is_zero()) return;
  auto [it, inserted] = entries_.try_emplace({row, col}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) entries_.erase(it);
  }
}

void NisanMatrix::require_shape(const NisanMatrix& other) const {
  if (!(field_ == other.field_) || n_ != other.n_ || a_ != other.a_ || b_ != other.b_) {
    throw Error("matrix shape or field mismatch");
  }
}

void NisanMatrix::add_scaled(const NisanMatrix& other, const FieldElem& c) {
  require_shape(other);
  for (const auto& [idx, v] : other.entries_) add(idx.first, idx.second, v * c);
}

std::vector<Word> NisanMatrix::occupied_rows() const {
  std::vector<Word> out;
  for (const auto& [idx, v] : entries_) {
    if (out.empty() || out.back() != idx.first) out.push_back(idx.first);
  }
  return out;
}

std::vector<Word> NisanMatrix::occupied_cols() const {
  std::vector<Word> out;
  for (const auto& [idx, v] : entries_) out.push_back(idx.second);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

NisanMatrix build_matrix(const NcPoly& p, std::size_t a, std::size_t b) {
  if (p.alphabet().x == 0) throw PreconditionError("matrix needs an alphabet with n >= 1");
  NisanMatrix m(p.field(), p.alphabet().x, a, b);
  for (const auto& [w, c] : p.terms()) {
    if (w.size() != a + b) continue;
    if (std::any_of(w.begin(), w.end(), is_z)) {
      throw PreconditionError("coefficient matrices are defined over X only; term mentions Z");
    }
    m.add(Word(w.begin(), w.begin() + static_cast<long>(a)),
          Word(w.begin() + static_cast<long>(a), w.end()), c);
  }
  return m;
}

NcPoly matrix_polynomial(const NisanMatrix& m) {
  NcPoly p(m.field(), Alphabet{m.alphabet_size(), 0});
  for (const auto& [idx, c] : m.entries()) {
    Word w = idx.first;
    w.insert(w.end(), idx.second.begin(), idx.second.end());
    p.add_term(w, c);
  }
  return p;
}

NisanMatrix kronecker(const NisanMatrix& lhs, const NisanMatrix& rhs) {
  if (lhs.alphabet_size() != rhs.alphabet_size()) throw Error("kronecker: alphabet size mismatch");
  if (!(lhs.field() == rhs.field())) throw FieldMismatch("kronecker: field mismatch");
  NisanMatrix out(lhs.field(), lhs.alphabet_size(), lhs.row_length() + rhs.row_length(),
                  lhs.col_length() + rhs.col_length());
  for (const auto& [i, x] : lhs.entries()) {
    for (const auto& [j, y] : rhs.entries()) {
      Word row = i.first;
      row.insert(row.end(), j.first.begin(), j.first.end());
      Word col = i.second;
      col.insert(col.end(), j.second.begin(), j.second.end());
      out.add(row, col, x * y);
    }
  }
  return out;
}

namespace {

template <class T>
using SparseRow = std::vector<std::pair<std::uint32_t, T>>;

template <class T>
const T* find_col(const SparseRow<T>& row, std::uint32_t col) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const auto& e, std::uint32_t c) { return e.first < c; });
  return (it != row.end() && it->first == col) ? &it->second : nullptr;
}

struct ModpKernel {
  using T = std::uint64_t;
  std::uint64_t p;

  T mul(T x, T y) const { return static_cast<T>(static_cast<unsigned __int128>(x) * y % p); }

  T inv(T x) const {
    T acc = 1;
    T e = p - 2;
    while (e != 0) {
      if (e & 1U) acc = mul(acc, x);
      x = mul(x, x);
      e >>= 1U;
    }
    return acc;
  }

  SparseRow<T> convert(const std::vector<std::pair<std::uint32_t, const FieldElem*>>& src) const {
    SparseRow<T> row;
    for (const auto& [c, v] : src) row.emplace_back(c, v->residue());
    return row;
  }

  void normalize_pivot(SparseRow<T>& row) const {
    const T s = inv(row.front().second);
    for (auto& e : row) e.second = mul(e.second, s);
  }

  // row - row[col] * pivot, with pivot[col] == 1.
  SparseRow<T> eliminate(const SparseRow<T>& row, const SparseRow<T>& pivot, const T& factor) const {
    SparseRow<T> out;
    out.reserve(row.size() + pivot.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < row.size() || j < pivot.size()) {
      if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
        out.push_back(row[i++]);
      } else {
        const T sub = mul(factor, pivot[j].second);
        if (i < row.size() && row[i].first == pivot[j].first) {
          const T v = row[i].second >= sub ? row[i].second - sub : row[i].second + p - sub;
          if (v != 0) out.emplace_back(row[i].first, v);
          ++i;
        } else if (sub != 0) {
          out.emplace_back(pivot[j].first, p - sub);
        }
        ++j;
      }
    }
    return out;
  }
};

struct RationalKernel {
  using T = mpz_class;

  static void remove_content(SparseRow<T>& row) {
    mpz_class g = 0;
    for (const auto& e : row) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
      if (g == 1) return;
    }
    if (g > 1) {
      for (auto& e : row) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
    }
  }

  // Scales the row by the lcm of its denominators.
  SparseRow<T> convert(const std::vector<std::pair<std::uint32_t, const FieldElem*>>& src) const {
    mpz_class l = 1;
    for (const auto& [c, v] : src) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v->rational().get_den_mpz_t());
    SparseRow<T> row;
    for (const auto& [c, v] : src) {
      mpz_class x = v->rational().get_num() * (l / v->rational().get_den());
      row.emplace_back(c, std::move(x));
    }
    remove_content(row);
    return row;
  }

  void normalize_pivot(SparseRow<T>& /*row*/) const {}

  // pivot[col] * row - row[col] * pivot, content removed.
  SparseRow<T> eliminate(const SparseRow<T>& row, const SparseRow<T>& pivot, const T& factor) const {
    const mpz_class& lead = pivot.front().second;
    SparseRow<T> out;
    out.reserve(row.size() + pivot.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < row.size() || j < pivot.size()) {
      if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
        out.emplace_back(row[i].first, lead * row[i].second);
        ++i;
      } else if (i < row.size() && row[i].first == pivot[j].first) {
        mpz_class v = lead * row[i].second - factor * pivot[j].second;
        if (sgn(v) != 0) out.emplace_back(row[i].first, std::move(v));
        ++i;
        ++j;
      } else {
        out.emplace_back(pivot[j].first, -(factor * pivot[j].second));
        ++j;
      }
    }
    remove_content(out);
    return out;
  }
};

constexpr std::size_t kParallelRowThreshold = 32;

template <bool Parallel, class Kernel>
RankResult eliminate_rows(const NisanMatrix& m, const Kernel& kernel) {
  using T = typename Kernel::T;
  RankResult result;
  if (m.is_zero()) return result;

  const std::vector<Word> row_words = m.occupied_rows();
  const std::vector<Word> col_words = m.occupied_cols();
  std::map<Word, std::uint32_t> col_index;
  for (std::uint32_t i = 0; i < col_words.size(); ++i) col_index.emplace(col_words[i], i);

  std::vector<SparseRow<T>> rows;
  rows.reserve(row_words.size());
  {
    std::vector<std::pair<std::uint32_t, const FieldElem*>> buf;
    auto it = m.entries().begin();
    for (const Word& rw : row_words) {
      buf.clear();
      for (; it != m.entries().end() && it->first.first == rw; ++it) {
        buf.emplace_back(col_index.at(it->first.second), &it->second);
      }
      std::sort(buf.begin(), buf.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      rows.push_back(kernel.convert(buf));
    }
  }

  std::vector<std::size_t> active(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) active[i] = i;

  while (!active.empty()) {
    const std::size_t pr = active.front();
    active.erase(active.begin());
    SparseRow<T>& pivot = rows[pr];
    kernel.normalize_pivot(pivot);
    const std::uint32_t col = pivot.front().first;
    result.pivots.emplace_back(row_words[pr], col_words[col]);

    const auto update = [&](std::size_t i) {
      SparseRow<T>& r = rows[active[i]];
      if (const T* hit = find_col(r, col)) {
        const T factor = *hit;
        r = kernel.eliminate(r, pivot, factor);
      }
    };
    if constexpr (Parallel) {
      if (active.size() >= kParallelRowThreshold) {
        detail::parallel_for(active.size(), update);
      } else {
        for (std::size_t i = 0; i < active.size(); ++i) update(i);
      }
    } else {
      for (std::size_t i = 0; i < active.size(); ++i) update(i);
    }
    std::erase_if(active, [&](std::size_t r) { return rows[r].empty(); });
  }
  result.rank = result.pivots.size();
  return result;
}

template <bool Parallel>
RankResult rank_impl(const NisanMatrix& m) {
  if (m.field().is_rational()) return eliminate_rows<Parallel>(m, RationalKernel{});
  return eliminate_rows<Parallel>(m, ModpKernel{m.field().modulus()});
}

// Plain dense elimination used to certify pivot minors.
std::size_t dense_rank(std::vector<std::vector<FieldElem>> a) {
  std::size_t r = 0;
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    const FieldElem inv = a[r][c].inverse();
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (a[i][c].is_zero()) continue;
      const FieldElem f = a[i][c] * inv;
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    ++r;
  }
  return r;
}

}  // namespace

RankResult rank(const NisanMatrix& m) { return rank_impl<true>(m); }

RankResult rank_serial(const NisanMatrix& m) { return rank_impl<false>(m); }

bool certify_rank(const NisanMatrix& m, const RankResult& r) {
  if (r.rank != r.pivots.size()) return false;
  std::vector<std::vector<FieldElem>> minor(r.rank, std::vector<FieldElem>(r.rank));
  for (std::size_t i = 0; i < r.rank; ++i) {
    for (std::size_t j = 0; j < r.rank; ++j) minor[i][j] = m.at(r.pivots[i].first, r.pivots[j].second);
  }
  if (r.rank == 0) return true;
  return dense_rank(std::move(minor)) == r.rank;
}

RankTable::RankTable(std::size_t nodes, std::size_t max_total)
    : nodes_(nodes), max_total_(max_total), ranks_(nodes * (max_total + 1) * (max_total + 1), 0) {}

std::size_t RankTable::slot(NodeId v, std::size_t a, std::size_t b) const {
  if (v >= nodes_ || a + b > max_total_) {
    throw Error("rank table lookup out of range (node " + std::to_string(v) + ", a=" +
                std::to_string(a) + ", b=" + std::to_string(b) + ")");
  }
  return (static_cast<std::size_t>(v) * (max_total_ + 1) + a) * (max_total_ + 1) + b;
}

std::size_t RankTable::at(NodeId v, std::size_t a, std::size_t b) const { return ranks_[slot(v, a, b)]; }

void RankTable::set(NodeId v, std::size_t a, std::size_t b, std::size_t r) { ranks_[slot(v, a, b)] = r; }

namespace {

void fill_node(RankTable& t, const std::vector<NcPoly>& f, std::size_t v) {
  for (std::size_t a = 0; a <= t.max_total(); ++a) {
    for (std::size_t b = 0; a + b <= t.max_total(); ++b) {
      t.set(static_cast<NodeId>(v), a, b, rank_serial(build_matrix(f[v], a, b)).rank);
    }
  }
}

}  // namespace

RankTable compute_rank_table(const std::vector<NcPoly>& f, std::size_t max_total) {
  RankTable t(f.size(), max_total);
  detail::parallel_for(f.size(), [&](std::size_t v) { fill_node(t, f, v); });
  return t;
}

RankTable compute_rank_table_serial(const std::vector<NcPoly>& f, std::size_t max_total) {
  RankTable t(f.size(), max_total);
  for (std::size_t v = 0; v < f.size(); ++v) fill_node(t, f, v);
  return t;
}

namespace {

template <class RankOf>
GateCheck check_impl(const Circuit& c, const std::vector<NcPoly>& f, NodeId v, std::size_t a,
                     std::size_t b, RankOf&& rank_of) {
  const Node& n = c.node(v);
  GateCheck g;
  g.gate = v;
  g.kind = n.kind;
  g.a = a;
  g.b = b;
  g.lhs = rank_of(v, a, b);
  const NisanMatrix mv = build_matrix(f[v], a, b);
  const std::size_t alpha = f[v].alphabet().x;

  if (n.kind == NodeKind::sum) {
    NisanMatrix combo(c.field(), alpha, a, b);
    for (const auto& arg : n.args) {
      g.terms.push_back(rank_of(arg.node, a, b));
      combo.add_scaled(build_matrix(f[arg.node], a, b), arg.scalar);
    }
    g.identity_holds = combo == mv;
  } else if (n.kind == NodeKind::product) {
    for (NodeId ch : {n.left, n.right}) {
      if (!f[ch].constant_term().is_zero()) {
        throw PreconditionError("product gate " + std::to_string(v) + ": child " + std::to_string(ch) +
                                " has a nonzero constant term");
      }
    }
    NisanMatrix combo(c.field(), alpha, a, b);
    for (std::size_t i = 1; i <= a; ++i) {
      g.terms.push_back(rank_of(n.right, a - i, b));
      combo.add_scaled(kronecker(build_matrix(f[n.left], i, 0), build_matrix(f[n.right], a - i, b)),
                       FieldElem::one(c.field()));
    }
    for (std::size_t i = 1; i + 1 <= b; ++i) {
      g.terms.push_back(rank_of(n.left, a, b - i));
      combo.add_scaled(kronecker(build_matrix(f[n.left], a, b - i), build_matrix(f[n.right], 0, i)),
                       FieldElem::one(c.field()));
    }
    g.identity_holds = combo == mv;
  } else {
    throw PreconditionError("node " + std::to_string(v) + " is a leaf, not a gate");
  }
  for (std::size_t t : g.terms) g.rhs += t;
  g.holds = g.lhs <= g.rhs;
  return g;
}

}  // namespace

GateCheck check_sum_inequality(const Circuit& c, const std::vector<NcPoly>& f, NodeId v,
                               std::size_t a, std::size_t b) {
  if (c.node(v).kind != NodeKind::sum) {
    throw PreconditionError("node " + std::to_string(v) + " is not a sum gate");
  }
  return check_impl(c, f, v, a, b, [&](NodeId u, std::size_t x, std::size_t y) {
    return rank(build_matrix(f[u], x, y)).rank;
  });
}

GateCheck check_product_inequality(const Circuit& c, const std::vector<NcPoly>& f, NodeId v,
                                   std::size_t a, std::size_t b) {
  if (c.node(v).kind != NodeKind::product) {
    throw PreconditionError("node " + std::to_string(v) + " is not a product gate");
  }
  return check_impl(c, f, v, a, b, [&](NodeId u, std::size_t x, std::size_t y) {
    return rank(build_matrix(f[u], x, y)).rank;
  });
}

GateCheck check_gate(const Circuit& c, const std::vector<NcPoly>& f, const RankTable& table,
                     NodeId v, std::size_t a, std::size_t b) {
  return check_impl(c, f, v, a, b,
                    [&](NodeId u, std::size_t x, std::size_t y) { return table.at(u, x, y); });
}

std::vector<GateJob> all_gate_jobs(const Circuit& c, std::size_t max_total) {
  std::vector<GateJob> jobs;
  for (NodeId v = 0; v < c.node_count(); ++v) {
    if (c.node(v).is_leaf()) continue;
    for (std::size_t a = 0; a <= max_total; ++a) {
      for (std::size_t b = 0; a + b <= max_total; ++b) jobs.push_back({v, a, b});
    }
  }
  return jobs;
}

std::vector<GateCheck> check_gates(const Circuit& c, const std::vector<NcPoly>& f,
                                   const RankTable& table, const std::vector<GateJob>& jobs) {
  std::vector<GateCheck> out(jobs.size());
  detail::parallel_for(jobs.size(), [&](std::size_t i) {
    out[i] = check_gate(c, f, table, jobs[i].gate, jobs[i].a, jobs[i].b);
  });
  return out;
}

std::vector<GateCheck> check_gates_serial(const Circuit& c, const std::vector<NcPoly>& f,
                                          const RankTable& table, const std::vector<GateJob>& jobs) {
  std::vector<GateCheck> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) out.push_back(check_gate(c, f, table, j.gate, j.a, j.b));
  return out;
}

nlohmann::ordered_json to_json(const GateCheck& g) {
  nlohmann::ordered_json j;
  j["gate"] = g.gate;
  j["kind"] = kind_name(g.kind);
  j["a"] = g.a;
  j["b"] = g.b;
  j["lhs"] = g.lhs;
  j["rhs"] = g.rhs;
  j["holds"] = g.holds;
  j["identity_holds"] = g.identity_holds;
  j["terms"] = g.terms;
  return j;
}

nlohmann::ordered_json to_json(const RankResult& r) {
  nlohmann::ordered_json j;
  j["rank"] = r.rank;
  nlohmann::ordered_json piv = nlohmann::ordered_json::array();
  for (const auto& [row, col] : r.pivots) {
    piv.push_back(nlohmann::ordered_json::array({word_to_string(row), word_to_string(col)}));
  }
  j["pivots"] = piv;
  return j;
}

}  // namespace ncclab
