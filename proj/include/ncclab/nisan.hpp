#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ncclab/circuit.hpp"
#include "ncclab/poly.hpp"

namespace ncclab {

/// Default cap on the logical entry count n^a * n^b of a requested matrix.
inline constexpr std::size_t kDefaultMatrixGuard = std::size_t{1} << 20;

/// n^a * n^b, saturating at SIZE_MAX.
std::size_t logical_entries(std::size_t n, std::size_t a, std::size_t b);
/// Throws GuardExceeded quoting the computed size when it exceeds guard.
void require_within_guard(std::size_t n, std::size_t a, std::size_t b, std::size_t guard);

/// Sparse coefficient matrix M_f^{a,b}: rows are words of length a, columns
/// words of length b over x1..xn, and entry (u, w) is the coefficient of u.w
/// in f. Only nonzero entries are stored; the logical shape is n^a x n^b.
class NisanMatrix {
 public:
  using Index = std::pair<Word, Word>;

  NisanMatrix(Field field, std::size_t n, std::size_t a, std::size_t b)
      : field_(field), n_(n), a_(a), b_(b) {}

  const Field& field() const { return field_; }
  std::size_t alphabet_size() const { return n_; }
  std::size_t row_length() const { return a_; }
  std::size_t col_length() const { return b_; }
  const std::map<Index, FieldElem>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  FieldElem at(const Word& row, const Word& col) const;
  /// Accumulates c into entry (row, col).
  void add(const Word& row, const Word& col, const FieldElem& c);
  /// this += c * other.
  void add_scaled(const NisanMatrix& other, const FieldElem& c);

  std::vector<Word> occupied_rows() const;
  std::vector<Word> occupied_cols() const;

  friend bool operator==(const NisanMatrix& x, const NisanMatrix& y) {
    return x.field_ == y.field_ && x.n_ == y.n_ && x.a_ == y.a_ && x.b_ == y.b_ &&
           x.entries_ == y.entries_;
  }

 private:
  void require_shape(const NisanMatrix& other) const;

  Field field_;
  std::size_t n_;
  std::size_t a_;
  std::size_t b_;
  std::map<Index, FieldElem> entries_;
};

/// Entries are the terms of homogeneous_part(p, a+b) split after position a.
/// p must not mention Z letters.
NisanMatrix build_matrix(const NcPoly& p, std::size_t a, std::size_t b);
/// Inverse of build_matrix: sum of entry * (row.col).
NcPoly matrix_polynomial(const NisanMatrix& m);

/// entry(u.u', w.w') = A(u, w) * B(u', w').
NisanMatrix kronecker(const NisanMatrix& lhs, const NisanMatrix& rhs);

struct RankResult {
  std::size_t rank = 0;
  /// (row, column) pivots in elimination order.
  std::vector<NisanMatrix::Index> pivots;
};

/// Exact rank by sparse elimination on the occupied rows and columns:
/// fraction-free with content reduction over Q, normalized pivots over GF(p).
/// The pivot is always the smallest remaining row and its smallest column.
/// Row updates run in parallel with OpenMP; the result is schedule-independent.
RankResult rank(const NisanMatrix& m);
/// Single-threaded reference for rank(); identical output.
RankResult rank_serial(const NisanMatrix& m);

/// True iff the square minor on the pivot rows and columns is nonsingular,
/// which certifies rank(m) >= pivots.size().
bool certify_rank(const NisanMatrix& m, const RankResult& r);

/// rank(M_v^{a,b}) for every node and every a+b <= max_total.
class RankTable {
 public:
  RankTable() = default;
  RankTable(std::size_t nodes, std::size_t max_total);

  std::size_t max_total() const { return max_total_; }
  std::size_t at(NodeId v, std::size_t a, std::size_t b) const;
  void set(NodeId v, std::size_t a, std::size_t b, std::size_t r);

 private:
  std::size_t slot(NodeId v, std::size_t a, std::size_t b) const;

  std::size_t nodes_ = 0;
  std::size_t max_total_ = 0;
  std::vector<std::size_t> ranks_;
};

/// Builds the table in parallel over nodes.
RankTable compute_rank_table(const std::vector<NcPoly>& node_polys, std::size_t max_total);
RankTable compute_rank_table_serial(const std::vector<NcPoly>& node_polys, std::size_t max_total);

/// Outcome of one rank inequality at one gate.
///
/// Sum gate: lhs = rank M_v, rhs = sum over in-edges of rank M_child, and the
/// identity M_v = sum c_i M_{v_i}. Product gate: rhs = sum_{i=1..a} rank
/// M_right^{a-i,b} + sum_{i=1..b-1} rank M_left^{a,b-i}, and the identity
/// M_v = sum_i M_left^{i,0} (x) M_right^{a-i,b} + sum_i M_left^{a,b-i} (x) M_right^{0,i}.
struct GateCheck {
  NodeId gate = 0;
  NodeKind kind = NodeKind::sum;
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t lhs = 0;
  std::size_t rhs = 0;
  bool holds = false;
  bool identity_holds = false;
  /// Sum: per-edge child ranks. Product: the a right-kept terms, then the
  /// b-1 left-kept terms.
  std::vector<std::size_t> terms;

  bool ok() const { return holds && identity_holds; }
};

GateCheck check_sum_inequality(const Circuit& c, const std::vector<NcPoly>& f, NodeId v,
                               std::size_t a, std::size_t b);
/// Requires both children of v to have zero constant term.
GateCheck check_product_inequality(const Circuit& c, const std::vector<NcPoly>& f, NodeId v,
                                   std::size_t a, std::size_t b);

/// Same checks with ranks read from a precomputed table (a + b <= table max).
GateCheck check_gate(const Circuit& c, const std::vector<NcPoly>& f, const RankTable& table,
                     NodeId v, std::size_t a, std::size_t b);

struct GateJob {
  NodeId gate;
  std::size_t a;
  std::size_t b;
};

/// Every gate of c at every (a, b) with a + b <= max_total.
std::vector<GateJob> all_gate_jobs(const Circuit& c, std::size_t max_total);

/// Runs the jobs in parallel; results come back in job order.
std::vector<GateCheck> check_gates(const Circuit& c, const std::vector<NcPoly>& f,
                                   const RankTable& table, const std::vector<GateJob>& jobs);
std::vector<GateCheck> check_gates_serial(const Circuit& c, const std::vector<NcPoly>& f,
                                          const RankTable& table, const std::vector<GateJob>& jobs);

nlohmann::ordered_json to_json(const GateCheck& g);
nlohmann::ordered_json to_json(const RankResult& r);

}  // namespace ncclab
