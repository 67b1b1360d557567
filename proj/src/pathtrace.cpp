#include "ncclab/pathtrace.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "ncclab/errors.hpp"
#include "ncclab/nisan.hpp"
#include "ncclab/normalize.hpp"

namespace ncclab {

void TraceConfig::validate() const {
  if (c == 0) throw PreconditionError("trace: c must be a positive integer");
  if (sgn(alpha) <= 0 || alpha >= 1) throw PreconditionError("trace: alpha must lie in (0,1)");
  if (d == 0 || d % 2 != 0) throw PreconditionError("trace: d must be even and positive");
}

mpq_class parse_alpha(const std::string& text) {
  mpq_class q;
  if (text.empty() || text.front() == '+' || q.set_str(text, 10) != 0 || q.get_den() == 0) {
    throw ParseError("malformed alpha '" + text + "' (expected p/q)");
  }
  q.canonicalize();
  return q;
}

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::rule1: return "sum-rule1";
    case StepKind::rule2: return "sum-rule2";
    case StepKind::product: return "product";
  }
  return "?";
}

const char* stop_reason_name(StopReason s) {
  switch (s) {
    case StopReason::rank: return "rank";
    case StopReason::leaf: return "leaf";
    case StopReason::degree_exhausted: return "degree-exhausted";
  }
  return "?";
}

std::vector<std::size_t> PathTrace::indices(StepKind k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].kind == k) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> PathTrace::witness_set() const {
  std::set<NodeId> s;
  for (const auto& st : steps) s.insert(st.witness.begin(), st.witness.end());
  return {s.begin(), s.end()};
}

namespace {

// t_i^2 = c^2 r^2 / n; x >= alpha^e t_i  <=>  x^2 >= alpha^{2e} t_i^2.
struct Threshold {
  mpq_class squared;
  mpq_class alpha;

  Threshold(std::uint64_t c, std::size_t r, std::size_t n, const mpq_class& a) : alpha(a) {
    mpz_class cr = mpz_class(static_cast<unsigned long>(c)) * static_cast<unsigned long>(r);
    squared = mpq_class(cr * cr, mpz_class(static_cast<unsigned long>(n)));
    squared.canonicalize();
  }

  mpq_class scaled_squared(std::size_t e) const {
    mpq_class f = 1;
    for (std::size_t i = 0; i < e; ++i) f *= alpha * alpha;
    return squared * f;
  }

  // x >= alpha^e * t
  bool reached(std::size_t x, std::size_t e) const {
    mpq_class xx = mpq_class(static_cast<unsigned long>(x)) * static_cast<unsigned long>(x);
    return xx >= scaled_squared(e);
  }
};

mpz_class pow2(std::size_t e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, e);
  return out;
}

class RankOracle {
 public:
  explicit RankOracle(const std::vector<NcPoly>& f) : f_(f) {}

  std::size_t operator()(NodeId v, std::size_t a, std::size_t b) {
    auto key = std::make_tuple(v, a, b);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::size_t r = rank(build_matrix(f_[v], a, b)).rank;
    memo_.emplace(key, r);
    return r;
  }

 private:
  const std::vector<NcPoly>& f_;
  std::map<std::tuple<NodeId, std::size_t, std::size_t>, std::size_t> memo_;
};

std::vector<NodeId> distinct_children(const Node& n) {
  std::vector<NodeId> ch = n.children();
  std::sort(ch.begin(), ch.end());
  ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
  return ch;
}

// Members of N_{i,k}: alpha^{k+1} t <= rank < alpha^k t.
std::vector<NodeId> bucket(const std::vector<std::pair<NodeId, std::size_t>>& child_ranks,
                           const Threshold& th, std::size_t k) {
  std::vector<NodeId> out;
  for (const auto& [u, r] : child_ranks) {
    if (th.reached(r, k + 1) && !th.reached(r, k)) out.push_back(u);
  }
  return out;
}

std::size_t bucket_rank(const std::vector<std::pair<NodeId, std::size_t>>& child_ranks,
                        const std::vector<NodeId>& members) {
  std::size_t s = 0;
  for (const auto& [u, r] : child_ranks) {
    if (std::binary_search(members.begin(), members.end(), u)) s += r;
  }
  return s;
}

std::size_t resolve_n(const Circuit& c, const TraceConfig& cfg) {
  if (cfg.n != 0 && cfg.n != c.x_vars()) {
    throw PreconditionError("trace: n = " + std::to_string(cfg.n) + " but the circuit has " +
                            std::to_string(c.x_vars()) + " input variables");
  }
  if (c.x_vars() == 0) throw PreconditionError("trace: circuit has no input variables");
  return c.x_vars();
}

}  // namespace

PathTrace trace_path(const Circuit& c, TraceConfig cfg) {
  cfg.validate();
  cfg.n = resolve_n(c, cfg);
  if (c.is_ring()) throw PreconditionError("trace: ring circuits must be translated first");
  const Properties props = check_properties(c);
  if (!props.all()) {
    throw PreconditionError("trace: P1..P5 required (normalize the circuit first); " +
                            props.violations.front());
  }
  const std::vector<NcPoly> f = node_polynomials(c);
  RankOracle rank_of(f);

  PathTrace tr;
  tr.config = cfg;
  NodeId v = c.output();
  std::size_t a = cfg.d / 2;
  std::size_t b = cfg.d / 2;

  while (true) {
    const std::size_t r = rank_of(v, a, b);
    tr.points.push_back({v, a, b, r});
    const Node& n = c.node(v);
    if (r <= 1) {
      tr.stop = n.is_leaf() ? StopReason::leaf
                : (a == 0 || b == 0) ? StopReason::degree_exhausted
                                     : StopReason::rank;
      break;
    }
    if (n.is_leaf()) throw InvariantViolation("leaf " + std::to_string(v) + " has rank > 1");

    TraceStep step;
    const std::size_t i = tr.steps.size();
    if (n.kind == NodeKind::sum) {
      for (NodeId u : distinct_children(n)) step.child_ranks.emplace_back(u, rank_of(u, a, b));
      const Threshold th(cfg.c, r, cfg.n, cfg.alpha);

      std::optional<NodeId> next;
      for (const auto& [u, ru] : step.child_ranks) {
        if (th.reached(ru, 0)) {
          next = u;
          break;
        }
      }
      if (next) {
        step.kind = StepKind::rule1;
      } else {
        step.kind = StepKind::rule2;
        // A member of N_{i,k} has rank >= 1, so once alpha^k t <= 1 no
        // further bucket can be admissible.
        for (std::size_t k = 0; !th.reached(1, k); ++k) {
          std::vector<NodeId> members = bucket(step.child_ranks, th, k);
          if (members.empty()) continue;
          if (pow2(k + 1) * bucket_rank(step.child_ranks, members) < r) continue;
          for (NodeId u : members) {
            const std::vector<bool> below = descendants(c, u);
            const bool minimal = std::none_of(members.begin(), members.end(),
                                              [&](NodeId w) { return w != u && below[w]; });
            if (minimal) {
              next = u;
              break;
            }
          }
          if (!next) throw InvariantViolation("acyclic bucket without a minimal member");
          step.k = k;
          step.witness = std::move(members);
          break;
        }
        if (!next) {
          throw InvariantViolation("step " + std::to_string(i) + ": no admissible k at sum gate " +
                                   std::to_string(v) + " (contradicts rank subadditivity)");
        }
      }
      v = *next;
    } else {
      step.kind = StepKind::product;
      const std::size_t limit = std::max(a, b);
      for (std::size_t j = 1; j <= limit && !step.j; ++j) {
        if (j <= a && pow2(j + 1) * rank_of(n.right, a - j, b) >= r) {
          step.j = j;
          step.side = KeptSide::right;
        } else if (j + 1 <= b && pow2(j + 1) * rank_of(n.left, a, b - j) >= r) {
          step.j = j;
          step.side = KeptSide::left;
        }
      }
      if (!step.j) {
        throw InvariantViolation("step " + std::to_string(i) + ": no admissible j at product gate " +
                                 std::to_string(v) + " (contradicts the product rank bound)");
      }
      if (*step.side == KeptSide::right) {
        v = n.right;
        a -= *step.j;
      } else {
        v = n.left;
        b -= *step.j;
      }
    }
    tr.steps.push_back(std::move(step));
  }
  return tr;
}

bool TraceVerification::ok() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const TraceCheck& c) { return c.status == CheckStatus::violated; });
}

const TraceCheck* TraceVerification::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

TraceVerification verify_trace(const PathTrace& tr, const Circuit& c) {
  const TraceConfig& cfg = tr.config;
  TraceVerification out;
  const auto record = [&](std::string name, std::optional<std::size_t> step, bool ok,
                          std::string detail = {}) {
    out.checks.push_back({std::move(name), step, ok ? CheckStatus::holds : CheckStatus::violated,
                          std::move(detail)});
  };
  const auto skip = [&](std::string name, std::string detail) {
    out.checks.push_back({std::move(name), std::nullopt, CheckStatus::not_applicable, std::move(detail)});
  };

  cfg.validate();
  const std::size_t n = resolve_n(c, cfg);
  const std::size_t t = tr.t();
  if (tr.points.size() != t + 1) {
    record("path.shape", std::nullopt, false, "expected t+1 path points");
    return out;
  }
  const std::vector<NcPoly> f = node_polynomials(c);
  const GateReport gates = classify_gates(c, f);
  const auto fresh_rank = [&](NodeId v, std::size_t a, std::size_t b) {
    return rank_serial(build_matrix(f.at(v), a, b)).rank;
  };

  // Path shape and recomputed ranks.
  const PathPoint& p0 = tr.points.front();
  record("path.start", 0, p0.node == c.output() && p0.a == cfg.d / 2 && p0.b == cfg.d / 2,
         "v_0 must be the output with a_0 = b_0 = d/2");
  for (std::size_t i = 0; i <= t; ++i) {
    const PathPoint& p = tr.points[i];
    const std::size_t r = fresh_rank(p.node, p.a, p.b);
    record("rank.recomputed", i, r == p.rank,
           "recorded " + std::to_string(p.rank) + ", recomputed " + std::to_string(r));
    if (i < t) record("path.continues", i, p.rank >= 2, "path must stop once r_i <= 1");
  }
  record("stop.rank", t, tr.points[t].rank <= 1, "r_t = " + std::to_string(tr.points[t].rank));
  record("stop.length", t, tr.points[t].a + tr.points[t].b >= 1,
         "a_t + b_t = " + std::to_string(tr.points[t].a + tr.points[t].b));

  std::size_t sum_gates = 0;
  std::vector<std::size_t> rule2;
  for (std::size_t i = 0; i < t; ++i) {
    const PathPoint& p = tr.points[i];
    const PathPoint& q = tr.points[i + 1];
    const TraceStep& st = tr.steps[i];
    const Node& node = c.node(p.node);
    const std::vector<NodeId> kids = node.children();
    record("path.edge", i, std::find(kids.begin(), kids.end(), q.node) != kids.end(),
           "v_{i+1} must be a child of v_i");
    record("path.monotone", i, q.a <= p.a && q.b <= p.b, "a and b never grow");

    if (st.kind == StepKind::product) {
      const bool is_product = node.kind == NodeKind::product;
      record("step.kind", i, is_product, "product step at a non-product node");
      if (!is_product || !st.j || !st.side) continue;
      const std::size_t j = *st.j;
      const bool right = *st.side == KeptSide::right;
      const bool shape = j >= 1 &&
                         (right ? (q.node == node.right && q.a + j == p.a && q.b == p.b)
                                : (q.node == node.left && q.b + j == p.b && q.a == p.a && j + 1 <= p.b));
      record("step.product", i, shape, "exactly one of a, b drops by j >= 1 on the kept side");
      record("I3", i, pow2(2 * j) * q.rank >= p.rank,
             "r_{i+1} = " + std::to_string(q.rank) + " vs 2^{-2j} r_i with j = " + std::to_string(j));
      record("I3.selection", i, pow2(j + 1) * q.rank >= p.rank, "r_{i+1} >= 2^{-(j+1)} r_i");
      continue;
    }

    ++sum_gates;
    record("step.kind", i, node.kind == NodeKind::sum, "sum step at a non-sum node");
    record("step.sum", i, q.a == p.a && q.b == p.b, "sum steps keep a and b");
    const Threshold th(cfg.c, p.rank, n, cfg.alpha);
    std::vector<std::pair<NodeId, std::size_t>> child_ranks;
    for (NodeId u : distinct_children(node)) child_ranks.emplace_back(u, fresh_rank(u, p.a, p.b));
    const bool rule1_possible = std::any_of(child_ranks.begin(), child_ranks.end(),
                                            [&](const auto& e) { return th.reached(e.second, 0); });

    if (st.kind == StepKind::rule1) {
      record("I1", i, th.reached(q.rank, 0),
             "n r_{i+1}^2 >= c^2 r_i^2 with r_{i+1} = " + std::to_string(q.rank));
      continue;
    }

    rule2.push_back(i);
    record("rule2.rule1_failed", i, !rule1_possible, "Rule-2 is used only when no child reaches t_i");
    if (!st.k) {
      record("rule2.k", i, false, "Rule-2 step without k");
      continue;
    }
    const std::size_t k = *st.k;
    out.sum_k += k;
    record("I2", i, th.reached(q.rank, k + 1),
           "r_{i+1} = " + std::to_string(q.rank) + " vs alpha^{k+1} t_i with k = " + std::to_string(k));

    const std::vector<NodeId> expected = bucket(child_ranks, th, k);
    std::vector<NodeId> recorded = st.witness;
    std::sort(recorded.begin(), recorded.end());
    record("S.membership", i, recorded == expected, "S_{i+1} must equal N_{i,k}");
    record("rule2.mass", i, pow2(k + 1) * bucket_rank(child_ranks, expected) >= p.rank,
           "r_{i,k} >= 2^{-(k+1)} r_i");
    record("rule2.choice", i, std::binary_search(expected.begin(), expected.end(), q.node),
           "v_{i+1} is taken from N_{i,k}");
    const std::vector<bool> below_next = descendants(c, q.node);
    bool none_below = true;
    bool all_nonscalar = true;
    for (NodeId u : recorded) {
      if (u != q.node && below_next[u]) none_below = false;
      if (!(gates.product_class[u] && *gates.product_class[u] == GateClass::nonscalar)) all_nonscalar = false;
    }
    record("rule2.minimal", i, none_below, "no member of S_{i+1} is a descendant of v_{i+1}");
    record("S.nonscalar", i, all_nonscalar, "every member of S_{i+1} is a non-scalar product gate");

    // |N_{i,k}| > (sqrt(n) / 2c) (2 alpha)^{-k}  <=>  (2c |N| (2 alpha)^k)^2 > n.
    mpq_class lhs = mpq_class(2 * cfg.c) * static_cast<unsigned long>(recorded.size());
    for (std::size_t e = 0; e < k; ++e) lhs *= 2 * cfg.alpha;
    record("nik", i, lhs * lhs > n,
           "|S_{i+1}| = " + std::to_string(recorded.size()) + " vs (sqrt(n)/2c)(2 alpha)^{-k}");
  }

  // Witness sets: pairwise disjoint, and later sets sit below earlier picks.
  bool disjoint = true;
  bool nested = true;
  for (std::size_t x = 0; x < rule2.size(); ++x) {
    const std::vector<bool> below = descendants(c, tr.points[rule2[x] + 1].node);
    for (std::size_t y = x + 1; y < rule2.size(); ++y) {
      for (NodeId u : tr.steps[rule2[y]].witness) {
        const auto& sx = tr.steps[rule2[x]].witness;
        if (std::find(sx.begin(), sx.end(), u) != sx.end()) disjoint = false;
        if (!below[u]) nested = false;
      }
    }
  }
  record("S.disjoint", std::nullopt, disjoint, "the sets S_{i+1}, i in I2, are pairwise disjoint");
  record("S.descendants", std::nullopt, nested, "for i < i' in I2, S_{i'+1} lies below v_{i+1}");

  for (std::size_t i : tr.indices(StepKind::product)) {
    if (tr.steps[i].j) out.sum_j += *tr.steps[i].j;
  }
  record("sum_j", std::nullopt, out.sum_j <= cfg.d, "sum of j_i over I3 = " + std::to_string(out.sum_j));
  record("sum_gates", std::nullopt, sum_gates <= cfg.d, "|I1| + |I2| = " + std::to_string(sum_gates));

  std::size_t witness_total = 0;
  for (std::size_t i : rule2) witness_total += tr.steps[i].witness.size();
  out.witness_size = tr.witness_set().size();
  record("S.size", std::nullopt, witness_total == out.witness_size, "|S| = sum of |S_{i+1}|");

  // |S| > (sqrt(n) / 2c) sum_{I2} (2 alpha)^{-k_i}.
  if (!rule2.empty()) {
    mpq_class weight = 0;
    for (std::size_t i : rule2) {
      mpq_class w = 1;
      for (std::size_t e = 0; e < tr.steps[i].k.value_or(0); ++e) w /= 2 * cfg.alpha;
      weight += w;
    }
    const mpq_class lhs = mpq_class(2 * cfg.c) * static_cast<unsigned long>(out.witness_size);
    record("S.bound", std::nullopt, lhs * lhs > weight * weight * n,
           "|S| = " + std::to_string(out.witness_size) + " vs (sqrt(n)/2c) sum (2 alpha)^{-k_i}");
  } else {
    skip("S.bound", "no Rule-2 steps");
  }

  const std::size_t r0 = tr.points.front().rank;
  const std::size_t rt = tr.points.back().rank;
  if (r0 > 0) {
    mpq_class product = 1;
    for (std::size_t i = 0; i < t; ++i) {
      product *= mpq_class(static_cast<unsigned long>(tr.points[i + 1].rank),
                           static_cast<unsigned long>(tr.points[i].rank));
    }
    const mpq_class ratio(static_cast<unsigned long>(rt), static_cast<unsigned long>(r0));
    record("telescoping", std::nullopt, product == ratio,
           "r_t/r_0 = " + mpq_class(ratio).get_str() + ", product of step ratios = " + product.get_str());

    // r_t/r_0 >= c^m alpha^{sum (k_i+1)} 4^{-sum j} / n^{m/2}, m = |I1| + |I2|.
    mpq_class bound = 1;
    for (std::size_t i = 0; i < t; ++i) {
      const TraceStep& st = tr.steps[i];
      if (st.kind == StepKind::product) {
        bound /= pow2(2 * st.j.value_or(0));
        continue;
      }
      bound *= cfg.c;
      if (st.kind == StepKind::rule2) {
        for (std::size_t e = 0; e < st.k.value_or(0) + 1; ++e) bound *= cfg.alpha;
      }
    }
    mpz_class n_pow;
    mpz_ui_pow_ui(n_pow.get_mpz_t(), n, sum_gates);
    record("chain.lower", std::nullopt, ratio * ratio * n_pow >= bound * bound,
           "r_t/r_0 is at least the product of the per-step lower bounds");
  } else {
    skip("telescoping", "r_0 = 0");
    skip("chain.lower", "r_0 = 0");
  }

  mpz_class full;
  mpz_ui_pow_ui(full.get_mpz_t(), n, cfg.d / 2);
  out.full_rank_hypothesis = mpz_class(static_cast<unsigned long>(r0)) == full;
  out.sum_k_at_least_d = out.sum_k >= cfg.d;
  if (!out.full_rank_hypothesis) {
    skip("chain.upper", "hypothesis r_0 = n^{d/2} unmet (r_0 = " + std::to_string(r0) + ")");
    skip("closed_form", "hypothesis r_0 = n^{d/2} unmet (r_0 = " + std::to_string(r0) + ")");
  } else {
    record("chain.upper", std::nullopt, rt <= 1, "r_t / r_0 <= n^{-d/2}");
    // (alpha c / sqrt n)^{|I1|+|I2|} >= (alpha c / sqrt n)^d needs alpha c <= sqrt n.
    const mpq_class ac = cfg.alpha * cfg.c;
    if (ac * ac > n) {
      skip("closed_form", "(alpha c/4)^d alpha^{sum k} <= 1 is only implied when n >= (alpha c)^2 = " +
                              mpq_class(ac * ac).get_str() + "; sum k = " + std::to_string(out.sum_k) +
                              ", d = " + std::to_string(cfg.d));
    } else {
      mpq_class lhs = 1;
      for (std::size_t e = 0; e < cfg.d; ++e) lhs *= ac / 4;
      for (std::size_t e = 0; e < out.sum_k; ++e) lhs *= cfg.alpha;
      record("closed_form", std::nullopt, lhs <= 1,
             "(alpha c/4)^d alpha^{sum k} <= 1 with sum k = " + std::to_string(out.sum_k));
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const PathTrace& tr) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["c"] = tr.config.c;
  cfg["alpha"] = tr.config.alpha.get_str();
  cfg["d"] = tr.config.d;
  cfg["n"] = tr.config.n;
  j["config"] = cfg;
  j["t"] = tr.t();
  j["stop"] = stop_reason_name(tr.stop);
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const PathPoint& p = tr.points[i];
    nlohmann::ordered_json s;
    s["i"] = i;
    s["node"] = p.node;
    s["a"] = p.a;
    s["b"] = p.b;
    s["rank"] = p.rank;
    if (i < tr.steps.size()) {
      const TraceStep& st = tr.steps[i];
      s["kind"] = step_kind_name(st.kind);
      if (st.kind != StepKind::product) {
        s["threshold"] = std::to_string(tr.config.c) + "*" + std::to_string(p.rank) + "/sqrt(" +
                         std::to_string(tr.config.n) + ")";
        nlohmann::ordered_json cr = nlohmann::ordered_json::array();
        for (const auto& [u, r] : st.child_ranks) cr.push_back(nlohmann::ordered_json::array({u, r}));
        s["child_ranks"] = cr;
      }
      if (st.k) s["k"] = *st.k;
      if (st.kind == StepKind::rule2) s["S"] = st.witness;
      if (st.j) {
        s["j"] = *st.j;
        s["side"] = *st.side == KeptSide::left ? "left-kept" : "right-kept";
      }
      s["next"] = tr.points[i + 1].node;
    }
    steps.push_back(s);
  }
  j["steps"] = steps;
  j["I1"] = tr.indices(StepKind::rule1);
  j["I2"] = tr.indices(StepKind::rule2);
  j["I3"] = tr.indices(StepKind::product);
  j["S"] = tr.witness_set();
  return j;
}

nlohmann::ordered_json to_json(const TraceVerification& v) {
  nlohmann::ordered_json j;
  j["ok"] = v.ok();
  j["sum_k"] = v.sum_k;
  j["sum_j"] = v.sum_j;
  j["S_size"] = v.witness_size;
  j["full_rank_hypothesis"] = v.full_rank_hypothesis;
  j["sum_k_at_least_d"] = v.sum_k_at_least_d;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : v.checks) {
    nlohmann::ordered_json e;
    e["check"] = c.name;
    if (c.step) {
      e["step"] = *c.step;
    } else {
      e["step"] = nullptr;
    }
    e["status"] = c.status == CheckStatus::holds      ? "holds"
                  : c.status == CheckStatus::violated ? "violated"
                                                      : "not-applicable";
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["ledger"] = checks;
  return j;
}

}  // namespace ncclab
