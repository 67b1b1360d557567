#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "ncclab/circuit.hpp"

namespace ncclab {

/// Walk parameters. c and alpha default to 64 and 1/4; d is the even target
/// degree and n the alphabet size (0 = take it from the circuit).
struct TraceConfig {
  std::uint64_t c = 64;
  mpq_class alpha{1, 4};
  std::size_t d = 2;
  std::size_t n = 0;

  /// Throws PreconditionError on c = 0, alpha outside (0,1), odd or zero d.
  void validate() const;
};

/// Parses "p/q" (or "p") into alpha.
mpq_class parse_alpha(const std::string& text);

enum class StepKind { rule1, rule2, product };
enum class KeptSide { left, right };
enum class StopReason { rank, leaf, degree_exhausted };

const char* step_kind_name(StepKind k);
const char* stop_reason_name(StopReason s);

/// Position v_i on the path with its lengths and rank.
struct PathPoint {
  NodeId node = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t rank = 0;
};

/// Transition v_i -> v_{i+1}.
struct TraceStep {
  StepKind kind = StepKind::rule1;
  /// Sum steps: distinct children of v_i with rank(M_u^{a_i,b_i}), by id.
  std::vector<std::pair<NodeId, std::size_t>> child_ranks;
  /// Rule-2 only: k_i and S_{i+1} = N_{i,k} (ascending ids).
  std::optional<std::size_t> k;
  std::vector<NodeId> witness;
  /// Product steps only.
  std::optional<std::size_t> j;
  std::optional<KeptSide> side;
};

struct PathTrace {
  TraceConfig config;
  std::vector<PathPoint> points;  // v_0 .. v_t
  std::vector<TraceStep> steps;   // t entries
  StopReason stop = StopReason::rank;

  std::size_t t() const { return steps.size(); }
  std::vector<std::size_t> indices(StepKind k) const;  // I1, I2, I3
  /// Union of the Rule-2 witness sets, ascending.
  std::vector<NodeId> witness_set() const;
};

/// Requires a circuit satisfying P1..P5 (PreconditionError otherwise). Throws
/// InvariantViolation if no admissible k or j exists at some step.
PathTrace trace_path(const Circuit& c, TraceConfig cfg);

enum class CheckStatus { holds, violated, not_applicable };

struct TraceCheck {
  std::string name;
  std::optional<std::size_t> step;
  CheckStatus status = CheckStatus::holds;
  std::string detail;
};

struct TraceVerification {
  std::vector<TraceCheck> checks;
  std::size_t sum_k = 0;
  std::size_t sum_j = 0;
  std::size_t witness_size = 0;
  bool full_rank_hypothesis = false;  // r_0 = n^{d/2}
  bool sum_k_at_least_d = false;

  bool ok() const;
  const TraceCheck* find(const std::string& name) const;
};

/// Re-derives every quantity from the circuit and checks the step
/// inequalities, witness-set structure, accounting identities and (when
/// r_0 = n^{d/2}) the closed-form conclusion.
TraceVerification verify_trace(const PathTrace& tr, const Circuit& c);

nlohmann::ordered_json to_json(const PathTrace& tr);
nlohmann::ordered_json to_json(const TraceVerification& v);

}  // namespace ncclab
