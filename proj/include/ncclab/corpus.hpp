#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ncclab/circuit.hpp"

namespace ncclab {

struct CorpusLimits {
  std::size_t max_vars = 4;
  std::size_t max_degree = 6;
  std::size_t max_nodes = 40;

  /// Hard caps: 8 variables, degree 12, 200 nodes.
  void validate() const;
};

/// Fields cycle through Q, GF(2), GF(101) by corpus index.
Field corpus_field(std::size_t index);

/// Random single-sink field circuit within the limits whose polynomial has a
/// nonzero positive part. Deterministic in (seed, limits, field).
Circuit random_circuit(std::uint64_t seed, const CorpusLimits& limits, Field field);

/// Per-entry seed derived from the corpus seed.
std::uint64_t entry_seed(std::uint64_t corpus_seed, std::size_t index);

std::vector<Circuit> generate_corpus(std::uint64_t seed, std::size_t count, const CorpusLimits& limits);

/// {"seed", "count", "limits", "entries": [{"index", "file", "field", "x_vars",
/// "nodes", "counts", "degree", "poly_sha256"}], "ledger_sha256"}.
nlohmann::ordered_json corpus_ledger(std::uint64_t seed, const CorpusLimits& limits,
                                     const std::vector<Circuit>& circuits);

std::string corpus_file_name(std::size_t index);

}  // namespace ncclab
