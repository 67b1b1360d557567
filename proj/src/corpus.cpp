#include "ncclab/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>

#include "ncclab/circuit_io.hpp"
#include "ncclab/errors.hpp"
#include "ncclab/report.hpp"

namespace ncclab {

void CorpusLimits::validate() const {
  if (max_vars == 0 || max_vars > 8) throw PreconditionError("corpus: max-vars must be in 1..8");
  if (max_degree == 0 || max_degree > 12) throw PreconditionError("corpus: max-degree must be in 1..12");
  if (max_nodes < 4 || max_nodes > 200) throw PreconditionError("corpus: max-nodes must be in 4..200");
}

Field corpus_field(std::size_t index) {
  switch (index % 3) {
    case 0: return Field::rationals();
    case 1: return Field::prime(2);
    default: return Field::prime(101);
  }
}

namespace {

FieldElem random_scalar(const Field& f, std::mt19937_64& rng) {
  if (!f.is_rational()) {
    const std::uint64_t p = f.modulus();
    return FieldElem::from_int(f, static_cast<long>(1 + rng() % std::min<std::uint64_t>(p - 1, 7)));
  }
  static const char* const kValues[] = {"1", "1", "-1", "2", "3", "-2", "1/2", "-3/4"};
  return FieldElem::parse(f, kValues[rng() % 8]);
}

FieldElem random_constant(const Field& f, std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return FieldElem::zero(f);
    case 1: return FieldElem::one(f);
    default: return random_scalar(f, rng);
  }
}

class Builder {
 public:
  Builder(std::uint64_t seed, const CorpusLimits& limits, Field field)
      : rng_(seed), limits_(limits), c_(field, 1 + rng_() % limits.max_vars) {}

  Circuit build() {
    const std::size_t n = c_.x_vars();
    for (std::size_t i = 1; i <= n; ++i) push(c_.add_input(i), 1);
    const std::size_t consts = 1 + rng_() % 2;
    for (std::size_t i = 0; i < consts; ++i) push(c_.add_scalar(random_constant(c_.field(), rng_)), 0);

    const std::size_t lo = std::min(limits_.max_nodes - 1, n + consts + 2);
    const std::size_t target = lo + rng_() % (limits_.max_nodes - lo);
    while (c_.node_count() < target) {
      const unsigned roll = rng_() % 20;
      if (roll < 2) {
        push(c_.add_scalar(random_constant(c_.field(), rng_)), 0);
      } else if (roll < 11 && add_product()) {
        continue;
      } else {
        add_sum();
      }
    }
    const std::vector<NodeId> sinks = c_.sinks();
    if (sinks.size() > 1 || c_.node(sinks.front()).is_leaf()) {
      std::vector<SumArg> args;
      for (NodeId s : sinks) args.push_back({s, random_scalar(c_.field(), rng_)});
      c_.add_sum(std::move(args));
    } else {
      c_.set_output(sinks.front());
    }
    return c_;
  }

 private:
  void push(NodeId id, std::size_t deg) {
    if (degree_.size() <= id) degree_.resize(id + 1);
    degree_[id] = deg;
  }

  NodeId pick() {
    const std::size_t size = c_.node_count();
    if (rng_() % 2) return static_cast<NodeId>(rng_() % size);
    const std::size_t window = std::min<std::size_t>(size, 5);
    return static_cast<NodeId>(size - 1 - rng_() % window);
  }

  bool add_product() {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const NodeId l = pick();
      const NodeId r = pick();
      if (degree_[l] + degree_[r] <= limits_.max_degree) {
        push(c_.add_product(l, r), degree_[l] + degree_[r]);
        return true;
      }
    }
    return false;
  }

  void add_sum() {
    const std::size_t arity = 1 + rng_() % 3;
    std::vector<SumArg> args;
    std::size_t deg = 0;
    for (std::size_t i = 0; i < arity; ++i) {
      const NodeId u = pick();
      args.push_back({u, random_scalar(c_.field(), rng_)});
      deg = std::max(deg, degree_[u]);
    }
    push(c_.add_sum(std::move(args)), deg);
  }

  std::mt19937_64 rng_;
  CorpusLimits limits_;
  Circuit c_;
  std::vector<std::size_t> degree_;
};

}  // namespace

Circuit random_circuit(std::uint64_t seed, const CorpusLimits& limits, Field field) {
  limits.validate();
  std::mt19937_64 reseed(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Circuit c = Builder(reseed(), limits, field).build();
    if (!positive_part(compute_polynomial(c)).is_zero()) return c;
  }
  throw InvariantViolation("corpus: no circuit with a nonzero positive part after 1000 attempts");
}

std::uint64_t entry_seed(std::uint64_t corpus_seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(corpus_seed), static_cast<std::uint32_t>(corpus_seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

std::vector<Circuit> generate_corpus(std::uint64_t seed, std::size_t count, const CorpusLimits& limits) {
  limits.validate();
  std::vector<Circuit> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_circuit(entry_seed(seed, i), limits, corpus_field(i)));
  }
  return out;
}

std::string corpus_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%04zu.json", index);
  return buf;
}

nlohmann::ordered_json corpus_ledger(std::uint64_t seed, const CorpusLimits& limits,
                                     const std::vector<Circuit>& circuits) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["count"] = circuits.size();
  j["limits"] = {{"max_vars", limits.max_vars}, {"max_degree", limits.max_degree},
                 {"max_nodes", limits.max_nodes}};
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const Circuit& c = circuits[i];
    const NcPoly f = compute_polynomial(c);
    const GateCounts k = classify_gates(c).counts;
    nlohmann::ordered_json e;
    e["index"] = i;
    e["file"] = corpus_file_name(i);
    e["field"] = c.field().name();
    e["x_vars"] = c.x_vars();
    e["nodes"] = c.node_count();
    e["counts"] = {{"sums", k.sums}, {"products", k.products}, {"nonscalar", k.nonscalar},
                   {"size", k.size}, {"depth", k.depth}};
    e["degree"] = f.degree() ? nlohmann::ordered_json(*f.degree()) : nlohmann::ordered_json(nullptr);
    e["poly_sha256"] = sha256_hex(to_text(f));
    entries.push_back(e);
  }
  j["entries"] = entries;
  j["ledger_sha256"] = sha256_hex(entries.dump());
  return j;
}

}  // namespace ncclab
