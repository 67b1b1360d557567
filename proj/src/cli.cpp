#include "ncclab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "ncclab/circuit_io.hpp"
#include "ncclab/corpus.hpp"
#include "ncclab/errors.hpp"
#include "ncclab/hardpoly.hpp"
#include "ncclab/nisan.hpp"
#include "ncclab/normalize.hpp"
#include "ncclab/pathtrace.hpp"
#include "ncclab/report.hpp"
#include "ncclab/ringtrans.hpp"

namespace ncclab {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << data)) throw Error("cannot write '" + path + "'");
}

std::size_t matrix_guard() {
  const char* env = std::getenv("NCCLAB_GUARD_ENTRIES");
  if (env == nullptr || *env == '\0') return kDefaultMatrixGuard;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || env[0] == '-' || v == 0) {
    throw Error("NCCLAB_GUARD_ENTRIES must be a positive integer, got '" + std::string(env) + "'");
  }
  return static_cast<std::size_t>(v);
}

struct Loaded {
  Circuit circuit;
  std::string hash;
};

Loaded load_circuit(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return {parse_circuit(text), sha256_hex(text)};
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Result documents: the manifest first, then the subcommand payload.
struct Output {
  RunManifest manifest;
  ordered_json result = ordered_json::object();
  std::string report_path;
  // Exit status after the report is written; 2 flags a violated invariant.
  int status = 0;
  std::string failure;
};

void emit(const Output& o, std::ostream& out) {
  ordered_json doc;
  doc["manifest"] = to_json(o.manifest);
  doc["result"] = o.result;
  const std::string text = doc.dump(2) + "\n";
  if (o.report_path.empty()) {
    out << text;
  } else {
    write_file(o.report_path, text);
  }
}

ordered_json counts_json(const Circuit& c) { return to_json(classify_gates(c).counts); }

// ---------------------------------------------------------------------------

struct ParseArgs {
  std::string in, out, report;
};

Output cmd_parse(const ParseArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  o.manifest.subcommand = "parse";
  o.manifest.inputs = {{a.in, l.hash}};
  const Circuit& c = l.circuit;
  o.result["field"] = c.field().name();
  o.result["x_vars"] = c.x_vars();
  o.result["z_vars"] = c.z_vars();
  o.result["nodes"] = c.node_count();
  o.result["output"] = c.output();
  o.result["counts"] = counts_json(c);
  if (!c.is_ring()) o.result["properties"] = to_json(check_properties(c));
  if (!a.out.empty()) write_file(a.out, write_circuit(c));
  o.manifest.outcome["valid"] = true;
  return o;
}

struct EvalArgs {
  std::string in, out, report;
};

Output cmd_eval(const EvalArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  o.manifest.subcommand = "eval";
  o.manifest.inputs = {{a.in, l.hash}};
  const NcPoly f = compute_polynomial(l.circuit);
  o.result["polynomial"] = terms_to_text(f);
  o.result["degree"] = f.degree() ? ordered_json(*f.degree()) : ordered_json(nullptr);
  o.result["terms"] = f.size();
  o.result["poly_sha256"] = sha256_hex(to_text(f));
  if (!a.out.empty()) write_file(a.out, to_text(f));
  o.manifest.outcome["terms"] = f.size();
  return o;
}

struct NormalizeArgs {
  std::string in, out, report;
};

Output cmd_normalize(const NormalizeArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  o.manifest.subcommand = "normalize";
  o.manifest.inputs = {{a.in, l.hash}};
  const Normalized n = normalize(l.circuit);
  const std::string text = write_circuit(n.circuit);
  write_file(a.out, text);
  o.result = to_json(n.report);
  o.result["output_sha256"] = sha256_hex(text);
  o.manifest.outcome["properties"] = n.report.properties.all();
  o.manifest.outcome["nonscalar_before"] = n.report.before.nonscalar;
  o.manifest.outcome["nonscalar_after"] = n.report.after.nonscalar;
  return o;
}

struct RankArgs {
  std::string in, report;
  std::size_t a = 0, b = 0;
  std::optional<NodeId> node;
  bool check_gates = false;
};

Output cmd_rank(const RankArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  const Circuit& c = l.circuit;
  o.manifest.subcommand = "rank";
  o.manifest.inputs = {{a.in, l.hash}};
  o.manifest.config = {{"a", a.a}, {"b", a.b}, {"field", c.field().name()}, {"n", c.x_vars()}};
  if (c.is_ring()) throw PreconditionError("rank: ring circuits must be translated first");
  const std::size_t guard = matrix_guard();
  require_within_guard(c.x_vars(), a.a, a.b, guard);

  const NodeId v = a.node.value_or(c.output());
  if (v >= c.node_count()) throw PreconditionError("rank: no node " + std::to_string(v));
  const std::vector<NcPoly> f = node_polynomials(c);
  const NisanMatrix m = build_matrix(f[v], a.a, a.b);
  const RankResult r = rank(m);
  if (!certify_rank(m, r)) throw InvariantViolation("rank: pivot minor is singular");
  o.result["node"] = v;
  o.result["nonzero_entries"] = m.entries().size();
  o.result["rank"] = to_json(r);
  o.manifest.outcome["rank"] = r.rank;

  if (a.check_gates) {
    const std::size_t total = a.a + a.b;
    for (std::size_t s = 0; s <= total; ++s) require_within_guard(c.x_vars(), s, 0, guard);
    const RankTable table = compute_rank_table(f, total);
    const std::vector<GateCheck> checks = check_gates(c, f, table, all_gate_jobs(c, total));
    ordered_json rows = ordered_json::array();
    std::size_t violations = 0;
    for (const auto& g : checks) {
      if (!g.ok()) ++violations;
      rows.push_back(to_json(g));
    }
    o.result["gates"] = rows;
    o.result["violations"] = violations;
    o.manifest.outcome["gate_checks"] = checks.size();
    o.manifest.outcome["violations"] = violations;
    if (violations > 0) {
      o.status = 2;
      o.failure = std::to_string(violations) + " gate inequality violation(s)";
    }
  }
  return o;
}

struct TraceArgs {
  std::string in, report, alpha = "1/4";
  std::size_t d = 0, n = 0;
  std::uint64_t c = 64;
};

Output cmd_trace(const TraceArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  TraceConfig cfg;
  cfg.c = a.c;
  cfg.alpha = parse_alpha(a.alpha);
  cfg.d = a.d;
  cfg.n = a.n;
  o.manifest.subcommand = "trace";
  o.manifest.inputs = {{a.in, l.hash}};
  o.manifest.config = {{"c", cfg.c}, {"alpha", cfg.alpha.get_str()}, {"d", cfg.d},
                       {"n", l.circuit.x_vars()}, {"field", l.circuit.field().name()}};
  cfg.validate();
  require_within_guard(l.circuit.x_vars(), cfg.d / 2, cfg.d / 2, matrix_guard());

  const PathTrace tr = trace_path(l.circuit, cfg);
  const TraceVerification v = verify_trace(tr, l.circuit);
  o.result["trace"] = to_json(tr);
  o.result["verification"] = to_json(v);
  o.manifest.outcome = {{"t", tr.t()}, {"S_size", v.witness_size}, {"sum_k", v.sum_k},
                        {"verified", v.ok()}};
  if (!v.ok()) {
    o.status = 2;
    std::string names;
    for (const auto& ch : v.checks) {
      if (ch.status == CheckStatus::violated) names += (names.empty() ? "" : ", ") + ch.name;
    }
    o.failure = "trace verification failed: " + names;
  }
  return o;
}

struct HardpolyArgs {
  std::size_t n = 0, d = 0, z_noise = 0;
  std::uint64_t seed = 0;
  std::string field = "Q", emit_circuit, emit_poly, report;
};

Output cmd_hardpoly(const HardpolyArgs& a) {
  Output o;
  o.report_path = a.report;
  const Field field = parse_field_name(a.field);
  o.manifest.subcommand = "hardpoly";
  o.manifest.config = {{"n", a.n}, {"d", a.d}, {"field", field.name()}};
  if (a.z_noise > 0) {
    o.manifest.config["z_noise"] = a.z_noise;
    o.manifest.config["seed"] = a.seed;
  }
  const HardPolySpec spec{a.n, a.d};
  const NcPoly f = palindrome_poly(spec, field, matrix_guard());
  const RankResult r = rank(build_matrix(f, a.d / 2, a.d / 2));
  const std::size_t full = logical_entries(a.n, a.d / 2, 0);
  o.result["terms"] = f.size();
  o.result["poly_sha256"] = sha256_hex(to_text(f));
  o.result["rank"] = r.rank;
  o.result["full_rank"] = full;
  if (f.size() <= 64) o.result["polynomial"] = terms_to_text(f);

  if (!a.emit_poly.empty()) write_file(a.emit_poly, to_text(f));
  if (!a.emit_circuit.empty()) {
    Circuit c = naive_circuit(f);
    o.result["naive_circuit"] = counts_json(c);
    if (a.z_noise > 0) c = inject_z_noise(c, a.z_noise, a.seed);
    write_file(a.emit_circuit, write_circuit(c));
  }
  o.manifest.outcome = {{"rank", r.rank}, {"full_rank", r.rank == full}};
  if (r.rank != full) {
    o.status = 2;
    o.failure = "palindrome matrix is not full rank";
  }
  return o;
}

struct TranslateArgs {
  std::string in, out, report;
};

Output cmd_translate(const TranslateArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  o.manifest.subcommand = "translate";
  o.manifest.inputs = {{a.in, l.hash}};
  const Circuit t = translate(l.circuit);
  const std::string text = write_circuit(t);
  write_file(a.out, text);
  o.result["before"] = counts_json(l.circuit);
  o.result["after"] = counts_json(t);
  o.result["polynomial"] = terms_to_text(compute_polynomial(t));
  o.result["output_sha256"] = sha256_hex(text);
  o.manifest.outcome["counts_preserved"] = true;
  return o;
}

struct VerifyRingArgs {
  std::string in, f, report;
  std::size_t samples = 8;
  std::uint64_t seed = 0;
};

Output cmd_verify_ring(const VerifyRingArgs& a) {
  Output o;
  o.report_path = a.report;
  const Loaded l = load_circuit(a.in);
  const Circuit& rc = l.circuit;
  const std::string ftext = read_file(a.f);
  const NcPoly f = parse_poly_text(ftext, Alphabet{rc.x_vars(), 0});
  if (!(f.field() == rc.field())) {
    throw FieldMismatch("polynomial over " + f.field().name() + ", circuit over " + rc.field().name());
  }
  o.manifest.subcommand = "verify-ring";
  o.manifest.inputs = {{a.in, l.hash}, {a.f, sha256_hex(ftext)}};
  o.manifest.config = {{"samples", a.samples}, {"seed", a.seed}, {"field", rc.field().name()}};
  const auto samples =
      random_samples(rc.field(), rc.x_vars(), std::max<std::size_t>(rc.z_vars(), 1), a.samples, a.seed);
  const AgreementReport r = check_function_agreement(rc, f, samples);
  o.result = to_json(r);
  o.manifest.outcome = {{"passed", r.passed()}, {"all_samples_agree", r.all_samples_agree()}};
  if (!r.passed()) {
    o.status = 1;
    o.failure = r.lemma.functional ? "g^0 differs from f"
                                   : "functional-equality hypothesis fails: g(z, z^D) != f(z^D)";
  }
  return o;
}

struct CorpusArgs {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::string out, report;
  CorpusLimits limits;
};

Output cmd_corpus(const CorpusArgs& a) {
  Output o;
  o.report_path = a.report;
  o.manifest.subcommand = "corpus";
  o.manifest.config = {{"seed", a.seed}, {"count", a.count}, {"max_vars", a.limits.max_vars},
                       {"max_degree", a.limits.max_degree}, {"max_nodes", a.limits.max_nodes}};
  const std::vector<Circuit> circuits = generate_corpus(a.seed, a.count, a.limits);
  std::filesystem::create_directories(a.out);
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    write_file((std::filesystem::path(a.out) / corpus_file_name(i)).string(), write_circuit(circuits[i]));
  }
  const ordered_json ledger = corpus_ledger(a.seed, a.limits, circuits);
  write_file((std::filesystem::path(a.out) / "ledger.json").string(), ledger.dump(2) + "\n");
  o.result["files"] = circuits.size();
  o.result["ledger_sha256"] = ledger["ledger_sha256"];
  o.manifest.outcome = {{"files", circuits.size()}, {"ledger_sha256", ledger["ledger_sha256"]}};
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-commutative circuit toolkit", "ncclab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::function<Output()> job;

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "Validate a circuit and print its summary");
  parse->add_option("--in", pa.in, "Circuit JSON")->required();
  parse->add_option("--out", pa.out, "Write the circuit back in canonical form");
  parse->add_option("--report", pa.report, "Report file (default stdout)");
  parse->callback([&] { job = [&] { return cmd_parse(pa); }; });

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Compute the output polynomial");
  eval->add_option("--in", ea.in, "Circuit JSON")->required();
  eval->add_option("--out", ea.out, "Polynomial text file");
  eval->add_option("--report", ea.report, "Report file (default stdout)");
  eval->callback([&] { job = [&] { return cmd_eval(ea); }; });

  NormalizeArgs na;
  auto* norm = app.add_subcommand("normalize", "Bring a circuit into the P1..P5 form");
  norm->add_option("--in", na.in, "Circuit JSON")->required();
  norm->add_option("--out", na.out, "Normalized circuit JSON")->required();
  norm->add_option("--report", na.report, "Report file (default stdout)");
  norm->callback([&] { job = [&] { return cmd_normalize(na); }; });

  RankArgs ra;
  auto* rk = app.add_subcommand("rank", "Rank of a coefficient matrix; optionally check every gate");
  rk->add_option("--in", ra.in, "Circuit JSON")->required();
  rk->add_option("--a", ra.a, "Row word length")->required();
  rk->add_option("--b", ra.b, "Column word length")->required();
  rk->add_option("--node", ra.node, "Node id (default: output)");
  rk->add_flag("--check-gates", ra.check_gates, "Check the rank inequalities for a'+b' <= a+b");
  rk->add_option("--report", ra.report, "Report file (default stdout)");
  rk->callback([&] { job = [&] { return cmd_rank(ra); }; });

  TraceArgs ta;
  auto* tr = app.add_subcommand("trace", "Backward path and witness set on a normalized circuit");
  tr->add_option("--in", ta.in, "Normalized circuit JSON")->required();
  tr->add_option("--d", ta.d, "Even target degree")->required();
  tr->add_option("--c", ta.c, "Constant c")->capture_default_str();
  tr->add_option("--alpha", ta.alpha, "Constant alpha as p/q")->capture_default_str();
  tr->add_option("--n", ta.n, "Alphabet size (must match the circuit)");
  tr->add_option("--report", ta.report, "Report file (default stdout)");
  tr->callback([&] { job = [&] { return cmd_trace(ta); }; });

  HardpolyArgs ha;
  auto* hp = app.add_subcommand("hardpoly", "Palindrome polynomial with a full-rank middle matrix");
  hp->add_option("--n", ha.n, "Alphabet size")->required();
  hp->add_option("--d", ha.d, "Even degree")->required();
  hp->add_option("--field", ha.field, "Q or GF(p)")->capture_default_str();
  hp->add_option("--emit-circuit", ha.emit_circuit, "Write the sum-of-monomials circuit");
  hp->add_option("--emit-poly", ha.emit_poly, "Write the polynomial as text");
  hp->add_option("--z-noise", ha.z_noise, "Emit a ring circuit with cancelling noise over this many Z letters");
  hp->add_option("--seed", ha.seed, "Noise seed")->capture_default_str();
  hp->add_option("--report", ha.report, "Report file (default stdout)");
  hp->callback([&] { job = [&] { return cmd_hardpoly(ha); }; });

  TranslateArgs xa;
  auto* tl = app.add_subcommand("translate", "Replace ring constants by their constant terms");
  tl->add_option("--in", xa.in, "Ring circuit JSON")->required();
  tl->add_option("--out", xa.out, "Field circuit JSON")->required();
  tl->add_option("--report", xa.report, "Report file (default stdout)");
  tl->callback([&] { job = [&] { return cmd_translate(xa); }; });

  VerifyRingArgs va;
  auto* vr = app.add_subcommand("verify-ring", "Check that a ring circuit computes f as a function");
  vr->add_option("--in", va.in, "Ring circuit JSON")->required();
  vr->add_option("--f", va.f, "Polynomial text file")->required();
  vr->add_option("--samples", va.samples, "Random samples")->capture_default_str();
  vr->add_option("--seed", va.seed, "Sample seed")->capture_default_str();
  vr->add_option("--report", va.report, "Report file (default stdout)");
  vr->callback([&] { job = [&] { return cmd_verify_ring(va); }; });

  CorpusArgs ca;
  auto* cp = app.add_subcommand("corpus", "Generate a deterministic random circuit corpus");
  cp->add_option("--seed", ca.seed, "Corpus seed")->required();
  cp->add_option("--count", ca.count, "Number of circuits")->required();
  cp->add_option("--out", ca.out, "Output directory")->required();
  cp->add_option("--max-vars", ca.limits.max_vars, "Largest alphabet size")->capture_default_str();
  cp->add_option("--max-degree", ca.limits.max_degree, "Largest output degree")->capture_default_str();
  cp->add_option("--max-nodes", ca.limits.max_nodes, "Largest node count")->capture_default_str();
  cp->add_option("--report", ca.report, "Report file (default stdout)");
  cp->callback([&] { job = [&] { return cmd_corpus(ca); }; });

  std::vector<const char*> argv{"ncclab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const Output o = job();
    emit(o, out);
    if (o.status != 0) err << "ncclab: " << o.failure << "\n";
    return o.status;
  } catch (const InvariantViolation& e) {
    err << "ncclab: invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "ncclab: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ncclab: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ncclab
