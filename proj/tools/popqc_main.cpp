// popqc: locally-optimal quantum circuit optimizer.
//
// Subcommands: optimize (rewrite a circuit), verify (check an optimized
// circuit against its original), bench (timing/scaling sweeps with CSV
// output). Every flag can also be set through an environment variable with
// the POPQC_ prefix, e.g. POPQC_OMEGA=400.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "popqc/external_oracle.hpp"
#include "popqc/optimizer.hpp"
#include "popqc/parallel.hpp"
#include "popqc/qasm.hpp"
#include "popqc/synthetic.hpp"
#include "popqc/verifier.hpp"

using namespace popqc;
using nlohmann::json;

namespace {

constexpr const char* kStatsSchema = "popqc-stats/1";
constexpr const char* kVerifySchema = "popqc-verify/1";
constexpr const char* kBenchSchema = "popqc-bench/1";

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitOracleError = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitNotEquivalent = 4;
constexpr int kExitNotOptimal = 5;

struct OracleSpec {
  std::string spec{"builtin"};
  double timeout_seconds{300.0};
  OracleTransport transport{OracleTransport::StdinStdout};
  unsigned max_concurrent{0};
  std::string working_directory;

  std::unique_ptr<Oracle> make() const {
    if (spec == "builtin") {
      return std::make_unique<BuiltinOracle>();
    }
    if (spec.rfind("exec:", 0) == 0) {
      ExternalOracleConfig config;
      config.command = spec.substr(5);
      config.timeout_seconds = timeout_seconds;
      config.transport = transport;
      config.max_concurrent = max_concurrent;
      config.working_directory = working_directory;
      return std::make_unique<ExternalOracle>(std::move(config));
    }
    throw CLI::ValidationError("--oracle", "expected 'builtin' or 'exec:COMMAND'");
  }
};

void add_oracle_flags(CLI::App* cmd, OracleSpec& oracle) {
  cmd->add_option("--oracle", oracle.spec, "Segment optimizer: builtin or exec:COMMAND")
      ->envname("POPQC_ORACLE")
      ->capture_default_str();
  cmd->add_option("--oracle-timeout", oracle.timeout_seconds,
                  "Per-call timeout in seconds for external oracles")
      ->envname("POPQC_ORACLE_TIMEOUT")
      ->capture_default_str();
  std::map<std::string, OracleTransport> transports{
      {"stdio", OracleTransport::StdinStdout},
      {"files", OracleTransport::TempFiles}};
  cmd->add_option("--transport", oracle.transport,
                  "External oracle transport: stdio or files")
      ->envname("POPQC_TRANSPORT")
      ->transform(CLI::CheckedTransformer(transports, CLI::ignore_case));
  cmd->add_option("--oracle-jobs", oracle.max_concurrent,
                  "Cap on concurrent oracle processes (0 = no cap)")
      ->envname("POPQC_ORACLE_JOBS");
  cmd->add_option("--oracle-cwd", oracle.working_directory,
                  "Working directory for the oracle process")
      ->envname("POPQC_ORACLE_CWD");
}

void write_stats_csv(std::ostream& out, const ParsedProgram& input,
                     const OptimizeResult& result, double wall_seconds,
                     unsigned threads) {
  out << "# " << kStatsSchema << "\n";
  out << "round,fingers_total,fingers_selected,oracle_calls,gates_removed,"
         "live_gates,potential,wall_s,oracle_s_cum\n";
  char buf[64];
  double oracle_cum = 0.0;
  for (const RoundStats& rs : result.rounds) {
    oracle_cum += rs.oracle_seconds;
    out << rs.round << ',' << rs.fingers_total << ',' << rs.fingers_selected << ','
        << rs.oracle_calls << ',' << rs.gates_removed << ',' << rs.live_gates << ','
        << rs.potential << ',';
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", rs.wall_seconds, oracle_cum);
    out << buf;
  }
  double reduction =
      input.gates.empty()
          ? 0.0
          : 100.0 * static_cast<double>(input.gates.size() - result.gates.size()) /
                static_cast<double>(input.gates.size());
  std::snprintf(buf, sizeof(buf), "%.4f", reduction);
  out << "# summary input_gates=" << input.gates.size()
      << " output_gates=" << result.gates.size() << " reduction_pct=" << buf
      << " rounds=" << result.rounds.size()
      << " oracle_calls=" << result.total_oracle_calls;
  double oracle_pct = wall_seconds > 0.0
                          ? 100.0 * result.oracle_seconds / (wall_seconds * threads)
                          : 0.0;
  std::snprintf(buf, sizeof(buf), " oracle_s=%.6f wall_s=%.6f oracle_time_pct=%.2f",
                result.oracle_seconds, wall_seconds, oracle_pct);
  out << buf << " converged=" << (result.converged ? 1 : 0) << "\n";
}

void write_stats_jsonl(std::ostream& out, const ParsedProgram& input,
                       const OptimizeResult& result, double wall_seconds,
                       unsigned threads) {
  double oracle_cum = 0.0;
  for (const RoundStats& rs : result.rounds) {
    oracle_cum += rs.oracle_seconds;
    json row{{"schema", kStatsSchema},
             {"type", "round"},
             {"round", rs.round},
             {"fingers_total", rs.fingers_total},
             {"fingers_selected", rs.fingers_selected},
             {"oracle_calls", rs.oracle_calls},
             {"gates_removed", rs.gates_removed},
             {"live_gates", rs.live_gates},
             {"potential", rs.potential},
             {"wall_s", rs.wall_seconds},
             {"oracle_s_cum", oracle_cum}};
    out << row.dump() << "\n";
  }
  double reduction =
      input.gates.empty()
          ? 0.0
          : 100.0 * static_cast<double>(input.gates.size() - result.gates.size()) /
                static_cast<double>(input.gates.size());
  double oracle_pct = wall_seconds > 0.0
                          ? 100.0 * result.oracle_seconds / (wall_seconds * threads)
                          : 0.0;
  json summary{{"schema", kStatsSchema},
               {"type", "summary"},
               {"input_gates", input.gates.size()},
               {"output_gates", result.gates.size()},
               {"reduction_pct", reduction},
               {"rounds", result.rounds.size()},
               {"oracle_calls", result.total_oracle_calls},
               {"oracle_s", result.oracle_seconds},
               {"wall_s", wall_seconds},
               {"oracle_time_pct", oracle_pct},
               {"converged", result.converged}};
  out << summary.dump() << "\n";
}

int run_optimize(const std::string& input_path, const std::string& output_path,
                 const OptimizerConfig& config, const OracleSpec& oracle_spec,
                 const std::string& stats_path, const std::string& stats_format) {
  ParsedProgram input;
  try {
    input = parse_qasm(read_text_file(input_path));
  } catch (const std::exception& e) {
    std::cerr << "popqc: error: " << input_path << ": " << e.what() << "\n";
    return kExitInputError;
  }
  if (input.gates.empty()) {
    std::cerr << "popqc: error: " << input_path << " has no gates to optimize\n";
    return kExitInputError;
  }

  std::unique_ptr<Oracle> oracle = oracle_spec.make();
  OptimizeResult result;
  auto t0 = std::chrono::steady_clock::now();
  try {
    result = optimize(*oracle, input.gates, input.num_qubits, config);
  } catch (const OracleError& e) {
    std::cerr << "popqc: oracle failure: " << e.what() << "\n";
    return kExitOracleError;
  }
  double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    write_text_file(output_path, serialize_qasm(ParsedProgram{input.num_qubits,
                                                              result.gates}));
  } catch (const std::exception& e) {
    std::cerr << "popqc: error: " << e.what() << "\n";
    return kExitInputError;
  }

  unsigned used_threads = config.threads.value_or(default_thread_count());
  if (used_threads == 0) used_threads = 1;
  if (!stats_path.empty()) {
    std::ofstream stats(stats_path, std::ios::trunc);
    if (!stats) {
      std::cerr << "popqc: error: cannot write " << stats_path << "\n";
      return kExitInputError;
    }
    if (stats_format == "jsonl") {
      write_stats_jsonl(stats, input, result, wall_seconds, used_threads);
    } else {
      write_stats_csv(stats, input, result, wall_seconds, used_threads);
    }
  }

  double reduction =
      100.0 * static_cast<double>(input.gates.size() - result.gates.size()) /
      static_cast<double>(input.gates.size());
  // oracle_seconds sums per-call durations across workers, so normalize by
  // the thread count to get a share of compute capacity.
  double oracle_pct =
      wall_seconds > 0.0
          ? 100.0 * result.oracle_seconds / (wall_seconds * used_threads)
          : 0.0;
  std::fprintf(stderr,
               "popqc: %zu -> %zu gates (%.2f%% reduction), %zu rounds, "
               "%zu oracle calls, %.2fs (%.1f%% in oracle)\n",
               input.gates.size(), result.gates.size(), reduction,
               result.rounds.size(), result.total_oracle_calls, wall_seconds,
               oracle_pct);

  if (!result.converged) {
    std::cerr << "popqc: stopped at the round cap before reaching local optimality\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int run_verify(const std::string& original_path, const std::string& optimized_path,
               std::size_t omega, const OracleSpec& oracle_spec, unsigned threads,
               std::uint32_t qubit_cap, double tolerance,
               const std::string& report_path) {
  ParsedProgram original, optimized;
  try {
    original = parse_qasm(read_text_file(original_path));
    optimized = parse_qasm(read_text_file(optimized_path));
  } catch (const std::exception& e) {
    std::cerr << "popqc: error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::unique_ptr<Oracle> oracle = oracle_spec.make();
  json report{{"schema", kVerifySchema},
              {"original", original_path},
              {"optimized", optimized_path},
              {"omega", omega}};

  bool equivalence_failed = false;
  if (original.num_qubits != optimized.num_qubits) {
    report["equivalence"] = {{"checked", true},
                             {"equivalent", false},
                             {"reason", "qubit counts differ"}};
    equivalence_failed = true;
  } else if (original.num_qubits <= qubit_cap) {
    EquivalenceResult eq;
    try {
      eq = check_equivalence(original.num_qubits, original.gates, optimized.gates,
                             tolerance, qubit_cap);
    } catch (const std::exception& e) {
      std::cerr << "popqc: error: " << e.what() << "\n";
      return kExitInputError;
    }
    report["equivalence"] = {{"checked", true},
                             {"equivalent", eq.equivalent},
                             {"deviation", eq.deviation},
                             {"tolerance", tolerance}};
    equivalence_failed = !eq.equivalent;
  } else {
    report["equivalence"] = {{"checked", false},
                             {"reason", "qubit count above the dense cap"},
                             {"cap", qubit_cap}};
  }

  bool optimality_failed = false;
  if (optimized.gates.empty()) {
    report["local_optimality"] = {{"checked", true},
                                  {"locally_optimal", true},
                                  {"windows_checked", 0}};
  } else {
    LocalOptimalityReport lo;
    try {
      lo = check_local_optimality(*oracle, optimized.num_qubits, optimized.gates,
                                  omega, threads);
    } catch (const OracleError& e) {
      std::cerr << "popqc: oracle failure: " << e.what() << "\n";
      return kExitOracleError;
    }
    json violations = json::array();
    for (const OptimalityViolation& v : lo.violations) {
      violations.push_back({{"start_rank", v.start_rank},
                            {"window_length", v.window_length},
                            {"reduced_to", v.reduced_to}});
    }
    report["local_optimality"] = {{"checked", true},
                                  {"locally_optimal", lo.locally_optimal()},
                                  {"windows_checked", lo.windows_checked},
                                  {"violations", violations}};
    optimality_failed = !lo.locally_optimal();
  }

  // Structural audit: rebuild the index tree over the optimized gates.
  bool audit_ok = true;
  if (!optimized.gates.empty()) {
    Circuit c(optimized.gates, optimized.num_qubits);
    audit_ok = c.audit();
  }
  report["audits"] = {{"index_tree", audit_ok ? "pass" : "fail"}};

  std::string text = report.dump(2);
  if (!report_path.empty()) {
    write_text_file(report_path, text + "\n");
  } else {
    std::cout << text << "\n";
  }

  if (equivalence_failed || !audit_ok) return kExitNotEquivalent;
  if (optimality_failed) return kExitNotOptimal;
  return kExitOk;
}

struct BenchCase {
  std::string name;
  ParsedProgram program;
};

int run_bench(const std::vector<std::string>& circuit_paths, bool synthetic,
              const std::vector<std::size_t>& sizes, std::uint32_t qubits,
              double density, std::uint64_t seed,
              const std::vector<unsigned>& thread_list, std::size_t omega,
              const OracleSpec& oracle_spec, std::optional<std::size_t> max_rounds,
              const std::string& output_path) {
  std::vector<BenchCase> cases;
  for (const std::string& path : circuit_paths) {
    try {
      cases.push_back(BenchCase{path, parse_qasm(read_text_file(path))});
    } catch (const std::exception& e) {
      std::cerr << "popqc: skipping " << path << ": " << e.what() << "\n";
    }
  }
  if (synthetic) {
    for (std::size_t n : sizes) {
      SyntheticConfig sc;
      sc.num_qubits = qubits;
      sc.num_gates = n;
      sc.pair_density = density;
      sc.seed = seed;
      std::ostringstream name;
      name << "synthetic(q=" << qubits << ",d=" << density << ",seed=" << seed
           << ",n=" << n << ")";
      cases.push_back(BenchCase{name.str(), ParsedProgram{qubits, generate_synthetic(sc)}});
    }
  }
  if (cases.empty()) {
    std::cerr << "popqc: error: nothing to benchmark (pass files or --synthetic)\n";
    return kExitInputError;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!output_path.empty()) {
    file.open(output_path, std::ios::trunc);
    if (!file) {
      std::cerr << "popqc: error: cannot write " << output_path << "\n";
      return kExitInputError;
    }
    out = &file;
  }

  *out << "# " << kBenchSchema << "\n";
  *out << "benchmark,n_gates,n_qubits,omega,threads,status,seconds,rounds,"
          "oracle_calls,reduction_pct,oracle_time_pct,speedup_vs_1t\n";

  std::unique_ptr<Oracle> oracle = oracle_spec.make();
  for (const BenchCase& bench : cases) {
    double t1_seconds = 0.0;
    for (unsigned threads : thread_list) {
      *out << '"' << bench.name << '"' << ',' << bench.program.gates.size() << ','
           << bench.program.num_qubits << ',' << omega << ',' << threads << ',';
      OptimizerConfig config;
      config.omega = omega;
      config.threads = threads;
      config.max_rounds = max_rounds;
      try {
        auto t0 = std::chrono::steady_clock::now();
        OptimizeResult result =
            optimize(*oracle, bench.program.gates, bench.program.num_qubits, config);
        double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0).count();
        if (threads == 1) t1_seconds = seconds;
        double reduction =
            100.0 *
            static_cast<double>(bench.program.gates.size() - result.gates.size()) /
            static_cast<double>(bench.program.gates.size());
        // Share of compute capacity spent inside the oracle.
        double oracle_pct =
            seconds > 0.0
                ? 100.0 * result.oracle_seconds / (seconds * threads)
                : 0.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%zu,%zu,%.4f,%.2f",
                      result.converged ? "ok" : "round-cap", seconds,
                      result.rounds.size(), result.total_oracle_calls, reduction,
                      oracle_pct);
        *out << buf;
        if (t1_seconds > 0.0 && seconds > 0.0) {
          std::snprintf(buf, sizeof(buf), ",%.3f", t1_seconds / seconds);
          *out << buf;
        } else {
          *out << ',';
        }
        *out << "\n";
      } catch (const std::exception& e) {
        std::string what = e.what();
        for (char& ch : what) {
          if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        }
        *out << "error:" << what << ",,,,,," << "\n";
      }
      out->flush();
    }
  }
  return kExitOk;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(std::stoull(token));
  }
  return out;
}

std::vector<unsigned> parse_thread_list(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "max") {
      out.push_back(default_thread_count());
    } else if (!token.empty()) {
      out.push_back(static_cast<unsigned>(std::stoul(token)));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"popqc: parallel locally-optimal quantum circuit optimizer"};
  app.require_subcommand(1);

  // --- optimize ---
  auto* opt = app.add_subcommand("optimize", "Optimize an OpenQASM 2.0 circuit");
  std::string in_path, out_path, stats_path;
  std::string stats_format = "csv";
  OptimizerConfig config;
  long long max_rounds = -1;
  unsigned threads = 0;
  std::uint64_t seed = 1;  // accepted for manifest compatibility; builtin runs
                           // are deterministic and ignore it
  OracleSpec oracle_spec;
  opt->add_option("input", in_path, "Input .qasm file")->required();
  opt->add_option("-o,--output", out_path, "Output .qasm file")->required();
  opt->add_option("--omega", config.omega, "Segment radius")
      ->envname("POPQC_OMEGA")
      ->capture_default_str();
  opt->add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->envname("POPQC_THREADS");
  opt->add_option("--max-rounds", max_rounds, "Round cap (-1 = unlimited)")
      ->envname("POPQC_MAX_ROUNDS");
  opt->add_option("--stats", stats_path, "Write per-round stats to this path")
      ->envname("POPQC_STATS");
  opt->add_option("--format", stats_format, "Stats format: csv or jsonl")
      ->envname("POPQC_FORMAT")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  opt->add_option("--seed", seed, "Seed recorded in the manifest")
      ->envname("POPQC_SEED");
  opt->add_flag("--check-invariants", config.check_tracking_invariant,
                "Rescan all windows after every round (slow; debugging)");
  add_oracle_flags(opt, oracle_spec);

  // --- verify ---
  auto* ver = app.add_subcommand(
      "verify", "Check an optimized circuit against the original");
  std::string original_path, optimized_path, report_path;
  std::size_t ver_omega = 200;
  unsigned ver_threads = 0;
  std::uint32_t qubit_cap = kDefaultQubitCap;
  double tolerance = 1e-9;
  OracleSpec ver_oracle;
  ver->add_option("original", original_path, "Original .qasm file")->required();
  ver->add_option("optimized", optimized_path, "Optimized .qasm file")->required();
  ver->add_option("--omega", ver_omega, "Window width for the optimality scan")
      ->envname("POPQC_OMEGA")
      ->capture_default_str();
  ver->add_option("--threads", ver_threads, "Scan threads (0 = all cores)")
      ->envname("POPQC_THREADS");
  ver->add_option("--qubit-cap", qubit_cap,
                  "Dense equivalence limit in qubits")
      ->envname("POPQC_QUBIT_CAP")
      ->capture_default_str();
  ver->add_option("--tolerance", tolerance, "Equivalence tolerance (max-norm)")
      ->capture_default_str();
  ver->add_option("--report", report_path, "Write the JSON report here instead of stdout");
  add_oracle_flags(ver, ver_oracle);

  // --- bench ---
  auto* bench = app.add_subcommand("bench", "Timing and scaling sweeps (CSV)");
  std::vector<std::string> bench_circuits;
  bool bench_synthetic = false;
  std::string bench_sizes = "10000";
  std::uint32_t bench_qubits = 8;
  double bench_density = 0.3;
  std::uint64_t bench_seed = 1;
  std::string bench_threads = "0";
  std::size_t bench_omega = 200;
  long long bench_max_rounds = -1;
  std::string bench_output;
  OracleSpec bench_oracle;
  bench->add_option("circuits", bench_circuits, "QASM files to benchmark");
  bench->add_flag("--synthetic", bench_synthetic,
                  "Benchmark seeded synthetic circuits");
  bench->add_option("--gates", bench_sizes, "Synthetic sizes, comma-separated")
      ->capture_default_str();
  bench->add_option("--qubits", bench_qubits, "Synthetic qubit count")
      ->capture_default_str();
  bench->add_option("--density", bench_density,
                    "Planted cancellation-pair density in [0,1]")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Synthetic generator seed")
      ->envname("POPQC_SEED")
      ->capture_default_str();
  bench->add_option("--threads-list", bench_threads,
                    "Comma-separated thread counts; 'max' = all cores, 0 = all cores")
      ->envname("POPQC_THREADS")
      ->capture_default_str();
  bench->add_option("--omega", bench_omega, "Segment radius")
      ->envname("POPQC_OMEGA")
      ->capture_default_str();
  bench->add_option("--max-rounds", bench_max_rounds, "Round cap (-1 = unlimited)");
  bench->add_option("--output", bench_output, "CSV output path (default stdout)");
  add_oracle_flags(bench, bench_oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt->parsed()) {
      config.threads = threads == 0 ? std::optional<unsigned>{} : threads;
      if (max_rounds >= 0) config.max_rounds = static_cast<std::size_t>(max_rounds);
      return run_optimize(in_path, out_path, config, oracle_spec, stats_path,
                          stats_format);
    }
    if (ver->parsed()) {
      unsigned t = ver_threads == 0 ? default_thread_count() : ver_threads;
      return run_verify(original_path, optimized_path, ver_omega, ver_oracle, t,
                        qubit_cap, tolerance, report_path);
    }
    if (bench->parsed()) {
      std::vector<unsigned> thread_list = parse_thread_list(bench_threads);
      for (unsigned& t : thread_list) {
        if (t == 0) t = default_thread_count();
      }
      if (thread_list.empty()) thread_list.push_back(default_thread_count());
      std::optional<std::size_t> rounds;
      if (bench_max_rounds >= 0) rounds = static_cast<std::size_t>(bench_max_rounds);
      return run_bench(bench_circuits, bench_synthetic, parse_size_list(bench_sizes),
                       bench_qubits, bench_density, bench_seed, thread_list,
                       bench_omega, bench_oracle, rounds, bench_output);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "popqc: error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
