#include "seqeffect/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "seqeffect/channels.hpp"
#include "seqeffect/io.hpp"

namespace seqeffect::cli {

namespace {

using io::Json;

constexpr std::uint64_t kDefaultSeed = 42;
constexpr std::uint64_t kSimulateStream = 0x51u;

struct CommonOptions {
  std::uint64_t seed = kDefaultSeed;
  ToleranceConfig tol;
  std::string out_path;
  bool deterministic = false;
};

/// Thrown for bad user input; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("SEQEFFECT_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("SEQEFFECT_SEED is not an unsigned integer: ") + env);
  }
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--seed", opts.seed, "RNG seed (default: $SEQEFFECT_SEED or 42)");
  cmd->add_option("--hermit-tol", opts.tol.hermit_tol, "Hermiticity tolerance");
  cmd->add_option("--psd-tol", opts.tol.psd_tol, "PSD eigenvalue floor");
  cmd->add_option("--eq-tol", opts.tol.eq_tol, "operator-norm equality tolerance");
  cmd->add_option("--rank-tol", opts.tol.rank_tol, "numerical rank threshold");
  cmd->add_option("--out", opts.out_path, "write the report here instead of stdout");
  cmd->add_flag("--deterministic", opts.deterministic, "omit the timestamp from the report");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json envelope(const std::string& command, Json config, const CommonOptions& opts) {
  Json out;
  out["tool"] = "seqeffect";
  out["version"] = kVersion;
  out["command"] = command;
  config["seed"] = opts.seed;
  config["tolerances"] = io::to_json(opts.tol);
  config["deterministic"] = opts.deterministic;
  if (!opts.out_path.empty()) config["out"] = opts.out_path;
  out["config"] = std::move(config);
  if (!opts.deterministic) out["timestamp"] = utc_timestamp();
  return out;
}

void emit(const Json& report, const CommonOptions& opts, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (opts.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(opts.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + opts.out_path);
  f << text;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      dims.push_back(d);
    } catch (const std::exception&) {
      throw UsageError("bad --dims entry '" + item + "'");
    }
  }
  if (dims.empty()) throw UsageError("--dims is empty");
  return dims;
}

CandidateProduct make_candidate(const std::string& spec, const ToleranceConfig& tol,
                                std::optional<int>& required_dim) {
  if (spec == "standard") return CandidateProduct::standard(tol);
  if (spec == "transpose") return CandidateProduct::transpose_twisted(tol);
  if (spec == "jordan") return CandidateProduct::jordan();
  const std::string prefix = "unitary:";
  if (spec.rfind(prefix, 0) == 0) {
    CMatrix u = io::read_matrix_file(spec.substr(prefix.size()));
    required_dim = static_cast<int>(u.rows());
    CandidateProduct p = CandidateProduct::unitary_twisted(std::move(u), tol);
    p.name = spec;
    return p;
  }
  throw UsageError("unknown candidate '" + spec +
                   "' (expected standard, transpose, jordan or unitary:<path>)");
}

int cmd_check(const std::string& candidate_spec, const std::string& dims_text, std::size_t trials,
              const CommonOptions& opts, std::ostream& out) {
  const std::vector<int> dims = parse_dims(dims_text);
  for (int d : dims) check_dim(d);
  if (trials < 1) throw UsageError("--trials must be >= 1");
  std::optional<int> required_dim;
  const CandidateProduct prod = make_candidate(candidate_spec, opts.tol, required_dim);
  if (required_dim) {
    for (int d : dims) {
      if (d != *required_dim) {
        throw Error(ErrorCode::DimMismatch, "unitary is " + std::to_string(*required_dim) +
                                                "-dimensional but --dims has " + std::to_string(d));
      }
    }
  }

  const FuzzReport fuzz = fuzz_candidate(prod, dims, trials, opts.seed, opts.tol);
  Json config;
  config["candidate"] = candidate_spec;
  config["dims"] = dims;
  config["trials"] = trials;
  Json report = envelope("check", std::move(config), opts);
  report["result"] = io::to_json(fuzz);
  const int code = fuzz.any_witness() || !fuzz.all_passed() ? kExitViolation : kExitPass;
  report["exit_code"] = code;
  emit(report, opts, out);
  return code;
}

int cmd_trace(const std::string& candidate_spec, const std::string& effect_path, bool random,
              int dim, int regularize, const CommonOptions& opts, std::ostream& out,
              std::ostream& err) {
  if (effect_path.empty() == !random) throw UsageError("give exactly one of --effect or --random");
  std::optional<int> required_dim;
  const CandidateProduct prod = make_candidate(candidate_spec, opts.tol, required_dim);

  CMatrix a_matrix;
  if (random) {
    check_dim(dim);
    a_matrix = random_effect(dim, RngSeed{opts.seed});
  } else {
    a_matrix = io::read_matrix_file(effect_path);
    check_dim(static_cast<int>(a_matrix.rows()));
  }
  if (required_dim && *required_dim != a_matrix.rows()) {
    throw Error(ErrorCode::DimMismatch, "unitary and effect dimensions differ");
  }
  Effect a = Effect::from_matrix(a_matrix, opts.tol);
  if (regularize > 0) a = regularize_invertible(a, regularize);

  Json config;
  config["candidate"] = candidate_spec;
  if (random) {
    config["random"] = true;
    config["dim"] = dim;
  } else {
    config["effect"] = effect_path;
  }
  config["regularize"] = regularize > 0 ? Json(regularize) : Json(nullptr);
  Json report = envelope("trace", std::move(config), opts);

  try {
    const ProofTraceReport trace = trace_theorem_steps(prod, a, opts.tol, opts.seed);
    report["result"] = io::to_json(trace);
    const int code = trace.all_passed() ? kExitPass : kExitViolation;
    report["exit_code"] = code;
    emit(report, opts, out);
    return code;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotInvertible) {
      err << "error: " << e.what() << "\n"
          << "hint: the effect is singular; rerun with --regularize <i> to use (iA + I)/(i + 1)\n";
      return kExitPrecondition;
    }
    if (e.code() == ErrorCode::UnclassifiedMap || e.code() == ErrorCode::NotAffine) {
      report["result"] = Json{{"error", e.what()}, {"code", to_string(e.code())}};
      report["exit_code"] = kExitViolation;
      emit(report, opts, out);
      return kExitViolation;
    }
    throw;
  }
}

int cmd_simulate(const std::string& povm_path, const std::string& state_path, int steps, int runs,
                 const CommonOptions& opts, std::ostream& out) {
  if (steps < 1) throw UsageError("--steps must be >= 1");
  if (runs < 1) throw UsageError("--runs must be >= 1");
  const DiscretePOVM povm = DiscretePOVM::from_effects(io::povm_from_json(io::read_json_file(povm_path)), opts.tol);
  const DensityOperator rho = DensityOperator::from_matrix(io::read_matrix_file(state_path), opts.tol);
  if (rho.dim() != povm.dim()) throw Error(ErrorCode::DimMismatch, "state and POVM dimensions differ");

  const std::size_t outcomes = povm.size();
  std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(steps),
                                               std::vector<std::size_t>(outcomes, 0));
  Json trajectory = Json::array();
  for (int r = 0; r < runs; ++r) {
    SplitMix64 rng(derive_seed(opts.seed, kSimulateStream, static_cast<std::uint64_t>(r)));
    const auto path = simulate_measurements(povm, rho, steps, rng, opts.tol);
    for (std::size_t s = 0; s < path.size(); ++s) ++counts[s][path[s].outcome];
    if (r == 0) {
      for (std::size_t s = 0; s < path.size(); ++s) {
        Json j;
        j["step"] = s;
        j["outcome"] = path[s].outcome;
        j["probabilities"] = path[s].probabilities;
        j["state"] = io::matrix_to_json(path[s].state.matrix());
        trajectory.push_back(std::move(j));
      }
    }
  }

  Json config;
  config["povm"] = povm_path;
  config["state"] = state_path;
  config["steps"] = steps;
  config["runs"] = runs;
  Json report = envelope("simulate", std::move(config), opts);
  Json result;
  result["outcomes"] = outcomes;
  const KrausChannel instrument = instrument_from_povm(povm, opts.tol);
  result["initial_probabilities"] = outcome_probabilities(instrument, rho);
  result["trajectory"] = std::move(trajectory);
  result["outcome_counts"] = counts;
  report["result"] = std::move(result);
  report["exit_code"] = kExitPass;
  emit(report, opts, out);
  return kExitPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential products on quantum effects: axiom checks, proof traces, simulation",
               "seqeffect"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions opts;
  try {
    opts.seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::string candidate = "standard";
  std::string dims = "2";
  std::size_t trials = 500;
  auto* check = app.add_subcommand("check", "fuzz a candidate product against every condition");
  check->add_option("--candidate", candidate, "standard | transpose | jordan | unitary:<U.json>")
      ->required();
  check->add_option("--dims", dims, "comma-separated dimensions, e.g. 2,3,4");
  check->add_option("--trials", trials, "trials per condition and dimension");
  add_common(check, opts);

  std::string effect_path;
  bool random_effect_flag = false;
  int dim = 2;
  int regularize = 0;
  auto* trace = app.add_subcommand("trace", "replay the uniqueness proof for one effect");
  trace->add_option("--candidate", candidate, "standard | transpose | jordan | unitary:<U.json>");
  trace->add_option("--effect", effect_path, "effect A as matrix JSON");
  trace->add_flag("--random", random_effect_flag, "draw A at random from --seed");
  trace->add_option("--dim", dim, "dimension for --random");
  trace->add_option("--regularize", regularize, "replace A by (iA + I)/(i + 1)")
      ->check(CLI::PositiveNumber);
  add_common(trace, opts);

  std::string povm_path;
  std::string state_path;
  int steps = 1;
  int runs = 1;
  auto* simulate = app.add_subcommand("simulate", "sample repeated POVM measurements");
  simulate->add_option("--povm", povm_path, "POVM JSON {\"effects\": [...]}")->required();
  simulate->add_option("--state", state_path, "initial density matrix JSON")->required();
  simulate->add_option("--steps", steps, "measurements per run");
  simulate->add_option("--runs", runs, "independent runs (counts are aggregated)");
  add_common(simulate, opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInputError;
  }

  try {
    opts.tol.validate(&err);
    if (check->parsed()) return cmd_check(candidate, dims, trials, opts, out);
    if (trace->parsed()) {
      return cmd_trace(candidate, effect_path, random_effect_flag, dim, regularize, opts, out, err);
    }
    return cmd_simulate(povm_path, state_path, steps, runs, opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NotInvertible ? kExitPrecondition : kExitInputError;
  }
}

}  // namespace seqeffect::cli
