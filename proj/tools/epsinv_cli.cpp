#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "epsinv/reports.hpp"
#include "epsinv/solver.hpp"

namespace {

using epsinv::json;

// Options for one batch job, collected by the parser and interpreted per
// scalar mode.  Exit codes: 0 ok, 1 invalid input, 2 hypothesis violation,
// 3 non-convergence (result JSON is still written), 4 cap exceeded.
struct JobSpec {
  std::string command;
  std::string mode = "rational";
  std::string system_path;
  std::string f_path;
  std::string g_path;
  std::string g0_path;
  std::string measure_path;
  std::string out_path;
  std::string csv_path;
  std::string density_out_path;
  std::string method = "neumann";
  std::string solve_mode = "family";
  std::string tol_text;     // empty keeps the solver default
  std::string epsilon_text;
  std::string word_text;    // comma-separated 1-based symbols
  std::string gamma_text;   // comma-separated scalars
  std::size_t max_iters = 10000;
  std::size_t depth = 6;
  std::size_t power = 1;
  std::size_t count = 100;
  std::size_t grid = 256;
  std::uint64_t seed = 1;
  bool strict_zero_integral = false;
  bool include_sets = false;
};

// EPSINV_PART_CAP overrides every interval-part / table-size cap.
std::size_t part_cap(std::size_t fallback) {
  const char* raw = std::getenv("EPSINV_PART_CAP");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  unsigned long long cap = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || cap == 0)
    throw epsinv::InvalidInput("EPSINV_PART_CAP must be a positive integer");
  return static_cast<std::size_t>(cap);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) items.push_back(item);
  if (items.empty()) throw epsinv::InvalidInput("empty list argument");
  return items;
}

std::size_t parse_index(const std::string& text) {
  char* end = nullptr;
  unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || value == 0)
    throw epsinv::InvalidInput("word symbols must be positive integers: " + text);
  return static_cast<std::size_t>(value);
}

template <class S>
S parse_scalar(const std::string& text) {
  return epsinv::scalar_from_json<S>(json(text));
}

void emit(const JobSpec& job, const json& artifact) {
  if (job.out_path.empty())
    std::cout << artifact.dump(2) << "\n";
  else
    epsinv::write_json_file(job.out_path, artifact);
}

template <class S>
epsinv::BranchSystem<S> load_system(const JobSpec& job) {
  return epsinv::system_from_json<S>(epsinv::read_json_file(job.system_path));
}

template <class S>
int run_validate(const JobSpec& job) {
  emit(job, epsinv::flags_to_json(load_system<S>(job).flags()));
  return 0;
}

template <class S>
int run_apply(const JobSpec& job) {
  auto f = epsinv::stepfunction_from_json<S>(epsinv::read_json_file(job.f_path));
  auto P = epsinv::make_fp_operator(load_system<S>(job));
  emit(job, epsinv::stepfunction_to_json(
                epsinv::iterate(P, std::move(f), job.power)));
  return 0;
}

template <class S>
int run_solve(const JobSpec& job) {
  auto g = epsinv::stepfunction_from_json<S>(epsinv::read_json_file(job.g_path));
  epsinv::SolveOptions<S> opts;
  if (!job.tol_text.empty()) opts.tol = parse_scalar<S>(job.tol_text);
  opts.max_iters = job.max_iters;
  opts.mode = job.solve_mode == "unique" ? epsinv::SolveMode::unique
                                         : epsinv::SolveMode::family;
  opts.strict_zero_integral = job.strict_zero_integral;
  auto P = epsinv::make_fp_operator(load_system<S>(job));
  auto result = job.method == "cesaro" ? epsinv::solve_cesaro(P, g, opts)
                                       : epsinv::solve_neumann(P, g, opts);
  emit(job, epsinv::solveresult_to_json(result));
  return result.status == epsinv::SolveStatus::converged ? 0 : 3;
}

template <class S>
int run_attractor(const JobSpec& job) {
  auto trace =
      epsinv::attractor_iterate(load_system<S>(job), job.depth, part_cap(1000000));
  json artifact = epsinv::attractor_artifact(trace, job.include_sets);
  if (!job.csv_path.empty())
    epsinv::write_text_file(job.csv_path, epsinv::trace_to_csv(trace));
  emit(job, artifact);
  return 0;
}

template <class S>
int run_cylinder(const JobSpec& job) {
  auto measure = epsinv::cylinder_spec_from_json<S>(
      epsinv::read_json_file(job.measure_path));
  auto entry = [&measure](const epsinv::Word& w) {
    auto cell = measure.cylinder(w);
    return json{{"word", w.symbols},
                {"lo", epsinv::scalar_to_json(cell.lo)},
                {"hi", epsinv::scalar_to_json(cell.hi)},
                {"nu0", epsinv::scalar_to_json(measure.nu0(w))}};
  };
  if (!job.word_text.empty()) {
    epsinv::Word w;
    for (const auto& s : split_list(job.word_text))
      w.symbols.push_back(parse_index(s));
    emit(job, entry(w));
    return 0;
  }
  if (job.depth == 0)
    throw epsinv::InvalidInput("cylinder needs --word or --depth >= 1");
  const std::size_t n = measure.alphas().size();
  const std::size_t cap = part_cap(1000000);
  std::size_t cells = 1;
  for (std::size_t i = 0; i < job.depth; ++i) {
    if (cells > cap / n)
      throw epsinv::CapExceeded("cylinder table exceeds the part cap");
    cells *= n;
  }
  // Full table at the requested depth, odometer order; nu0 sums to one.
  epsinv::Word w;
  w.symbols.assign(job.depth, 1);
  json table = json::array();
  S total(0);
  while (true) {
    table.push_back(entry(w));
    total += measure.nu0(w);
    std::size_t i = job.depth;
    while (i > 0 && w.symbols[i - 1] == n) w.symbols[--i] = 1;
    if (i == 0) break;
    ++w.symbols[i - 1];
  }
  emit(job, json{{"cells", std::move(table)},
                 {"depth", job.depth},
                 {"total", epsinv::scalar_to_json(total)}});
  return 0;
}

template <class S>
int run_measure_verify(const JobSpec& job) {
  auto measure = epsinv::cylinder_spec_from_json<S>(
      epsinv::read_json_file(job.measure_path));
  emit(job, epsinv::measure_verification(measure, job.seed, job.count, job.grid,
                                         job.depth));
  return 0;
}

template <class S>
int run_build_g(const JobSpec& job) {
  if (job.g0_path.empty() == job.gamma_text.empty())
    throw epsinv::InvalidInput("build-g needs exactly one of --g0 and --gamma");
  auto system = load_system<S>(job);
  if (!job.g0_path.empty()) {
    if (job.epsilon_text.empty())
      throw epsinv::InvalidInput("the --g0 construction needs --epsilon");
    auto g0 =
        epsinv::stepfunction_from_json<S>(epsinv::read_json_file(job.g0_path));
    auto g = epsinv::build_g_orthogonal(system, g0,
                                        parse_scalar<S>(job.epsilon_text));
    emit(job, epsinv::stepfunction_to_json(g));
    return 0;
  }
  std::vector<S> gammas;
  for (const auto& t : split_list(job.gamma_text))
    gammas.push_back(parse_scalar<S>(t));
  auto [g, density] = epsinv::build_g_piecewise(system, gammas);
  if (!job.density_out_path.empty())
    epsinv::write_json_file(job.density_out_path,
                            epsinv::stepfunction_to_json(density.density()));
  emit(job, epsinv::stepfunction_to_json(g));
  return 0;
}

template <class S>
int run(const JobSpec& job) {
  if (job.command == "validate") return run_validate<S>(job);
  if (job.command == "apply") return run_apply<S>(job);
  if (job.command == "solve") return run_solve<S>(job);
  if (job.command == "attractor") return run_attractor<S>(job);
  if (job.command == "cylinder") return run_cylinder<S>(job);
  if (job.command == "measure-verify") return run_measure_verify<S>(job);
  if (job.command == "build-g") return run_build_g<S>(job);
  throw epsinv::InvalidInput("unknown command: " + job.command);
}

}  // namespace

int main(int argc, char** argv) {
  JobSpec job;
  CLI::App app{
      "Batch front door for piecewise-affine transfer operators: system "
      "validation, fixed-point solvers, attractor traces, and construction/"
      "verification of epsilon-invariant measures.  Outputs are deterministic "
      "JSON (and CSV) artifacts."};
  app.require_subcommand(1);
  app.add_option("--mode", job.mode, "scalar arithmetic: exact or double")
      ->check(CLI::IsMember({"rational", "float"}))
      ->capture_default_str();
  app.add_option("--tol", job.tol_text,
                 "solver tolerance, \"p/q\" or decimal (default 1e-10)");
  app.add_option("--max-iters", job.max_iters, "solver iteration cap")
      ->capture_default_str();
  app.add_option("--depth", job.depth,
                 "levels (attractor) / word length (cylinder) / refinement "
                 "depth (measure-verify)")
      ->capture_default_str();
  app.add_option("--seed", job.seed, "seed for the randomized set battery")
      ->capture_default_str();
  app.add_option("--out", job.out_path, "write the JSON artifact here "
                                        "(default: stdout)");

  auto* validate =
      app.add_subcommand("validate", "report the structural flags of a system");
  validate->add_option("--system", job.system_path, "branch system JSON")
      ->required();

  auto* apply = app.add_subcommand(
      "apply", "apply the transfer operator (a power of it) to a step function");
  apply->add_option("--system", job.system_path, "branch system JSON")
      ->required();
  apply->add_option("--f", job.f_path, "step function JSON")->required();
  apply->add_option("--power", job.power, "operator power")
      ->capture_default_str();

  auto* solve = app.add_subcommand(
      "solve", "solve phi = P phi + g by series summation");
  solve->add_option("--system", job.system_path, "branch system JSON")
      ->required();
  solve->add_option("--g", job.g_path, "right-hand side JSON")->required();
  solve->add_option("--method", job.method, "summation method")
      ->check(CLI::IsMember({"neumann", "cesaro"}))
      ->capture_default_str();
  solve->add_option("--solve-mode", job.solve_mode,
                    "family (solutions up to a constant) or unique")
      ->check(CLI::IsMember({"family", "unique"}))
      ->capture_default_str();
  solve->add_flag("--strict-zero-integral", job.strict_zero_integral,
                  "reject right-hand sides with nonzero integral");

  auto* attractor = app.add_subcommand(
      "attractor", "iterate the branch images and trace level measures");
  attractor->add_option("--system", job.system_path, "branch system JSON")
      ->required();
  attractor->add_option("--csv", job.csv_path, "also write (m, measure) CSV");
  attractor->add_flag("--sets", job.include_sets,
                      "include the level sets in the JSON trace");

  auto* cylinder = app.add_subcommand(
      "cylinder", "evaluate a cylinder measure on one word or a full table");
  cylinder->add_option("--measure", job.measure_path, "cylinder measure JSON")
      ->required();
  cylinder->add_option("--word", job.word_text,
                       "comma-separated 1-based symbols, outermost first");

  auto* verify = app.add_subcommand(
      "measure-verify",
      "check the density and set criteria for a cylinder measure");
  verify->add_option("--measure", job.measure_path, "cylinder measure JSON")
      ->required();
  verify->add_option("--count", job.count, "battery size")
      ->capture_default_str();
  verify->add_option("--grid", job.grid, "battery endpoint grid")
      ->capture_default_str();

  auto* build_g = app.add_subcommand(
      "build-g", "construct a right-hand side with P g = 0");
  build_g->add_option("--system", job.system_path, "branch system JSON")
      ->required();
  build_g->add_option("--g0", job.g0_path,
                      "seed step function JSON (orthogonal extension)");
  build_g->add_option("--epsilon", job.epsilon_text,
                      "bound for the orthogonal extension");
  build_g->add_option("--gamma", job.gamma_text,
                      "comma-separated branch values (piecewise construction)");
  build_g->add_option("--density-out", job.density_out_path,
                      "write the invariant density here (piecewise only)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  job.command = app.get_subcommands().front()->get_name();

  try {
    if (job.mode == "float") return run<double>(job);
    return run<epsinv::Rational>(job);
  } catch (const epsinv::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const epsinv::HypothesisViolated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const epsinv::InvalidSystem& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
