// Command-line front end: list, run, suite, profile, check.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "inthop.hpp"

#ifndef INTHOP_CORPUS_DIR
#define INTHOP_CORPUS_DIR "problems"
#endif

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct SolverFlags {
  std::string solver = "inthop";
  std::string strategy = "a1";
  std::string alpha = "mk";
  double delta = 0.1;
  double eps_g = 1e-3;
  int iter_max = 10000;
};

void add_solver_flags(CLI::App& app, SolverFlags& f) {
  app.add_option("--solver", f.solver, "sd | bfgs | newton-cami | inthop")->capture_default_str();
  app.add_option("--strategy", f.strategy, "fixed | a1 | a2")->capture_default_str();
  app.add_option("--alpha", f.alpha, "ggn | em | mk")->capture_default_str();
  app.add_option("--delta", f.delta, "initial box width")->capture_default_str();
  app.add_option("--eps-g", f.eps_g, "gradient tolerance")->capture_default_str();
  app.add_option("--iter-max", f.iter_max, "iteration limit")->capture_default_str();
}

inthop::SolverDescriptor to_descriptor(const SolverFlags& f) {
  inthop::SolverDescriptor d;
  d.kind = inthop::parse_solver_kind(f.solver);
  d.config.strategy = inthop::parse_strategy(f.strategy);
  d.config.alpha_method = inthop::parse_alpha_method(f.alpha);
  d.config.delta0 = f.delta;
  d.config.eps_g = f.eps_g;
  d.config.iter_max = f.iter_max;
  d.config.validate();
  return d;
}

// One descriptor per non-blank, non-comment line, using the run flags.
std::vector<inthop::SolverDescriptor> read_solver_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<inthop::SolverDescriptor> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    CLI::App app{"solver descriptor"};
    SolverFlags flags;
    add_solver_flags(app, flags);
    try {
      app.parse(line, false);
      out.push_back(to_descriptor(flags));
    } catch (const std::exception& e) {
      throw CLI::ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<double> parse_budgets(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--budgets", "not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--budgets", "empty list");
  return out;
}

int cmd_list(const std::string& dir) {
  const auto problems = inthop::load_problem_set(dir);
  std::printf("%-22s %5s  %s\n", "name", "n", "fstar");
  for (const auto& p : problems) {
    std::printf("%-22s %5d  %s\n", p.name.c_str(), p.n, p.fstar ? inthop::format_real(*p.fstar).c_str() : "-");
  }
  std::printf("%zu problems\n", problems.size());
  return kOk;
}

int cmd_run(const std::string& dir, const std::string& name, const SolverFlags& flags, const std::string& trace) {
  const auto d = to_descriptor(flags);
  const auto problems = inthop::load_problem_set(dir);
  const inthop::Problem* found = nullptr;
  for (const auto& p : problems)
    if (p.name == name) found = &p;
  if (!found) throw CLI::ValidationError("--problem", "no problem named '" + name + "' in " + dir);
  const auto compiled = inthop::compile(*found);
  const auto res = inthop::run_solver(d, *compiled);
  if (!trace.empty()) inthop::write_trace_csv(trace, res.trace);
  const auto& c = res.counters;
  std::printf("problem     %s\nsolver      %s\nstatus      %s\n", name.c_str(), d.name().c_str(),
              std::string(inthop::to_string(res.status)).c_str());
  std::printf("f_final     %s\ng_norm      %s\n", inthop::format_real(res.f_final).c_str(),
              inthop::format_real(res.g_norm).c_str());
  std::printf("iterations  %lld\nf_evals     %lld\ng_evals     %lld\nh_evals     %lld\nih_evals    %lld\n",
              static_cast<long long>(c.iterations), static_cast<long long>(c.f_evals),
              static_cast<long long>(c.g_evals), static_cast<long long>(c.h_evals),
              static_cast<long long>(c.ih_evals));
  std::printf("n3_ops      %lld\nrefreshes   %lld\n", static_cast<long long>(c.n3_ops),
              static_cast<long long>(c.refreshes));
  return res.status == inthop::Status::Solved ? kOk : kFailure;
}

int cmd_suite(const std::string& dir, const std::string& config, const std::string& out) {
  const auto solvers = read_solver_config(config);
  const auto problems = inthop::load_problem_set(dir);
  const auto suite = inthop::run_suite(problems, solvers, out);
  long solved = 0;
  for (const auto& r : suite.records) solved += r.status == inthop::Status::Solved;
  std::printf("%zu runs, %ld solved; records written to %s\n", suite.records.size(), solved,
              (std::filesystem::path(out) / "records.csv").string().c_str());
  return kOk;
}

int cmd_profile(const std::string& records_path, const std::string& metric, const std::string& budgets,
                const std::string& out) {
  const auto m = inthop::parse_metric(metric);
  const auto b = parse_budgets(budgets);
  const auto records = inthop::read_records_csv(records_path);
  std::map<std::string, std::vector<inthop::RunRecord>> by_solver;
  for (const auto& r : records) by_solver[r.solver].push_back(r);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << "solver,metric,budget,fraction\n";
  for (const auto& [solver, recs] : by_solver) {
    const auto prof = inthop::data_profile(recs, m, b);
    for (const auto& [budget, d] : prof.points)
      os << solver << ',' << inthop::to_string(m) << ',' << inthop::format_real(budget) << ','
         << inthop::format_real(d) << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + out);
  std::printf("profiles for %zu solvers written to %s\n", by_solver.size(), out.c_str());
  return kOk;
}

void report(const char* label, const inthop::diagnostics::Tally& t, bool& ok) {
  std::printf("%-34s checked %7ld  violated %5ld  skipped %5ld  worst lhs/rhs %.6g\n", label, t.checked, t.violated,
              t.skipped, t.worst_ratio);
  ok = ok && t.ok();
}

int cmd_check(const std::string& dir) {
  namespace dg = inthop::diagnostics;
  bool ok = true;
  const auto problems = inthop::load_problem_set(dir);
  dg::Tally enclosure, fn, grad, hess, step;
  for (const auto& p : problems) {
    const auto c = inthop::compile(p);
    enclosure.merge(dg::check_hessian_enclosure(*c));
    const auto cb = dg::check_close_bounds(*c);
    fn.merge(cb.function);
    grad.merge(cb.gradient);
    hess.merge(cb.hessian);
    inthop::SolverConfig cfg;
    cfg.diagnostics = true;
    step.merge(dg::check_step_norm_bound(inthop::run_inthop(*c, cfg)));
  }
  report("interval Hessian enclosure", enclosure, ok);
  report("underestimator value closeness", fn, ok);
  report("underestimator gradient closeness", grad, ok);
  report("shifted Hessian closeness", hess, ok);
  report("step norm bound", step, ok);
  const auto sound = dg::check_eigen_bounds();
  report("GGN <= sampled lambda_min", sound.ggn, ok);
  report("EM <= sampled lambda_min", sound.em, ok);
  report("MK <= sampled lambda_min", sound.mk, ok);
  report("GGN <= vertex lambda_min", sound.ggn_vertex, ok);
  report("EM <= vertex lambda_min", sound.em_vertex, ok);
  report("MK <= vertex lambda_min", sound.mk_vertex, ok);
  std::printf("%s\n", ok ? "all checks passed" : "violations found");
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"INTHOP optimizer and benchmark harness"};
  app.require_subcommand(1);

  std::string list_dir = INTHOP_CORPUS_DIR;
  auto* list = app.add_subcommand("list", "print a corpus summary");
  list->add_option("dir", list_dir, "problem directory")->capture_default_str();

  std::string run_dir = INTHOP_CORPUS_DIR, run_problem, run_trace;
  SolverFlags run_flags;
  auto* run = app.add_subcommand("run", "solve one corpus problem");
  run->add_option("--problem", run_problem, "problem name")->required();
  add_solver_flags(*run, run_flags);
  run->add_option("--trace", run_trace, "write the iteration trace CSV here");
  run->add_option("--problems", run_dir, "problem directory")->capture_default_str();

  std::string suite_dir = INTHOP_CORPUS_DIR, suite_config, suite_out;
  auto* suite = app.add_subcommand("suite", "run every problem against every configured solver");
  suite->add_option("--problems", suite_dir, "problem directory")->capture_default_str();
  suite->add_option("--config", suite_config, "solver descriptors, one per line")->required();
  suite->add_option("--out", suite_out, "output directory")->required();

  std::string prof_records, prof_metric = "g", prof_budgets, prof_out;
  auto* profile = app.add_subcommand("profile", "data profiles from a records CSV");
  profile->add_option("--records", prof_records, "records CSV")->required();
  profile->add_option("--metric", prof_metric, "f | g | h | n3")->capture_default_str();
  profile->add_option("--budgets", prof_budgets, "comma-separated budgets")->required();
  profile->add_option("--out", prof_out, "output CSV")->required();

  std::string check_dir = INTHOP_CORPUS_DIR;
  auto* check = app.add_subcommand("check", "run the invariant and diagnostic checks");
  check->add_option("--problems", check_dir, "problem directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*list) return cmd_list(list_dir);
    if (*run) return cmd_run(run_dir, run_problem, run_flags, run_trace);
    if (*suite) return cmd_suite(suite_dir, suite_config, suite_out);
    if (*profile) return cmd_profile(prof_records, prof_metric, prof_budgets, prof_out);
    if (*check) return cmd_check(check_dir);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
