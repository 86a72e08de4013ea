#pragma once

// Benchmark plumbing: problem corpus loading, solver descriptors, the
// second-order solved test, data profiles and CSV persistence.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "inthop/baselines.hpp"
#include "inthop/eigen_bounds.hpp"
#include "inthop/inthop_solver.hpp"
#include "inthop/problem.hpp"
#include "inthop/solver_types.hpp"

namespace inthop {

class DuplicateName : public std::runtime_error {
 public:
  explicit DuplicateName(const std::string& name)
      : std::runtime_error("duplicate problem name '" + name + "'") {}
};

class EmptyProblemSet : public std::invalid_argument {
 public:
  EmptyProblemSet() : std::invalid_argument("data profile over an empty problem set") {}
};

inline constexpr std::string_view kProblemExtension = ".prob";

// Every *.prob file in dir, sorted by problem name.
inline std::vector<Problem> load_problem_set(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<Problem> problems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != kProblemExtension) continue;
    problems.push_back(load_problem(entry.path().string()));
  }
  std::sort(problems.begin(), problems.end(), [](const Problem& a, const Problem& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < problems.size(); ++i)
    if (problems[i].name == problems[i - 1].name) throw DuplicateName(problems[i].name);
  return problems;
}

// ------------------------------------------------------------------ solvers

enum class SolverKind { SteepestDescent, Bfgs, NewtonCami, Inthop };

struct SolverDescriptor {
  SolverKind kind = SolverKind::Inthop;
  SolverConfig config;

  std::string name() const {
    switch (kind) {
      case SolverKind::SteepestDescent:
        return "sd";
      case SolverKind::Bfgs:
        return "bfgs";
      case SolverKind::NewtonCami:
        return "newton-cami";
      case SolverKind::Inthop: {
        std::ostringstream os;
        os << "inthop-" << to_string(config.strategy) << '-' << to_string(config.alpha_method) << "-d"
           << config.delta0;
        return os.str();
      }
    }
    return "?";
  }
};

inline SolverKind parse_solver_kind(std::string_view s) {
  if (s == "sd") return SolverKind::SteepestDescent;
  if (s == "bfgs") return SolverKind::Bfgs;
  if (s == "newton-cami") return SolverKind::NewtonCami;
  if (s == "inthop") return SolverKind::Inthop;
  throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

inline SolverResult run_solver(const SolverDescriptor& d, const CompiledProblem& problem) {
  switch (d.kind) {
    case SolverKind::SteepestDescent:
      return steepest_descent(problem, d.config);
    case SolverKind::Bfgs:
      return bfgs(problem, d.config);
    case SolverKind::NewtonCami:
      return newton_cami(problem, d.config);
    case SolverKind::Inthop:
      return run_inthop(problem, d.config);
  }
  throw std::logic_error("unknown solver kind");
}

// ------------------------------------------------------------ solved check

inline bool solved_criterion(double g_norm, double lambda_min_h, double eps_g, double eps_H) {
  return g_norm < eps_g && lambda_min_h > -eps_H;
}

// ||g|| < eps_g and lambda_min(H(x_final)) > -eps_H, with the exact Hessian
// evaluated at the returned point.
inline bool solved_check(const SolverResult& result, const CompiledProblem& problem, double eps_g, double eps_H) {
  if (!result.x_final.allFinite() || !(result.g_norm < eps_g)) return false;
  const Eigen::MatrixXd h = eval_hessian(problem.derivatives.hessian, result.x_final);
  if (!h.allFinite()) return false;
  return solved_criterion(result.g_norm, lambda_min(h), eps_g, eps_H);
}

// ------------------------------------------------------------- run records

struct RunRecord {
  std::string problem;
  std::string solver;
  Status status = Status::MaxIterations;
  Counters counters;
  double f_final = 0.0;
  double g_norm = 0.0;
  double wall_time = 0.0;
};

inline constexpr std::string_view kRecordsHeader =
    "problem,solver,status,f_evals,g_evals,h_evals,ih_evals,n3_ops,iterations,refreshes,f_final,g_norm,wall_time_s";
inline constexpr std::string_view kTraceHeader = "k,t,f,gnorm,delta,refreshed,theta";

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv_row(const RunRecord& r) {
  std::ostringstream os;
  const Counters& c = r.counters;
  os << r.problem << ',' << r.solver << ',' << to_string(r.status) << ',' << c.f_evals << ',' << c.g_evals << ','
     << c.h_evals << ',' << c.ih_evals << ',' << c.n3_ops << ',' << c.iterations << ',' << c.refreshes << ','
     << format_real(r.f_final) << ',' << format_real(r.g_norm) << ',' << format_real(r.wall_time);
  return os.str();
}

inline void write_records_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kRecordsHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
  if (!out) throw std::runtime_error("error writing " + path.string());
}

inline void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const auto& it : trace)
    out << it.k << ',' << it.t << ',' << format_real(it.f) << ',' << format_real(it.gnorm) << ','
        << format_real(it.delta) << ',' << (it.refreshed ? 1 : 0) << ',' << format_real(it.theta) << '\n';
  if (!out) throw std::runtime_error("error writing " + path.string());
}

inline std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kRecordsHeader)
    throw std::runtime_error(path.string() + ": unexpected records header");
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(detail::trim(cell));
    if (f.size() != 13)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 13 fields");
    try {
      RunRecord r;
      r.problem = f[0];
      r.solver = f[1];
      r.status = parse_status(f[2]);
      r.counters.f_evals = std::stoll(f[3]);
      r.counters.g_evals = std::stoll(f[4]);
      r.counters.h_evals = std::stoll(f[5]);
      r.counters.ih_evals = std::stoll(f[6]);
      r.counters.n3_ops = std::stoll(f[7]);
      r.counters.iterations = std::stoll(f[8]);
      r.counters.refreshes = std::stoll(f[9]);
      r.f_final = std::stod(f[10]);
      r.g_norm = std::stod(f[11]);
      r.wall_time = std::stod(f[12]);
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

// ------------------------------------------------------------ data profiles

enum class Metric { FEvals, GEvals, HEvals, N3Ops };

inline Metric parse_metric(std::string_view s) {
  if (s == "f") return Metric::FEvals;
  if (s == "g") return Metric::GEvals;
  if (s == "h") return Metric::HEvals;
  if (s == "n3") return Metric::N3Ops;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "' (expected f, g, h or n3)");
}

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::FEvals:
      return "f_evals";
    case Metric::GEvals:
      return "g_evals";
    case Metric::HEvals:
      return "h_evals";
    case Metric::N3Ops:
      return "n3_ops";
  }
  return "?";
}

// Cost of a run under a metric; infinity when the run did not solve.
inline double metric_value(const RunRecord& r, Metric m) {
  if (r.status != Status::Solved) return std::numeric_limits<double>::infinity();
  switch (m) {
    case Metric::FEvals:
      return static_cast<double>(r.counters.f_evals);
    case Metric::GEvals:
      return static_cast<double>(r.counters.g_evals);
    case Metric::HEvals:
      return static_cast<double>(r.counters.h_evals);
    case Metric::N3Ops:
      return static_cast<double>(r.counters.n3_ops);
  }
  return std::numeric_limits<double>::infinity();
}

struct DataProfile {
  Metric metric = Metric::GEvals;
  std::vector<std::pair<double, double>> points;  // (budget, fraction solved), budgets ascending
};

// Fraction of problems solved within each budget. `records` holds one run per
// problem for a single solver.
inline DataProfile data_profile(const std::vector<RunRecord>& records, Metric metric, std::vector<double> budgets) {
  if (records.empty()) throw EmptyProblemSet();
  std::vector<double> costs;
  costs.reserve(records.size());
  for (const auto& r : records) costs.push_back(metric_value(r, metric));
  std::sort(costs.begin(), costs.end());
  std::sort(budgets.begin(), budgets.end());
  DataProfile prof;
  prof.metric = metric;
  const double total = static_cast<double>(records.size());
  const auto solved_end = std::lower_bound(costs.begin(), costs.end(), std::numeric_limits<double>::infinity());
  for (double b : budgets) {
    const auto within = std::upper_bound(costs.begin(), solved_end, b) - costs.begin();
    prof.points.emplace_back(b, static_cast<double>(within) / total);
  }
  return prof;
}

// ------------------------------------------------------------------ suites

struct SuiteOutput {
  std::vector<RunRecord> records;
  std::vector<SolverResult> results;  // parallel to records
};

inline std::string trace_file_name(const std::string& problem, const std::string& solver) {
  return problem + "__" + solver + ".csv";
}

// Runs every (problem, solver) pair in order; writes records.csv and
// traces/<problem>__<solver>.csv under out_dir when it is non-empty.
inline SuiteOutput run_suite(const std::vector<Problem>& problems, const std::vector<SolverDescriptor>& solvers,
                             const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir / "traces", ec);
    if (ec) throw std::runtime_error("cannot create " + (out_dir / "traces").string() + ": " + ec.message());
  }
  SuiteOutput out;
  for (const auto& p : problems) {
    const auto compiled = compile(p);
    for (const auto& s : solvers) {
      const auto t0 = std::chrono::steady_clock::now();
      SolverResult res = run_solver(s, *compiled);
      const auto t1 = std::chrono::steady_clock::now();
      RunRecord rec;
      rec.problem = p.name;
      rec.solver = s.name();
      rec.status = res.status;
      rec.counters = res.counters;
      rec.f_final = res.f_final;
      rec.g_norm = res.g_norm;
      rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
      if (!out_dir.empty()) write_trace_csv(out_dir / "traces" / trace_file_name(rec.problem, rec.solver), res.trace);
      out.records.push_back(std::move(rec));
      out.results.push_back(std::move(res));
    }
  }
  if (!out_dir.empty()) write_records_csv(out_dir / "records.csv", out.records);
  return out;
}

}  // namespace inthop
