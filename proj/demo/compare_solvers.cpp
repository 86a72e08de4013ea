// Solves Rosenbrock from (-1.2, 1) with each solver and prints the cost ledger.

#include <cstdio>

#include "inthop.hpp"

int main() {
  inthop::Problem p;
  p.name = "rosenbrock_2";
  p.n = 2;
  p.objective = inthop::parse_expr("100*(x2 - x1^2)^2 + (1 - x1)^2", 2);
  p.x0 = {-1.2, 1.0};
  const auto c = inthop::compile(p);

  std::vector<inthop::SolverDescriptor> solvers(4);
  solvers[0].kind = inthop::SolverKind::SteepestDescent;
  solvers[1].kind = inthop::SolverKind::Bfgs;
  solvers[2].kind = inthop::SolverKind::NewtonCami;
  solvers[3].kind = inthop::SolverKind::Inthop;

  std::printf("%-22s %-14s %8s %8s %6s %6s %10s\n", "solver", "status", "f_evals", "g_evals", "h", "n3", "f_final");
  for (const auto& s : solvers) {
    const auto r = inthop::run_solver(s, *c);
    std::printf("%-22s %-14s %8lld %8lld %6lld %6lld %10.3e\n", s.name().c_str(),
                std::string(inthop::to_string(r.status)).c_str(), static_cast<long long>(r.counters.f_evals),
                static_cast<long long>(r.counters.g_evals), static_cast<long long>(r.counters.h_evals),
                static_cast<long long>(r.counters.n3_ops), r.f_final);
  }
}
