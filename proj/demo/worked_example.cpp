// Interval Hessian of a two-variable polynomial over [0,2]^2 and the three
// eigenvalue lower bounds that drive the diagonal shift.

#include <cstdio>

#include "inthop.hpp"

int main() {
  const auto f = inthop::parse_expr(
      "(1.5 - x1*(1 - x2))^2 + (2.25 - x1*(1 - x2^2))^2 + (2.625 - x1*(1 - x2^3))^2", 2);
  const auto d = inthop::differentiate(f, 2);
  const inthop::IntervalVector box{inthop::Interval(0.0, 2.0), inthop::Interval(0.0, 2.0)};
  const auto ih = inthop::interval_hessian(d.hessian, box);
  std::printf("interval Hessian over [0,2]^2:\n");
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) std::printf("  [%10.4f, %10.4f]", ih(i, j).lo(), ih(i, j).hi());
    std::printf("\n");
  }
  for (auto m : {inthop::AlphaMethod::GGN, inthop::AlphaMethod::EM, inthop::AlphaMethod::MK}) {
    inthop::Counters ledger;
    const double lam = inthop::lambda_min_bound(ih, m, ledger);
    std::printf("%-4s lambda_min >= %10.4f   alpha = %9.4f\n", std::string(inthop::to_string(m)).c_str(), lam,
                inthop::alpha_from_lambda(lam));
  }
}
