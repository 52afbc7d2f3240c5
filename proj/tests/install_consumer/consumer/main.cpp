#include <cmath>
#include <cstdio>

#include "ops_ftrl/metrics.hpp"

int main() {
  using namespace ops_ftrl;
  const auto h = generate({MarketKind::kConstant, 2, 100, 0});
  const auto run = run_and_score(AlgoKind::kGradualVariation, h);
  std::printf("regret %.6f bound %.6f\n", run.trace.regret, run.bound);
  return run.compliant ? 0 : 1;
}
