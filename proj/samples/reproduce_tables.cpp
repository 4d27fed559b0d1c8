// Prints the tax-rate and welfare sweeps for both reference incomes together
// with the pre-redistribution Gini index.

#include <cstdio>

#include "kinex/kinex.hpp"

int main() {
  using namespace kinex;
  for (double mu : {presets::kExample1Mu, presets::kExample2Mu}) {
    ScenarioConfig cfg;
    cfg.mu_target = mu;
    std::printf("mu = %.2f\n  tau_min tau_max  Gini   TR\n", mu);
    for (const auto& r : tax_sweep(cfg, presets::tax_pairs())) {
      std::printf("  %5.2f   %5.2f   %.3f  %.4f\n", r.tau_min, r.tau_max, r.gini, r.tax_revenue);
    }
    std::printf("  gamma  w15/w1  Gini   TR\n");
    for (const auto& r : welfare_sweep(cfg, presets::welfare_gammas())) {
      std::printf("  %4.2f   %4.2f    %.3f  %.4f\n", r.gamma, r.w_ratio, r.gini, r.tax_revenue);
    }
    std::printf("  pre-redistribution Gini: %.3f\n\n", pre_redistribution_run(cfg).gini);
  }
}
