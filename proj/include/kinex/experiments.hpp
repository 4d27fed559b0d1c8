#pragma once

// Policy sweeps over the compiled model: initial conditions, tax-rate and
// welfare sweeps, the taxation-off baseline, and regressions of the Gini
// index against the policy parameter.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "kinex/dynamics.hpp"
#include "kinex/errors.hpp"
#include "kinex/kernel.hpp"
#include "kinex/metrics.hpp"

namespace kinex {

struct ScenarioConfig {
  int n = 15;
  double spacing = 25.0;
  double transaction = 1.0;
  double tau_min = 0.30;
  double tau_max = 0.45;
  double gamma = 0.5;
  double mu_target = 135.0;
  std::uint64_t seed = 1;
  SolverSettings solver{};

  ClassLadder ladder() const { return build_class_ladder(n, spacing); }

  FiscalPolicy policy() const { return FiscalPolicy{tau_min, tau_max, gamma, transaction}; }

  void validate() const {
    const auto lad = ladder();
    policy().validate(lad);
    solver.validate();
    if (!(mu_target > lad.lowest() && mu_target < lad.highest())) {
      throw InvalidArgument("ScenarioConfig: mu_target must lie strictly between r_1 and r_n");
    }
  }
};

struct TaxPair {
  double tau_min = 0.0;
  double tau_max = 0.0;
};

struct SweepRecord {
  double tau_min = 0.0;
  double tau_max = 0.0;
  double gamma = 0.0;
  double w_ratio = 0.0;
  double gini = std::numeric_limits<double>::quiet_NaN();
  double tax_revenue = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double elapsed = 0.0;
  std::size_t steps = 0;
  bool converged = false;
  std::string error;
  std::vector<double> x_hat;

  double delta_tau_points() const { return 100.0 * (tau_max - tau_min); }
};

namespace detail {

// Uniform in [0, 1) from the top 53 bits; reproducible across standard
// libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Random majority-poor initial distribution with total income mu_target.
///
/// Class j (0-based) gets (n - j) * u_j with u_j uniform in [0.5, 1.5); the
/// normalized draw is then blended with e_1 (draw too rich) or e_n (draw too
/// poor) so that total income equals mu_target.
inline DistributionState make_initial_condition(const ScenarioConfig& config) {
  const auto lad = config.ladder();
  const double target = config.mu_target;
  if (!(target > lad.lowest() && target < lad.highest())) {
    throw InvalidArgument("make_initial_condition: mu_target must lie strictly between r_1 and r_n");
  }
  const std::size_t n = lad.size();
  std::mt19937_64 rng(config.seed);
  std::vector<double> x(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = static_cast<double>(n - j) * (0.5 + detail::unit_uniform(rng));
    sum += x[j];
  }
  for (double& v : x) v /= sum;

  const double mu = total_income(x, lad);
  std::size_t anchor = 0;
  double keep = 1.0;
  if (mu > target) {
    keep = (target - lad.lowest()) / (mu - lad.lowest());
  } else if (mu < target) {
    anchor = n - 1;
    keep = (lad.highest() - target) / (lad.highest() - mu);
  }
  for (double& v : x) v *= keep;
  x[anchor] += 1.0 - keep;
  return DistributionState{std::move(x), 0.0};
}

/// Integrates one policy point from x0 and evaluates the metrics. Solver
/// failures are reported in the record instead of being thrown.
inline SweepRecord evaluate_policy(const ScenarioConfig& config, const FiscalPolicy& policy,
                                   const DistributionState& x0) {
  SweepRecord rec;
  rec.tau_min = policy.tau_min;
  rec.tau_max = policy.tau_max;
  rec.gamma = policy.gamma;
  const auto model = build_model(config.ladder(), policy);
  rec.w_ratio = model.welfare.rich_to_poor_ratio();
  try {
    auto eq = integrate_to_equilibrium(model, x0, config.solver);
    rec.gini = gini(eq.state.x, model.ladder);
    rec.tax_revenue = tax_revenue(eq.state.x, model);
    rec.mu = total_income(eq.state, model.ladder);
    rec.residual = eq.residual;
    rec.elapsed = eq.elapsed;
    rec.steps = eq.steps;
    rec.converged = true;
    rec.x_hat = std::move(eq.state.x);
  } catch (const NonConvergence& e) {
    rec.residual = e.residual();
    rec.error = e.what();
  } catch (const StepSizeError& e) {
    rec.error = e.what();
  }
  return rec;
}

/// Equilibrium for the configuration's own policy.
inline SweepRecord equilibrium_run(const ScenarioConfig& config) {
  config.validate();
  return evaluate_policy(config, config.policy(), make_initial_condition(config));
}

/// Runs `count` independent tasks on up to `jobs` threads (0 = all cores).
/// Results keep the task order.
template <typename Fn>
auto parallel_map(std::size_t count, unsigned jobs, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Gini and tax revenue for each (tau_min, tau_max) at the config's gamma,
/// all starting from the same initial condition.
inline std::vector<SweepRecord> tax_sweep(const ScenarioConfig& config,
                                          std::span<const TaxPair> pairs, unsigned jobs = 0) {
  config.validate();
  if (pairs.empty()) throw InvalidArgument("tax_sweep: no tax pairs given");
  std::vector<FiscalPolicy> policies;
  for (const auto& p : pairs) {
    FiscalPolicy pol = config.policy();
    pol.tau_min = p.tau_min;
    pol.tau_max = p.tau_max;
    pol.validate(config.ladder());
    policies.push_back(pol);
  }
  const auto x0 = make_initial_condition(config);
  return parallel_map(policies.size(), jobs,
                      [&](std::size_t i) { return evaluate_policy(config, policies[i], x0); });
}

/// Same as tax_sweep but varying gamma at the config's tax pair.
inline std::vector<SweepRecord> welfare_sweep(const ScenarioConfig& config,
                                              std::span<const double> gammas, unsigned jobs = 0) {
  config.validate();
  if (gammas.empty()) throw InvalidArgument("welfare_sweep: no gamma values given");
  std::vector<FiscalPolicy> policies;
  for (double g : gammas) {
    FiscalPolicy pol = config.policy();
    pol.gamma = g;
    pol.validate(config.ladder());
    policies.push_back(pol);
  }
  const auto x0 = make_initial_condition(config);
  return parallel_map(policies.size(), jobs,
                      [&](std::size_t i) { return evaluate_policy(config, policies[i], x0); });
}

/// Equilibrium with every tax rate set to zero: pure direct exchange.
inline SweepRecord pre_redistribution_run(const ScenarioConfig& config) {
  config.validate();
  FiscalPolicy pol = config.policy();
  pol.tau_min = 0.0;
  pol.tau_max = 0.0;
  return evaluate_policy(config, pol, make_initial_condition(config));
}

enum class Abscissa { delta_tau, w_ratio };

/// Fits G against delta_tau (percentage points) or w_n/w_1 over the
/// converged records.
inline FitResult regression_report(std::span<const SweepRecord> records, Abscissa abscissa) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (!r.converged) continue;
    const double xv = abscissa == Abscissa::delta_tau ? r.delta_tau_points() : r.w_ratio;
    pts.emplace_back(xv, r.gini);
  }
  if (pts.size() < 3) throw DegenerateInput("regression_report: need at least 3 converged records");
  return linear_fit(pts);
}

// Parameter grids of the reference experiments.
namespace presets {

inline constexpr double kExample1Mu = 135.00;
inline constexpr double kExample2Mu = 127.65;

inline std::vector<TaxPair> tax_pairs() {
  return {{0.30, 0.45}, {0.25, 0.50}, {0.20, 0.55}, {0.15, 0.60}, {0.10, 0.65}};
}

inline std::vector<double> welfare_gammas() {
  return {0.50, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15};
}

}  // namespace presets

}  // namespace kinex
