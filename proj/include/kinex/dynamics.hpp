#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "kinex/errors.hpp"
#include "kinex/kernel.hpp"

namespace kinex {

/// Population fractions per class at model time t.
struct DistributionState {
  std::vector<double> x;
  double t = 0.0;

  std::size_t size() const noexcept { return x.size(); }
};

/// Unit vector: all mass in class `cls`.
inline DistributionState vertex_state(std::size_t n, std::size_t cls) {
  DistributionState s{std::vector<double>(n, 0.0), 0.0};
  s.x.at(cls) = 1.0;
  return s;
}

inline double total_income(std::span<const double> x, const ClassLadder& ladder) {
  if (x.size() != ladder.size()) throw InvalidArgument("total_income: size mismatch");
  double mu = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mu += ladder[i] * x[i];
  return mu;
}

inline double total_income(const DistributionState& s, const ClassLadder& ladder) {
  return total_income(std::span<const double>(s.x), ladder);
}

namespace detail {

inline double weight_mass(const WelfareWeights& w, std::span<const double> x, std::size_t upto) {
  double m = 0.0;
  for (std::size_t j = 0; j < upto; ++j) m += w[j] * x[j];
  return m;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace detail

/// Indirect (taxation/redistribution) variation density T = U + V for landing
/// class i when an h-individual pays a k-individual. U moves recipients of
/// redistributed tax one class up, V moves the tax payer one class down.
/// The h > 0 condition of the payer is carried by pay(0, k) == 0.
inline double indirect_term(const ModelKernel& m, std::size_t i, std::size_t h, std::size_t k,
                            std::span<const double> x) {
  const std::size_t n = m.size();
  if (i >= n || h >= n || k >= n || x.size() != n) {
    throw InvalidArgument("indirect_term: index or size out of range");
  }
  const auto& r = m.ladder;
  const auto& w = m.welfare;
  const double mass = detail::weight_mass(w, x, n);
  if (!(mass > 0.0)) throw DegenerateInput("indirect_term: zero welfare weight mass");
  const double levy = m.pay(h, k) * m.transaction() * m.taxes[k];

  double advance = 0.0;
  if (i >= 1) advance += w[i - 1] * x[i - 1] / (r[i] - r[i - 1]);
  if (i + 1 < n) advance -= w[i] * x[i] / (r[i + 1] - r[i]);
  const double u = levy / mass * advance;

  double retreat = 0.0;
  if (i + 1 < n && h == i + 1) retreat += 1.0 / (r[h] - r[i]);
  if (i >= 1 && h == i) retreat -= 1.0 / (r[h] - r[i - 1]);
  const double v = levy * detail::weight_mass(w, x, n - 1) / mass * retreat;

  return u + v;
}

/// dx/dt of the evolution system, written into `out`.
///
/// The double sum over (h, k) is factored: C is tridiagonal in h, and T only
/// depends on (h, k) through p(h, k) * tau_k, so the whole evaluation is O(n^2).
inline void rhs(const ModelKernel& m, std::span<const double> x, std::span<double> out) {
  const std::size_t n = m.size();
  if (x.size() != n || out.size() != n) throw InvalidArgument("rhs: size mismatch");
  const auto& r = m.ladder;
  const double s = m.transaction();

  // levy[h] = sum_k p(h,k) tau_k x_k
  std::vector<double> levy(n, 0.0);
  double taxed = 0.0;
  double mass = 0.0;
  double total = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += m.pay(h, k) * m.taxes[k] * x[k];
    levy[h] = acc;
    taxed += x[h] * acc;
    mass += m.welfare[h] * x[h];
    total += x[h];
  }
  taxed *= s;

  double advance_scale = 0.0;
  double retreat_scale = 0.0;
  if (taxed != 0.0) {
    if (!(mass > 0.0)) throw DegenerateInput("rhs: zero welfare weight mass");
    advance_scale = taxed / mass;
    retreat_scale = s * (mass - m.welfare[n - 1] * x[n - 1]) / mass;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double gain = 0.0;
    const std::size_t h_lo = i == 0 ? 0 : i - 1;
    const std::size_t h_hi = std::min(i + 1, n - 1);
    for (std::size_t h = h_lo; h <= h_hi; ++h) {
      if (x[h] == 0.0) continue;
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += m.direct(h, k, i) * x[k];
      gain += acc * x[h];
    }
    if (advance_scale != 0.0) {
      double adv = 0.0;
      if (i >= 1) adv += m.welfare[i - 1] * x[i - 1] / r.gap(i - 1);
      if (i + 1 < n) adv -= m.welfare[i] * x[i] / r.gap(i);
      double ret = 0.0;
      if (i + 1 < n) ret += x[i + 1] * levy[i + 1] / r.gap(i);
      if (i >= 1) ret -= x[i] * levy[i] / r.gap(i - 1);
      gain += advance_scale * adv + retreat_scale * ret;
    }
    out[i] = gain - x[i] * total;
  }
}

inline std::vector<double> rhs(const ModelKernel& m, std::span<const double> x) {
  std::vector<double> out(x.size());
  rhs(m, x, out);
  return out;
}

inline std::vector<double> rhs(const ModelKernel& m, const DistributionState& s) {
  return rhs(m, std::span<const double>(s.x));
}

/// Drift limits enforced after every integration step.
inline constexpr double kStepNegativityLimit = 1e-9;
inline constexpr double kStepMassDriftLimit = 1e-7;

/// One classical RK4 step. Throws StepSizeError if the result leaves the simplex.
inline DistributionState step(const ModelKernel& m, const DistributionState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be > 0");
  const std::size_t n = m.size();
  if (s.size() != n) throw InvalidArgument("step: state size mismatch");

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(m, s.x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s.x[i] + 0.5 * dt * k1[i];
  rhs(m, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s.x[i] + 0.5 * dt * k2[i];
  rhs(m, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s.x[i] + dt * k3[i];
  rhs(m, tmp, k4);

  DistributionState next{std::vector<double>(n), s.t + dt};
  double sum = 0.0;
  double lowest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    next.x[i] = s.x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    sum += next.x[i];
    lowest = std::min(lowest, next.x[i]);
  }
  if (lowest < -kStepNegativityLimit || std::abs(sum - 1.0) > kStepMassDriftLimit) {
    std::ostringstream msg;
    msg << "step: left the simplex (min x = " << lowest << ", sum x = " << sum
        << ") at t = " << next.t << "; reduce dt";
    throw StepSizeError(msg.str());
  }
  return next;
}

struct SolverSettings {
  double tol = 1e-10;
  double dt = 0.1;
  double max_time = 1e6;
  std::size_t check_every = 100;

  void validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("SolverSettings: tol must be > 0");
    if (!(dt > 0.0)) throw InvalidArgument("SolverSettings: dt must be > 0");
    if (!(max_time > 0.0)) throw InvalidArgument("SolverSettings: max_time must be > 0");
    if (check_every == 0) throw InvalidArgument("SolverSettings: check_every must be >= 1");
  }
};

struct EquilibriumResult {
  DistributionState state;
  double residual = 0.0;  // max-norm of dx/dt at `state`
  double elapsed = 0.0;   // model time
  std::size_t steps = 0;
};

/// Called with the current state at every residual check.
using TrajectoryObserver = std::function<void(const DistributionState&)>;

inline void check_simplex(std::span<const double> x, std::size_t n, const char* who) {
  if (x.size() != n) throw InvalidArgument(std::string(who) + ": state size mismatch");
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) throw InvalidArgument(std::string(who) + ": negative class fraction");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument(std::string(who) + ": not on the simplex");
}

/// Integrates from x0 until the max-norm of dx/dt drops below settings.tol.
/// The residual is checked at the start and then every `check_every` steps.
inline EquilibriumResult integrate_to_equilibrium(const ModelKernel& m,
                                                  const DistributionState& x0,
                                                  const SolverSettings& settings = {},
                                                  const TrajectoryObserver& observer = {}) {
  settings.validate();
  check_simplex(x0.x, m.size(), "integrate_to_equilibrium");

  DistributionState s = x0;
  std::size_t steps = 0;
  std::vector<double> d(m.size());
  for (;;) {
    if (observer) observer(s);
    rhs(m, s.x, d);
    const double residual = detail::max_abs(d);
    const double elapsed = static_cast<double>(steps) * settings.dt;
    if (residual < settings.tol) return EquilibriumResult{std::move(s), residual, elapsed, steps};
    if (elapsed >= settings.max_time) {
      std::ostringstream msg;
      msg << "integrate_to_equilibrium: no convergence within t = " << settings.max_time
          << " (residual " << residual << ", tol " << settings.tol << ")";
      throw NonConvergence(msg.str(), residual);
    }
    for (std::size_t j = 0; j < settings.check_every; ++j) {
      s = step(m, s, settings.dt);
      ++steps;
    }
    s.t = x0.t + static_cast<double>(steps) * settings.dt;
  }
}

}  // namespace kinex
