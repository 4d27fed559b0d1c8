#pragma once

// Coefficients of the kinetic income-class model.
//
// Classes are indexed 0..n-1 throughout the library (class 0 is the poorest).
// A ModelKernel bundles everything that does not depend on the state x and is
// immutable once built, so it can be shared freely between threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "kinex/errors.hpp"

namespace kinex {

/// Ordered average incomes r_0 < r_1 < ... < r_{n-1} of the income classes.
class ClassLadder {
 public:
  explicit ClassLadder(std::vector<double> incomes) : r_(std::move(incomes)) {
    if (r_.size() < 2) throw InvalidArgument("ClassLadder: need at least 2 classes");
    if (!(r_.front() > 0.0)) throw InvalidArgument("ClassLadder: incomes must be positive");
    for (std::size_t i = 1; i < r_.size(); ++i) {
      if (!(r_[i] > r_[i - 1])) {
        throw InvalidArgument("ClassLadder: incomes must be strictly increasing");
      }
    }
  }

  std::size_t size() const noexcept { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  std::span<const double> incomes() const noexcept { return r_; }
  double lowest() const noexcept { return r_.front(); }
  double highest() const noexcept { return r_.back(); }

  /// r_{i+1} - r_i, the income step out of class i towards the next one.
  double gap(std::size_t i) const { return r_[i + 1] - r_[i]; }

  double min_gap() const {
    double g = gap(0);
    for (std::size_t i = 1; i + 1 < r_.size(); ++i) g = std::min(g, gap(i));
    return g;
  }

 private:
  std::vector<double> r_;
};

/// Evenly spaced ladder r_j = spacing * j, j = 1..n.
inline ClassLadder build_class_ladder(int n, double spacing) {
  if (n < 2) throw InvalidArgument("build_class_ladder: n must be >= 2");
  if (!(spacing > 0.0)) throw InvalidArgument("build_class_ladder: spacing must be > 0");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) r[static_cast<std::size_t>(j - 1)] = spacing * j;
  return ClassLadder(std::move(r));
}

/// Tax bounds, welfare shape and the amount of money moved per transaction.
struct FiscalPolicy {
  double tau_min = 0.30;
  double tau_max = 0.45;
  double gamma = 0.5;
  double transaction = 1.0;

  void validate() const {
    if (!(tau_min >= 0.0 && tau_min < 1.0)) {
      throw InvalidArgument("FiscalPolicy: tau_min must lie in [0, 1)");
    }
    if (!(tau_max >= 0.0 && tau_max < 1.0)) {
      throw InvalidArgument("FiscalPolicy: tau_max must lie in [0, 1)");
    }
    if (tau_min > tau_max) throw InvalidArgument("FiscalPolicy: tau_min > tau_max");
    if (!(gamma > 0.0 && gamma <= 0.5)) {
      throw InvalidArgument("FiscalPolicy: gamma must lie in (0, 1/2]");
    }
    if (!(transaction > 0.0)) throw InvalidArgument("FiscalPolicy: transaction must be > 0");
  }

  void validate(const ClassLadder& ladder) const {
    validate();
    if (!(transaction < ladder.min_gap())) {
      throw InvalidArgument("FiscalPolicy: transaction must be smaller than every class gap");
    }
  }
};

struct TaxSchedule {
  std::vector<double> rates;

  std::size_t size() const noexcept { return rates.size(); }
  double operator[](std::size_t j) const { return rates[j]; }
};

/// Linear progressive schedule from tau_min (poorest) to tau_max (richest).
inline TaxSchedule build_tax_schedule(const ClassLadder& ladder, const FiscalPolicy& policy) {
  policy.validate(ladder);
  const std::size_t n = ladder.size();
  TaxSchedule out{std::vector<double>(n)};
  const double spread = policy.tau_max - policy.tau_min;
  for (std::size_t j = 0; j < n; ++j) {
    out.rates[j] = policy.tau_min + static_cast<double>(j) / static_cast<double>(n - 1) * spread;
  }
  // Keep the endpoints exact regardless of rounding in the interpolation.
  out.rates.front() = policy.tau_min;
  out.rates.back() = policy.tau_max;
  return out;
}

/// Redistribution shares per class. Smaller gamma favours the poor classes;
/// gamma = 1/2 gives every class the same weight.
struct WelfareWeights {
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  double operator[](std::size_t j) const { return weights[j]; }
  /// w_n / w_1: welfare granted to the richest class relative to the poorest.
  double rich_to_poor_ratio() const { return weights.back() / weights.front(); }
};

inline WelfareWeights build_welfare_weights(const ClassLadder& ladder, double gamma) {
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    throw InvalidArgument("build_welfare_weights: gamma must lie in (0, 1/2]");
  }
  const std::size_t n = ladder.size();
  const double nd = static_cast<double>(n);
  const double span = ladder.highest() - ladder.lowest();
  WelfareWeights out{std::vector<double>(n)};
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double j = static_cast<double>(idx + 1);
    out.weights[idx] =
        ladder[n - 1 - idx] + 2.0 / (nd - 1.0) * gamma * (j - (nd + 1.0) / 2.0) * span;
    if (!(out.weights[idx] > 0.0)) {
      std::ostringstream msg;
      msg << "build_welfare_weights: weight of class " << idx << " is " << out.weights[idx]
          << ", must be positive";
      throw ConstructionError(msg.str());
    }
  }
  return out;
}

/// p(h, k): probability that in an h-k encounter the h-individual pays.
class PayMatrix {
 public:
  explicit PayMatrix(std::size_t n) : n_(n), p_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t h, std::size_t k) const { return p_[h * n_ + k]; }
  double& operator()(std::size_t h, std::size_t k) { return p_[h * n_ + k]; }

 private:
  std::size_t n_;
  std::vector<double> p_;
};

inline PayMatrix build_pay_matrix(const ClassLadder& ladder) {
  const std::size_t n = ladder.size();
  const double rn = ladder.highest();
  PayMatrix p(n);
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) p(h, k) = std::min(ladder[h], ladder[k]) / (4.0 * rn);
  }
  // Exception families, later ones overwrite earlier ones.
  for (std::size_t j = 1; j + 1 < n; ++j) p(j, j) = ladder[j] / (2.0 * rn);
  for (std::size_t h = 1; h < n; ++h) p(h, 0) = ladder[0] / (2.0 * rn);
  const double corner = p(n - 1, 0);
  for (std::size_t k = 0; k + 1 < n; ++k) p(n - 1, k) = ladder[k] / (2.0 * rn);
  if (p(n - 1, 0) != corner) {
    throw ConstructionError("build_pay_matrix: inconsistent exceptions at (n, 1)");
  }
  for (std::size_t k = 0; k < n; ++k) p(0, k) = 0.0;
  for (std::size_t h = 0; h < n; ++h) p(h, n - 1) = 0.0;

  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      if (p(h, k) < 0.0 || p(h, k) > 1.0 || p(h, k) + p(k, h) > 1.0) {
        throw ConstructionError("build_pay_matrix: probabilities out of range");
      }
    }
  }
  return p;
}

/// C(h, k, i): probability density that an h-individual lands in class i after
/// a direct interaction with a k-individual. Nonzero only for |i - h| <= 1.
class DirectKernel {
 public:
  static constexpr double kStochasticityTol = 1e-12;

  explicit DirectKernel(std::size_t n) : n_(n), c_(n * n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t h, std::size_t k, std::size_t i) const {
    return c_[(h * n_ + k) * n_ + i];
  }
  double& operator()(std::size_t h, std::size_t k, std::size_t i) {
    return c_[(h * n_ + k) * n_ + i];
  }

 private:
  std::size_t n_;
  std::vector<double> c_;
};

/// Fills C landing-class by landing-class: each i receives the payer stepping
/// down from i+1, the stayers, and the receiver stepping up from i-1. Addenda
/// outside their index window are dropped, not clamped.
inline DirectKernel build_direct_kernel(const ClassLadder& ladder, const PayMatrix& pay,
                                        const TaxSchedule& taxes, double transaction) {
  const std::size_t n = ladder.size();
  if (pay.size() != n || taxes.size() != n) {
    throw InvalidArgument("build_direct_kernel: size mismatch between ladder, pay and taxes");
  }
  if (!(transaction > 0.0 && transaction < ladder.min_gap())) {
    throw InvalidArgument("build_direct_kernel: transaction must lie in (0, min class gap)");
  }
  const double s = transaction;
  const std::size_t last = n - 1;
  DirectKernel c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      // payer from class i+1 drops to i
      if (i < last && k < last) {
        c(i + 1, k, i) = pay(i + 1, k) * s * (1.0 - taxes[k]) / ladder.gap(i);
      }
      double stay = 1.0;
      // receiver in class i advances
      if (i < last && k >= 1) stay -= pay(k, i) * s * (1.0 - taxes[i]) / ladder.gap(i);
      // payer in class i drops
      if (i >= 1 && k < last) stay -= pay(i, k) * s * (1.0 - taxes[k]) / ladder.gap(i - 1);
      if (stay < 0.0) {
        std::ostringstream msg;
        msg << "build_direct_kernel: negative stay probability " << stay << " at (i=" << i
            << ", k=" << k << "); transaction too large for the ladder";
        throw ConstructionError(msg.str());
      }
      c(i, k, i) = stay;
      // receiver from class i-1 advances to i
      if (i >= 1 && k >= 1) {
        c(i - 1, k, i) = pay(k, i - 1) * s * (1.0 - taxes[i - 1]) / ladder.gap(i - 1);
      }
    }
  }
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (c(h, k, i) < 0.0) throw ConstructionError("build_direct_kernel: negative entry");
        sum += c(h, k, i);
      }
      if (std::abs(sum - 1.0) >= DirectKernel::kStochasticityTol) {
        throw ConstructionError("build_direct_kernel: column sum differs from 1");
      }
    }
  }
  return c;
}

/// The compiled model for one policy point.
struct ModelKernel {
  ClassLadder ladder;
  FiscalPolicy policy;
  TaxSchedule taxes;
  WelfareWeights welfare;
  PayMatrix pay;
  DirectKernel direct;

  std::size_t size() const noexcept { return ladder.size(); }
  double transaction() const noexcept { return policy.transaction; }
};

inline ModelKernel build_model(ClassLadder ladder, const FiscalPolicy& policy) {
  policy.validate(ladder);
  auto taxes = build_tax_schedule(ladder, policy);
  auto welfare = build_welfare_weights(ladder, policy.gamma);
  auto pay = build_pay_matrix(ladder);
  auto direct = build_direct_kernel(ladder, pay, taxes, policy.transaction);
  return ModelKernel{std::move(ladder), policy,          std::move(taxes),
                     std::move(welfare), std::move(pay), std::move(direct)};
}

}  // namespace kinex
