#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kinex/dynamics.hpp"
#include "kinex/errors.hpp"
#include "kinex/kernel.hpp"

namespace kinex {

struct LorenzPoint {
  double population = 0.0;  // cumulative population share
  double income = 0.0;      // cumulative income share
};

/// Piecewise-linear Lorenz curve through n+1 vertices, (0,0) first, (1,1) last.
/// Each class is a point mass at its average income.
struct LorenzCurve {
  std::vector<LorenzPoint> points;
};

inline LorenzCurve lorenz(std::span<const double> x, const ClassLadder& ladder) {
  const double mu = total_income(x, ladder);
  if (!(mu > 0.0)) throw DegenerateInput("lorenz: total income must be positive");
  double pop_total = 0.0;
  for (double v : x) pop_total += v;

  LorenzCurve curve;
  curve.points.reserve(x.size() + 1);
  curve.points.push_back({0.0, 0.0});
  double pop = 0.0;
  double inc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pop += x[i];
    inc += ladder[i] * x[i];
    curve.points.push_back({pop / pop_total, inc / mu});
  }
  return curve;
}

/// Gini index by the trapezoid rule on the Lorenz vertices; exact for the
/// piecewise-linear curve.
inline double gini(const LorenzCurve& curve) {
  double area2 = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    area2 += (b.population - a.population) * (b.income + a.income);
  }
  return 1.0 - area2;
}

inline double gini(std::span<const double> x, const ClassLadder& ladder) {
  return gini(lorenz(x, ladder));
}

/// Tax collected per unit time at state x (money units, scaled by the
/// transaction amount).
inline double tax_revenue(std::span<const double> x, const ModelKernel& m) {
  const std::size_t n = m.size();
  if (x.size() != n) throw InvalidArgument("tax_revenue: size mismatch");
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass += m.welfare[i] * x[i];
  if (!(mass > 0.0)) throw DegenerateInput("tax_revenue: zero welfare weight mass");
  const double share = (mass - m.welfare[n - 1] * x[n - 1]) / mass;

  double flow = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) flow += m.pay(h, k) * m.taxes[k] * x[h] * x[k];
  }
  return m.transaction() * flow * share;
}

inline std::vector<double> class_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("class_diff: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline FitResult linear_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DegenerateInput("linear_fit: need at least 2 points");
  const double count = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [px, py] : points) {
    mx += px;
    my += py;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [px, py] : points) {
    sxx += (px - mx) * (px - mx);
    sxy += (px - mx) * (py - my);
    syy += (py - my) * (py - my);
  }
  if (!(sxx > 0.0)) throw DegenerateInput("linear_fit: abscissa is constant");

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // Constant ordinate: the horizontal line is a perfect fit.
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace kinex
