#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sparsereg/errors.hpp"
#include "sparsereg/math.hpp"

namespace sparsereg {

struct Atom1D {
  double location = 0.0;
  double mass = 0.0;
};

// Finite signed atomic measure on the line, kept canonical: locations strictly
// increasing, coincident atoms merged by summing masses, negligible atoms
// dropped. Scale-aware default tolerances.
struct AtomicMeasure1D {
  std::vector<Atom1D> atoms;

  static AtomicMeasure1D from_atoms(std::vector<Atom1D> raw, double merge_tol = -1.0,
                                    double drop_tol = -1.0) {
    AtomicMeasure1D m;
    if (raw.empty()) return m;
    std::sort(raw.begin(), raw.end(),
              [](const Atom1D& a, const Atom1D& b) { return a.location < b.location; });
    if (merge_tol < 0.0) {
      const double range = raw.back().location - raw.front().location;
      merge_tol = 1e-9 * range;
    }
    // merge runs of atoms closer than merge_tol
    std::vector<Atom1D> merged;
    for (const Atom1D& a : raw) {
      if (!merged.empty() && a.location - merged.back().location <= merge_tol) {
        Atom1D& last = merged.back();
        last.location = 0.5 * (last.location + a.location);
        last.mass += a.mass;
      } else {
        merged.push_back(a);
      }
    }
    if (drop_tol < 0.0) {
      double max_mass = 0.0;
      for (const Atom1D& a : merged) max_mass = std::max(max_mass, std::abs(a.mass));
      drop_tol = 1e-10 * (max_mass + 1.0);
    }
    for (const Atom1D& a : merged)
      if (std::abs(a.mass) > drop_tol) m.atoms.push_back(a);
    return m;
  }

  bool empty() const { return atoms.empty(); }
};

// Total-variation norm: sum of |mass| over atoms.
inline double mnorm(const AtomicMeasure1D& m) {
  double s = 0.0;
  for (const Atom1D& a : m.atoms) s += std::abs(a.mass);
  return s;
}

// Uniform sampling grid for the mollified norm.
struct MollifierGrid {
  double lo = 0.0;
  double hi = 0.0;
  long n = 0;

  double spacing() const { return n > 0 ? (hi - lo) / static_cast<double>(n) : 0.0; }
};

inline MollifierGrid default_mollifier_grid(const AtomicMeasure1D& m, double eps) {
  if (!(eps > 0.0)) throw dimension_error("mollifier grid: eps must be positive");
  const double pad = 8.0 * std::sqrt(eps);
  double lo = -pad, hi = pad;
  if (!m.empty()) {
    lo = m.atoms.front().location - pad;
    hi = m.atoms.back().location + pad;
  }
  const double h = std::sqrt(eps) / 8.0;
  const long n = std::max<long>(16, static_cast<long>(std::ceil((hi - lo) / h)));
  return {lo, hi, n};
}

// Numerical L1 norm of the measure convolved with the Gaussian of variance
// eps: the mollifier construction of the M-norm. Midpoint rule; requires the
// grid to cover the atom support with an 8*sqrt(eps) margin and spacing at
// most sqrt(eps)/4.
inline double mollified_mnorm(const AtomicMeasure1D& m, double eps, const MollifierGrid& grid) {
  if (!(eps > 0.0)) throw dimension_error("mollified_mnorm: eps must be positive");
  if (grid.n <= 0) throw resolution_error("mollified_mnorm: empty grid");
  const double root_eps = std::sqrt(eps);
  if (grid.spacing() > root_eps / 4.0)
    throw resolution_error("mollified_mnorm: grid spacing " + std::to_string(grid.spacing()) +
                           " exceeds sqrt(eps)/4");
  if (!m.empty()) {
    const double pad = 8.0 * root_eps;
    if (grid.lo > m.atoms.front().location - pad || grid.hi < m.atoms.back().location + pad)
      throw resolution_error("mollified_mnorm: grid does not cover atom support +/- 8 sqrt(eps)");
  }
  const double h = grid.spacing();
  const double norm_c = 1.0 / std::sqrt(2.0 * std::numbers::pi * eps);
  double total = 0.0;
  for (long i = 0; i < grid.n; ++i) {
    const double y = grid.lo + (static_cast<double>(i) + 0.5) * h;
    double val = 0.0;
    for (const Atom1D& a : m.atoms) {
      const double d = y - a.location;
      val += a.mass * norm_c * std::exp(-d * d / (2.0 * eps));
    }
    total += std::abs(val);
  }
  return total * h;
}

inline double mollified_mnorm(const AtomicMeasure1D& m, double eps) {
  return mollified_mnorm(m, eps, default_mollifier_grid(m, eps));
}

}  // namespace sparsereg
