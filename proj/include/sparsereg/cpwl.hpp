#pragma once

#include <vector>

#include "sparsereg/measure.hpp"
#include "sparsereg/net.hpp"

namespace sparsereg {

// Continuous piecewise-linear function on the line:
//   f(x) = intercept + slope * x + sum_j slope_changes[j] * relu(x - knots[j]),
// knots strictly increasing.
struct Cpwl1D {
  Vec knots;
  Vec slope_changes;
  double slope = 0.0;
  double intercept = 0.0;

  int knot_count() const { return static_cast<int>(knots.size()); }
};

inline double eval(const Cpwl1D& f, double x) {
  double y = f.intercept + f.slope * x;
  for (std::size_t j = 0; j < f.knots.size(); ++j) {
    const double t = x - f.knots[j];
    if (t > 0.0) y += f.slope_changes[j] * t;
  }
  return y;
}

// Second-order total variation: sum of |slope change|.
inline double tv2(const Cpwl1D& f) {
  double s = 0.0;
  for (double a : f.slope_changes) s += std::abs(a);
  return s;
}

inline ShallowNet to_shallow(const Cpwl1D& f) {
  ShallowNet net = ShallowNet::make(1, 1, ActivationSpec::relu());
  for (std::size_t j = 0; j < f.knots.size(); ++j)
    net.neurons.push_back({{1.0}, f.knots[j], {f.slope_changes[j]}});
  net.skip(0, 0) = f.slope;
  net.skip_offset[0] = f.intercept;
  return net;
}

// Rewrites a scalar relu net in the right-ramp basis. A neuron v relu(wx - b)
// with w < 0 is a left ramp: |w| v relu(k - x) = |w| v relu(x - k) - v w x + v |w| k
// with k = b / w, so it contributes the same slope-change mass plus an affine
// correction. w = 0 neurons are constants and fold into the intercept.
inline Cpwl1D from_shallow(const ShallowNet& net) {
  if (net.input_dim != 1 || net.output_dim != 1)
    throw unsupported_error("from_shallow: needs d = D = 1");
  if (net.activation.kind != ActivationKind::relu)
    throw unsupported_error("from_shallow: relu nets only");
  Cpwl1D f;
  f.slope = net.skip(0, 0);
  f.intercept = net.skip_offset[0];
  std::vector<Atom1D> raw;
  for (const Neuron& u : net.neurons) {
    const double w = u.w[0], v = u.v[0];
    if (w == 0.0) {
      f.intercept += v * net.activation.value(-u.b);
      continue;
    }
    const double knot = u.b / w;
    raw.push_back({knot, v * std::abs(w)});
    if (w < 0.0) {
      f.slope += v * w;
      f.intercept += v * std::abs(w) * knot;
    }
  }
  // merge exact ties only: a nonzero merge tolerance would shift knots and
  // break the affine corrections added above
  const AtomicMeasure1D canon = AtomicMeasure1D::from_atoms(std::move(raw), 0.0, 0.0);
  for (const Atom1D& a : canon.atoms) {
    f.knots.push_back(a.location);
    f.slope_changes.push_back(a.mass);
  }
  return f;
}

}  // namespace sparsereg
