#pragma once

#include <vector>

#include "sparsereg/net.hpp"

namespace sparsereg {

// Half the squared Euclidean norm of all network weights; biases, skip matrix
// and skip offset are unregularized.
inline double weight_decay(const ShallowNet& net) {
  double s = 0.0;
  for (const Neuron& u : net.neurons) s += norm2_sq(u.w) + norm2_sq(u.v);
  return 0.5 * s;
}

inline double weight_decay(const DeepNet& net) {
  double s = 0.0;
  for (const Layer& layer : net.layers) s += layer.weight.frobenius_sq();
  return 0.5 * s;
}

// sum_k ||v_k|| ||w_k||; the balanced equivalent of weight decay for shallow
// nets. The skip term spans the regularizer's null space and contributes 0.
inline double path_norm(const ShallowNet& net) {
  double s = 0.0;
  for (const Neuron& u : net.neurons) s += norm2(u.v) * norm2(u.w);
  return s;
}

// Mixed l^{2,1} regularizer for deep relu/linear nets:
//   1/2 ||W^(1)||_F^2 + 1/2 ||W^(L)||_F^2
//   + sum over hidden layers l = 1..L-1 of sum_k ||row_k W^(l)|| ||col_k W^(l+1)||.
// Hidden neuron k of layer l has input weights row_k(W^(l)) and output weights
// col_k(W^(l+1)).
inline double deep_regularizer(const DeepNet& net) {
  for (const Layer& layer : net.layers)
    if (layer.activation == LayerActivation::none && &layer != &net.layers.back())
      throw unsupported_error("deep_regularizer: relu/linear tags only");
  if (net.layers.empty()) return 0.0;
  double s = 0.5 * net.layers.front().weight.frobenius_sq() +
             0.5 * net.layers.back().weight.frobenius_sq();
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
    const Matrix& w = net.layers[l].weight;
    const Matrix& next = net.layers[l + 1].weight;
    for (int k = 0; k < w.rows; ++k)
      s += norm2(w.row(k)) * next.col_norm(k);
  }
  return s;
}

// Proximal map of tau * ||.||_2: zero inside the ball of radius tau, shrink
// toward zero outside.
inline Vec prox_group(Vec v, double tau) {
  if (tau < 0.0) throw dimension_error("prox_group: tau must be nonnegative");
  if (tau == 0.0) return v;
  const double n = norm2(v);
  if (n <= tau) {
    std::fill(v.begin(), v.end(), 0.0);
    return v;
  }
  scale(v, 1.0 - tau / n);
  return v;
}

// sum_k |v_k| ||w_k||_2 for scalar-output nets: the closed-form second-order
// total variation of the net in the filtered Radon domain. Numerically equal
// to path_norm when D = 1; kept as a named quantity for its Radon-domain
// meaning.
inline double rnorm_closed_form(const ShallowNet& net) {
  if (net.output_dim != 1)
    throw unsupported_error("rnorm_closed_form is defined for scalar-valued nets only");
  double s = 0.0;
  for (const Neuron& u : net.neurons) s += std::abs(u.v[0]) * norm2(u.w);
  return s;
}

struct NeuronNorms {
  double w_norm = 0.0;
  double v_norm = 0.0;
  double product = 0.0;
};

struct RegularizerReport {
  double weight_decay = 0.0;
  double path_norm = 0.0;
  double gap = 0.0;  // weight_decay - path_norm; >= 0 up to roundoff (AM-GM)
  std::vector<NeuronNorms> per_neuron;
  int active_neurons = 0;
};

inline RegularizerReport make_report(const ShallowNet& net, double active_tol = 1e-9) {
  RegularizerReport r;
  r.weight_decay = weight_decay(net);
  r.path_norm = path_norm(net);
  r.gap = r.weight_decay - r.path_norm;
  r.per_neuron.reserve(net.neurons.size());
  for (const Neuron& u : net.neurons) {
    NeuronNorms n{norm2(u.w), norm2(u.v), 0.0};
    n.product = n.w_norm * n.v_norm;
    r.per_neuron.push_back(n);
  }
  r.active_neurons = active_neuron_count(net, active_tol);
  return r;
}

}  // namespace sparsereg
