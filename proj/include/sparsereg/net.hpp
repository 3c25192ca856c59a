#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsereg/activation.hpp"
#include "sparsereg/errors.hpp"
#include "sparsereg/math.hpp"

namespace sparsereg {

// One hidden unit: x -> v * sigma(w^T x - b). Bias convention is w^T x - b
// everywhere, including serialization.
struct Neuron {
  Vec w;
  double b = 0.0;
  Vec v;
};

// Shallow (one hidden layer) network with an unpenalized affine skip term:
//   f(x) = sum_k v_k sigma(w_k^T x - b_k) + C x + c0.
// Value type; all operations on it are pure functions.
struct ShallowNet {
  int input_dim = 0;
  int output_dim = 0;
  ActivationSpec activation = ActivationSpec::relu();
  std::vector<Neuron> neurons;
  Matrix skip;      // output_dim x input_dim
  Vec skip_offset;  // output_dim

  static ShallowNet make(int d, int D, ActivationSpec act = ActivationSpec::relu()) {
    ShallowNet n;
    n.input_dim = d;
    n.output_dim = D;
    n.activation = act;
    n.skip = Matrix(D, d);
    n.skip_offset.assign(D, 0.0);
    return n;
  }

  int width() const { return static_cast<int>(neurons.size()); }
};

inline void validate(const ShallowNet& net) {
  if (net.input_dim <= 0 || net.output_dim <= 0)
    throw dimension_error("shallow net: dimensions must be positive");
  if (net.skip.rows != net.output_dim || net.skip.cols != net.input_dim)
    throw dimension_error("shallow net: skip matrix shape mismatch");
  if (static_cast<int>(net.skip_offset.size()) != net.output_dim)
    throw dimension_error("shallow net: skip offset size mismatch");
  if (!all_finite(net.skip.data) || !all_finite(net.skip_offset))
    throw dimension_error("shallow net: non-finite skip entries");
  for (std::size_t k = 0; k < net.neurons.size(); ++k) {
    const Neuron& u = net.neurons[k];
    if (static_cast<int>(u.w.size()) != net.input_dim ||
        static_cast<int>(u.v.size()) != net.output_dim)
      throw dimension_error("shallow net: neuron " + std::to_string(k) + " shape mismatch");
    if (!all_finite(u.w) || !all_finite(u.v) || !std::isfinite(u.b))
      throw dimension_error("shallow net: neuron " + std::to_string(k) + " non-finite entries");
  }
}

inline Vec eval(const ShallowNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim)
    throw dimension_error("eval: input has dimension " + std::to_string(x.size()) +
                          ", net expects " + std::to_string(net.input_dim));
  Vec y = matvec(net.skip, x);
  axpy(1.0, net.skip_offset, y);
  for (const Neuron& u : net.neurons) {
    const double a = net.activation.value(dot(u.w, x) - u.b);
    if (a != 0.0) axpy(a, u.v, y);
  }
  return y;
}

// Scalar convenience for d = D = 1 nets.
inline double eval1(const ShallowNet& net, double x) {
  return eval(net, std::span<const double>(&x, 1))[0];
}

// Indices of neurons with exactly one of ||w||, ||v|| zero. The balance map
// is degenerate for these; rebalance leaves them untouched and reports them
// here instead.
inline std::vector<int> degenerate_neurons(const ShallowNet& net) {
  std::vector<int> idx;
  for (int k = 0; k < net.width(); ++k) {
    const bool wz = norm2(net.neurons[k].w) == 0.0;
    const bool vz = norm2(net.neurons[k].v) == 0.0;
    if (wz != vz) idx.push_back(k);
  }
  return idx;
}

// Per-neuron rescaling w <- g w, b <- g b, v <- v/g with g = sqrt(||v||/||w||),
// so that ||w|| = ||v|| afterwards. Function mapping unchanged (degree-1
// homogeneity). Neurons with a zero norm are left as they are.
inline ShallowNet rebalance(const ShallowNet& net) {
  if (!net.activation.degree_one_homogeneous())
    throw unsupported_error("rebalance requires a degree-1 homogeneous activation");
  ShallowNet out = net;
  for (Neuron& u : out.neurons) {
    const double wn = norm2(u.w);
    const double vn = norm2(u.v);
    if (wn == 0.0 || vn == 0.0) continue;
    const double g = std::sqrt(vn / wn);
    scale(u.w, g);
    u.b *= g;
    scale(u.v, 1.0 / g);
  }
  return out;
}

// Absorbs input-weight magnitudes into the output weights: every neuron with
// ||w|| > 0 ends with a unit-norm input weight; w = 0 neurons contribute the
// constant sigma(-b) v, which is folded into the skip offset and the neuron
// dropped.
inline ShallowNet normalize_input_weights(const ShallowNet& net) {
  if (!net.activation.degree_one_homogeneous())
    throw unsupported_error("normalize_input_weights requires a degree-1 homogeneous activation");
  ShallowNet out = net;
  out.neurons.clear();
  for (const Neuron& u : net.neurons) {
    const double wn = norm2(u.w);
    if (wn == 0.0) {
      const double a = net.activation.value(-u.b);
      if (a != 0.0) axpy(a, u.v, out.skip_offset);
      continue;
    }
    Neuron t = u;
    scale(t.w, 1.0 / wn);
    t.b /= wn;
    scale(t.v, wn);
    out.neurons.push_back(std::move(t));
  }
  return out;
}

inline int active_neuron_count(const ShallowNet& net, double tol) {
  if (tol < 0.0) throw dimension_error("active_neuron_count: tol must be nonnegative");
  int n = 0;
  for (const Neuron& u : net.neurons)
    if (norm2(u.v) > tol) ++n;
  return n;
}

// ---- deep nets ------------------------------------------------------------

// Activation tag applied after a layer's affine map; the final layer uses
// `none`. Only relu/linear hidden tags are accepted (the deep results concern
// ReLU networks with linear bottlenecks).
enum class LayerActivation { relu, linear, none };

inline std::string to_string(LayerActivation a) {
  switch (a) {
    case LayerActivation::relu:
      return "relu";
    case LayerActivation::linear:
      return "linear";
    case LayerActivation::none:
      return "none";
  }
  return "?";
}

inline LayerActivation layer_activation_from(const std::string& s) {
  if (s == "relu") return LayerActivation::relu;
  if (s == "linear") return LayerActivation::linear;
  if (s == "none") return LayerActivation::none;
  throw parse_error("unknown layer activation '" + s + "'");
}

// Optional low-rank factorization W = U V kept alongside the stored matrix
// (linear-bottleneck layers).
struct LayerFactorization {
  Matrix u;  // rows x r
  Matrix v;  // r x cols
};

struct Layer {
  Matrix weight;  // out x in; affine map z -> W z - b
  Vec bias;       // out
  LayerActivation activation = LayerActivation::relu;
  std::optional<LayerFactorization> factorization;
};

struct DeepNet {
  std::vector<Layer> layers;

  int depth() const { return static_cast<int>(layers.size()); }
  int input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().weight.rows; }
};

inline void validate(const DeepNet& net) {
  if (net.layers.empty()) throw dimension_error("deep net: needs at least one layer");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    if (layer.weight.rows <= 0 || layer.weight.cols <= 0)
      throw dimension_error("deep net: layer " + std::to_string(l) + " has empty weight");
    if (static_cast<int>(layer.bias.size()) != layer.weight.rows)
      throw dimension_error("deep net: layer " + std::to_string(l) + " bias size mismatch");
    if (!all_finite(layer.weight.data) || !all_finite(layer.bias))
      throw dimension_error("deep net: layer " + std::to_string(l) + " non-finite entries");
    if (l + 1 < net.layers.size() &&
        net.layers[l + 1].weight.cols != layer.weight.rows)
      throw dimension_error("deep net: layer " + std::to_string(l + 1) +
                            " input dim does not chain");
    if (l + 1 == net.layers.size()) {
      if (layer.activation != LayerActivation::none)
        throw dimension_error("deep net: last layer must carry the 'none' tag");
    } else if (layer.activation == LayerActivation::none) {
      throw dimension_error("deep net: hidden layer " + std::to_string(l) +
                            " may not carry the 'none' tag");
    }
    if (layer.factorization) {
      const auto& f = *layer.factorization;
      const int r = f.u.cols;
      if (f.u.rows != layer.weight.rows || f.v.cols != layer.weight.cols || f.v.rows != r)
        throw dimension_error("deep net: layer " + std::to_string(l) +
                              " factorization shape mismatch");
      if (r > std::min(layer.weight.rows, layer.weight.cols))
        throw dimension_error("deep net: layer " + std::to_string(l) +
                              " factorization rank exceeds min dimension");
      const Matrix prod = matmul(f.u, f.v);
      double wnorm = std::sqrt(layer.weight.frobenius_sq());
      if (max_abs_diff(prod, layer.weight) > 1e-12 * (wnorm + 1.0))
        throw dimension_error("deep net: layer " + std::to_string(l) +
                              " factorization does not reproduce the stored matrix");
    }
  }
}

inline Vec eval(const DeepNet& net, std::span<const double> x) {
  if (net.layers.empty()) throw dimension_error("eval: empty deep net");
  if (static_cast<int>(x.size()) != net.input_dim())
    throw dimension_error("eval: input has dimension " + std::to_string(x.size()) +
                          ", net expects " + std::to_string(net.input_dim()));
  Vec z(x.begin(), x.end());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    Vec u = matvec(layer.weight, z);
    axpy(-1.0, layer.bias, u);
    if (layer.activation == LayerActivation::relu)
      for (double& t : u) t = t > 0.0 ? t : 0.0;
    z = std::move(u);
  }
  return z;
}

// Hidden neuron k of layer l is active when the column k of the next weight
// matrix (its outgoing group) has norm above tol.
inline int active_neuron_count(const DeepNet& net, double tol) {
  if (tol < 0.0) throw dimension_error("active_neuron_count: tol must be nonnegative");
  int n = 0;
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
    const Matrix& next = net.layers[l + 1].weight;
    for (int k = 0; k < next.cols; ++k)
      if (next.col_norm(k) > tol) ++n;
  }
  return n;
}

}  // namespace sparsereg
