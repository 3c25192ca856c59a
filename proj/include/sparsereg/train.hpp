#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "sparsereg/dataset.hpp"
#include "sparsereg/net.hpp"
#include "sparsereg/regularizers.hpp"
#include "sparsereg/rng.hpp"

namespace sparsereg {

inline double squared_loss(std::span<const double> y, std::span<const double> z) {
  if (y.size() != z.size()) throw dimension_error("squared_loss: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - z[i];
    s += d * d;
  }
  return s;
}

inline double data_loss(const ShallowNet& net, const Dataset& data) {
  double s = 0.0;
  for (int n = 0; n < data.size(); ++n) s += squared_loss(data.targets[n], eval(net, data.inputs[n]));
  return s;
}

inline double data_loss(const DeepNet& net, const Dataset& data) {
  double s = 0.0;
  for (int n = 0; n < data.size(); ++n) s += squared_loss(data.targets[n], eval(net, data.inputs[n]));
  return s;
}

enum class TrainMode { gd_weight_decay, prox_path_norm };

struct TrainConfig {
  double lambda = 0.0;
  double step_size = 1e-2;
  long max_iters = 10000;
  int restarts = 1;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::gd_weight_decay;
  double stop_tol = 1e-10;   // relative objective change over a 50-iteration window
  double grad_tol = 0.0;     // additional stop on gradient norm; 0 disables
  double init_scale = 1.0;   // norm of the initial input weights
  int width = 8;             // K, used by the standard initializer
  bool skip_connection = true;
  bool line_search = true;   // backtracking (halving, Armijo 1e-4) on divergence
  long trace_every = 1;      // record every n-th iterate (first and last always)
};

struct TraceRow {
  long iter = 0;
  double objective = 0.0;
  double loss = 0.0;
  double reg = 0.0;
  int active_neurons = 0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
  long iterations = 0;
  int restart_index = 0;
};

inline std::string trace_csv(const TrainTrace& t) {
  CsvWriter w("trace/1", {"iter", "objective", "loss", "reg", "active_neurons"});
  for (const TraceRow& r : t.rows)
    w.row().cell(r.iter).cell(r.objective).cell(r.loss).cell(r.reg).cell(r.active_neurons);
  return w.str();
}

// ---- gradients -------------------------------------------------------------

// Gradient of sum_n ||y_n - f(x_n)||^2 with respect to every shallow-net
// parameter. Exact wherever the activation is differentiable; the relu
// subgradient at the kink is 0.
struct ShallowGrad {
  std::vector<Vec> dw;
  Vec db;
  std::vector<Vec> dv;
  Matrix dc;
  Vec dc0;

  double norm() const {
    double s = norm2_sq(db) + norm2_sq(dc.data) + norm2_sq(dc0);
    for (const Vec& g : dw) s += norm2_sq(g);
    for (const Vec& g : dv) s += norm2_sq(g);
    return std::sqrt(s);
  }
};

inline ShallowGrad grad_shallow(const ShallowNet& net, const Dataset& data) {
  const int K = net.width();
  ShallowGrad g;
  g.dw.assign(K, Vec(net.input_dim, 0.0));
  g.db.assign(K, 0.0);
  g.dv.assign(K, Vec(net.output_dim, 0.0));
  g.dc = Matrix(net.output_dim, net.input_dim);
  g.dc0.assign(net.output_dim, 0.0);

  Vec pre(K), act(K);
  for (int n = 0; n < data.size(); ++n) {
    const Vec& x = data.inputs[n];
    Vec f = matvec(net.skip, x);
    axpy(1.0, net.skip_offset, f);
    for (int k = 0; k < K; ++k) {
      pre[k] = dot(net.neurons[k].w, x) - net.neurons[k].b;
      act[k] = net.activation.value(pre[k]);
      if (act[k] != 0.0) axpy(act[k], net.neurons[k].v, f);
    }
    // residual gradient: d loss / d f = 2 (f - y)
    Vec r(net.output_dim);
    for (int i = 0; i < net.output_dim; ++i) r[i] = 2.0 * (f[i] - data.targets[n][i]);
    for (int k = 0; k < K; ++k) {
      if (act[k] != 0.0) axpy(act[k], r, g.dv[k]);
      const double slope = net.activation.derivative(pre[k]);
      if (slope != 0.0) {
        const double inner = slope * dot(r, net.neurons[k].v);
        if (inner != 0.0) {
          axpy(inner, x, g.dw[k]);
          g.db[k] -= inner;
        }
      }
    }
    for (int i = 0; i < net.output_dim; ++i) {
      if (r[i] == 0.0) continue;
      axpy(r[i], x, g.dc.row(i));
      g.dc0[i] += r[i];
    }
  }
  return g;
}

// Backpropagation through a deep net for the same loss.
struct DeepGrad {
  std::vector<Matrix> dw;
  std::vector<Vec> db;

  double norm() const {
    double s = 0.0;
    for (const Matrix& m : dw) s += norm2_sq(m.data);
    for (const Vec& b : db) s += norm2_sq(b);
    return std::sqrt(s);
  }
};

inline DeepGrad grad_deep(const DeepNet& net, const Dataset& data) {
  const int L = net.depth();
  DeepGrad g;
  g.dw.reserve(L);
  g.db.reserve(L);
  for (const Layer& layer : net.layers) {
    g.dw.emplace_back(layer.weight.rows, layer.weight.cols);
    g.db.emplace_back(layer.weight.rows, 0.0);
  }
  std::vector<Vec> inputs(L);  // layer inputs z^(l-1)
  std::vector<Vec> pres(L);    // pre-activations u^(l)
  for (int n = 0; n < data.size(); ++n) {
    Vec z = data.inputs[n];
    for (int l = 0; l < L; ++l) {
      inputs[l] = z;
      Vec u = matvec(net.layers[l].weight, z);
      axpy(-1.0, net.layers[l].bias, u);
      pres[l] = u;
      if (net.layers[l].activation == LayerActivation::relu)
        for (double& t : u) t = t > 0.0 ? t : 0.0;
      z = std::move(u);
    }
    Vec delta(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) delta[i] = 2.0 * (z[i] - data.targets[n][i]);
    for (int l = L - 1; l >= 0; --l) {
      const Layer& layer = net.layers[l];
      if (layer.activation == LayerActivation::relu)
        for (std::size_t i = 0; i < delta.size(); ++i)
          if (pres[l][i] <= 0.0) delta[i] = 0.0;
      for (int i = 0; i < layer.weight.rows; ++i) {
        if (delta[i] != 0.0) {
          axpy(delta[i], inputs[l], g.dw[l].row(i));
          g.db[l][i] -= delta[i];
        }
      }
      if (l > 0) {
        Vec prev(layer.weight.cols, 0.0);
        for (int i = 0; i < layer.weight.rows; ++i)
          if (delta[i] != 0.0) axpy(delta[i], layer.weight.row(i), prev);
        delta = std::move(prev);
      }
    }
  }
  return g;
}

// ---- initialization --------------------------------------------------------

// Standard initializer: input weights uniform on the sphere of radius
// init_scale, biases uniform over the data's projection range (so every kink
// starts inside the data), output weights zero, skip fitted by least squares.
inline ShallowNet init_shallow(const Dataset& data, const TrainConfig& cfg, RngStream rng,
                               ActivationSpec act = ActivationSpec::relu()) {
  validate(data);
  ShallowNet net = ShallowNet::make(data.input_dim(), data.output_dim(), act);
  for (int k = 0; k < cfg.width; ++k) {
    Neuron u;
    u.w = rng.unit_sphere(net.input_dim);
    if (cfg.init_scale != 1.0) scale(u.w, cfg.init_scale);
    double lo = 0.0, hi = 0.0;
    for (int n = 0; n < data.size(); ++n) {
      const double p = dot(u.w, data.inputs[n]);
      if (n == 0) lo = hi = p;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    u.b = rng.uniform(lo, hi);
    u.v.assign(net.output_dim, 0.0);
    net.neurons.push_back(std::move(u));
  }
  if (cfg.skip_connection && data.size() > 0) {
    // least-squares affine fit [x 1] -> y
    Matrix a(data.size(), net.input_dim + 1);
    for (int n = 0; n < data.size(); ++n) {
      for (int j = 0; j < net.input_dim; ++j) a(n, j) = data.inputs[n][j];
      a(n, net.input_dim) = 1.0;
    }
    for (int i = 0; i < net.output_dim; ++i) {
      Vec y(data.size());
      for (int n = 0; n < data.size(); ++n) y[n] = data.targets[n][i];
      const Vec beta = lstsq(a, y);
      for (int j = 0; j < net.input_dim; ++j) net.skip(i, j) = beta[j];
      net.skip_offset[i] = beta[net.input_dim];
    }
  }
  return net;
}

// ---- trainers --------------------------------------------------------------

namespace detail {

inline constexpr double kDivergenceGuard = 1e12;
inline constexpr double kArmijo = 1e-4;
inline constexpr int kStopWindow = 50;

struct StopState {
  double window_ref = 0.0;
  int since = 0;
  bool first = true;

  // true when the relative objective change over the window is below tol
  bool update(double objective, double tol) {
    if (first) {
      window_ref = objective;
      first = false;
      return false;
    }
    if (++since < kStopWindow) return false;
    const bool stop = std::abs(window_ref - objective) <= tol * (1.0 + std::abs(window_ref));
    window_ref = objective;
    since = 0;
    return stop;
  }
};

inline void record(TrainTrace& trace, const TrainConfig& cfg, long iter, double obj, double loss,
                   double reg, int active, bool force = false) {
  if (force || cfg.trace_every <= 1 || iter % cfg.trace_every == 0 || iter == 0)
    trace.rows.push_back({iter, obj, loss, reg, active});
}

// Squared norm of the full objective gradient: loss gradient plus the decay
// term on w and v; skip entries only when the skip is being trained.
inline double gd_grad_norm_sq(const ShallowNet& net, const ShallowGrad& g, double lambda,
                              bool skip_trained) {
  double s = norm2_sq(g.db);
  for (int k = 0; k < net.width(); ++k) {
    for (int j = 0; j < net.input_dim; ++j) {
      const double t = g.dw[k][j] + lambda * net.neurons[k].w[j];
      s += t * t;
    }
    for (int j = 0; j < net.output_dim; ++j) {
      const double t = g.dv[k][j] + lambda * net.neurons[k].v[j];
      s += t * t;
    }
  }
  if (skip_trained) s += norm2_sq(g.dc.data) + norm2_sq(g.dc0);
  return s;
}

}  // namespace detail

// Gradient descent on data loss + lambda * weight_decay. Biases and the skip
// term receive the loss gradient only. Backtracking line search keeps the
// recorded objective monotone; with line search off, a fixed step is used and
// blow-ups raise divergence_error. Returns the best iterate by objective.
inline std::pair<ShallowNet, TrainTrace> train_gd_weight_decay(const ShallowNet& net0,
                                                               const Dataset& data,
                                                               const TrainConfig& cfg) {
  if (cfg.mode != TrainMode::gd_weight_decay)
    throw unsupported_error("train_gd_weight_decay: cfg.mode mismatch");
  validate(net0);
  validate(data);
  ShallowNet net = net0;
  TrainTrace trace;
  const auto objective = [&](const ShallowNet& n) {
    return data_loss(n, data) + cfg.lambda * weight_decay(n);
  };
  auto apply_step = [&](const ShallowNet& n, const ShallowGrad& g, double eta) {
    ShallowNet t = n;
    for (int k = 0; k < t.width(); ++k) {
      axpy(-eta, g.dw[k], t.neurons[k].w);
      if (cfg.lambda != 0.0) axpy(-eta * cfg.lambda, n.neurons[k].w, t.neurons[k].w);
      t.neurons[k].b -= eta * g.db[k];
      axpy(-eta, g.dv[k], t.neurons[k].v);
      if (cfg.lambda != 0.0) axpy(-eta * cfg.lambda, n.neurons[k].v, t.neurons[k].v);
    }
    if (cfg.skip_connection) {
      axpy(-eta, g.dc.data, t.skip.data);
      axpy(-eta, g.dc0, t.skip_offset);
    }
    return t;
  };
  double obj = objective(net);
  double best_obj = obj;
  ShallowNet best = net;
  double eta = cfg.step_size;
  detail::StopState stop;
  long iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    ShallowGrad g = grad_shallow(net, data);
    const double gn_sq = detail::gd_grad_norm_sq(net, g, cfg.lambda, cfg.skip_connection);
    const double gnorm = std::sqrt(gn_sq);
    detail::record(trace, cfg, iter, obj, data_loss(net, data), weight_decay(net),
                   active_neuron_count(net, 0.0));
    if (cfg.grad_tol > 0.0 && gnorm < cfg.grad_tol) break;
    ShallowNet next = apply_step(net, g, eta);
    double next_obj = objective(next);
    if (cfg.line_search) {
      int halvings = 0;
      while (next_obj > obj - detail::kArmijo * eta * gn_sq && halvings < 60) {
        eta *= 0.5;
        ++halvings;
        next = apply_step(net, g, eta);
        next_obj = objective(next);
      }
      if (halvings == 60) break;  // no descent direction left at machine scale
      if (halvings == 0) eta = std::min(eta * 1.25, cfg.step_size * 64.0);
    }
    if (!std::isfinite(next_obj) || next_obj > detail::kDivergenceGuard)
      throw divergence_error("gradient descent diverged", eta);
    net = std::move(next);
    obj = next_obj;
    if (obj < best_obj) {
      best_obj = obj;
      best = net;
    }
    if (cfg.stop_tol > 0.0 && stop.update(obj, cfg.stop_tol)) {
      ++iter;
      break;
    }
  }
  trace.iterations = iter;
  trace.final_objective = best_obj;
  trace.final_grad_norm = std::sqrt(detail::gd_grad_norm_sq(
      best, grad_shallow(best, data), cfg.lambda, cfg.skip_connection));
  detail::record(trace, cfg, trace.iterations, best_obj, data_loss(best, data), weight_decay(best),
                 active_neuron_count(best, 0.0), /*force=*/true);
  return {std::move(best), std::move(trace)};
}

// Deep variant; trains the stored weight matrices directly, so any stale
// factorization metadata is dropped up front.
inline std::pair<DeepNet, TrainTrace> train_gd_weight_decay(const DeepNet& net0,
                                                            const Dataset& data,
                                                            const TrainConfig& cfg) {
  if (cfg.mode != TrainMode::gd_weight_decay)
    throw unsupported_error("train_gd_weight_decay: cfg.mode mismatch");
  validate(net0);
  validate(data);
  DeepNet net = net0;
  for (Layer& layer : net.layers) layer.factorization.reset();
  TrainTrace trace;
  const auto objective = [&](const DeepNet& n) {
    return data_loss(n, data) + cfg.lambda * weight_decay(n);
  };
  auto apply_step = [&](const DeepNet& n, const DeepGrad& g, double eta) {
    DeepNet t = n;
    for (int l = 0; l < t.depth(); ++l) {
      axpy(-eta, g.dw[l].data, t.layers[l].weight.data);
      if (cfg.lambda != 0.0) axpy(-eta * cfg.lambda, n.layers[l].weight.data, t.layers[l].weight.data);
      axpy(-eta, g.db[l], t.layers[l].bias);
    }
    return t;
  };
  double obj = objective(net);
  double best_obj = obj;
  DeepNet best = net;
  double eta = cfg.step_size;
  detail::StopState stop;
  long iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    DeepGrad g = grad_deep(net, data);
    double gn_sq = 0.0;
    for (int l = 0; l < net.depth(); ++l) {
      for (std::size_t i = 0; i < g.dw[l].data.size(); ++i) {
        const double t = g.dw[l].data[i] + cfg.lambda * net.layers[l].weight.data[i];
        gn_sq += t * t;
      }
      gn_sq += norm2_sq(g.db[l]);
    }
    const double gnorm = std::sqrt(gn_sq);
    detail::record(trace, cfg, iter, obj, data_loss(net, data), weight_decay(net),
                   active_neuron_count(net, 0.0));
    if (cfg.grad_tol > 0.0 && gnorm < cfg.grad_tol) break;
    DeepNet next = apply_step(net, g, eta);
    double next_obj = objective(next);
    if (cfg.line_search) {
      int halvings = 0;
      while (next_obj > obj - detail::kArmijo * eta * gn_sq && halvings < 60) {
        eta *= 0.5;
        ++halvings;
        next = apply_step(net, g, eta);
        next_obj = objective(next);
      }
      if (halvings == 60) break;
      if (halvings == 0) eta = std::min(eta * 1.25, cfg.step_size * 64.0);
    }
    if (!std::isfinite(next_obj) || next_obj > detail::kDivergenceGuard)
      throw divergence_error("gradient descent diverged", eta);
    net = std::move(next);
    obj = next_obj;
    if (obj < best_obj) {
      best_obj = obj;
      best = net;
    }
    if (cfg.stop_tol > 0.0 && stop.update(obj, cfg.stop_tol)) {
      ++iter;
      break;
    }
  }
  trace.iterations = iter;
  trace.final_objective = best_obj;
  trace.final_grad_norm = grad_deep(best, data).norm();
  detail::record(trace, cfg, trace.iterations, best_obj, data_loss(best, data), weight_decay(best),
                 active_neuron_count(best, 0.0), /*force=*/true);
  return {std::move(best), std::move(trace)};
}

// Proximal gradient descent for loss + lambda * sum_k ||v_k||_2 in the
// normalized parameterization: every iteration takes a gradient step on the
// data loss for all parameters, projects each w_k back to the unit sphere
// (absorbing its norm into b_k and v_k), then applies the group prox to each
// v_k with threshold lambda * step. Neurons whose input weight hits zero are
// frozen as pruned for the rest of the run. Returned input weights have norm
// 0 or 1.
inline std::pair<ShallowNet, TrainTrace> train_prox_path_norm(const ShallowNet& net0,
                                                              const Dataset& data,
                                                              const TrainConfig& cfg) {
  if (cfg.mode != TrainMode::prox_path_norm)
    throw unsupported_error("train_prox_path_norm: cfg.mode mismatch");
  if (!net0.activation.degree_one_homogeneous())
    throw unsupported_error("train_prox_path_norm requires a degree-1 homogeneous activation");
  validate(net0);
  validate(data);
  ShallowNet net = normalize_input_weights(net0);
  std::vector<bool> frozen(net.width(), false);
  TrainTrace trace;
  const auto objective = [&](const ShallowNet& n) {
    return data_loss(n, data) + cfg.lambda * path_norm(n);
  };
  auto prox_iterate = [&](const ShallowNet& n, const ShallowGrad& g, double eta,
                          std::vector<bool>& fr) {
    ShallowNet t = n;
    for (int k = 0; k < t.width(); ++k) {
      if (fr[k]) continue;
      Neuron& u = t.neurons[k];
      axpy(-eta, g.dw[k], u.w);
      u.b -= eta * g.db[k];
      axpy(-eta, g.dv[k], u.v);
      const double wn = norm2(u.w);
      if (wn == 0.0) {
        std::fill(u.w.begin(), u.w.end(), 0.0);
        std::fill(u.v.begin(), u.v.end(), 0.0);
        u.b = 0.0;
        fr[k] = true;
        continue;
      }
      scale(u.w, 1.0 / wn);
      u.b /= wn;
      scale(u.v, wn);
      u.v = prox_group(std::move(u.v), cfg.lambda * eta);
    }
    if (cfg.skip_connection) {
      axpy(-eta, g.dc.data, t.skip.data);
      axpy(-eta, g.dc0, t.skip_offset);
    }
    return t;
  };
  double obj = objective(net);
  double best_obj = obj;
  ShallowNet best = net;
  double eta = cfg.step_size;
  detail::StopState stop;
  long iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    detail::record(trace, cfg, iter, obj, data_loss(net, data), path_norm(net),
                   active_neuron_count(net, 0.0));
    ShallowGrad g = grad_shallow(net, data);
    std::vector<bool> fr = frozen;
    ShallowNet next = prox_iterate(net, g, eta, fr);
    double next_obj = objective(next);
    if (cfg.line_search) {
      int halvings = 0;
      while (next_obj > obj + 1e-12 * (1.0 + std::abs(obj)) && halvings < 60) {
        eta *= 0.5;
        ++halvings;
        fr = frozen;
        next = prox_iterate(net, g, eta, fr);
        next_obj = objective(next);
      }
      if (halvings == 60) break;
      if (halvings == 0) eta = std::min(eta * 1.25, cfg.step_size * 64.0);
    }
    if (!std::isfinite(next_obj) || next_obj > detail::kDivergenceGuard)
      throw divergence_error("proximal gradient descent diverged", eta);
    frozen = std::move(fr);
    net = std::move(next);
    obj = next_obj;
    if (obj < best_obj) {
      best_obj = obj;
      best = net;
    }
    if (cfg.stop_tol > 0.0 && stop.update(obj, cfg.stop_tol)) {
      ++iter;
      break;
    }
  }
  trace.iterations = iter;
  trace.final_objective = best_obj;
  trace.final_grad_norm = grad_shallow(best, data).norm();
  detail::record(trace, cfg, trace.iterations, best_obj, data_loss(best, data), path_norm(best),
                 active_neuron_count(best, 0.0), /*force=*/true);
  return {std::move(best), std::move(trace)};
}

// Runs `restarts` seeded trainings from independent initializations and keeps
// the best final objective. Restart r draws its initializer from the stream
// split("restart", r) of cfg.seed, so the result is deterministic and a
// prefix of restarts is reproduced exactly by a shorter run.
template <class TrainFn>
std::pair<ShallowNet, TrainTrace> multi_restart(TrainFn&& train_one, const Dataset& data,
                                                const TrainConfig& cfg,
                                                ActivationSpec act = ActivationSpec::relu()) {
  if (cfg.restarts < 1) throw dimension_error("multi_restart: restarts must be >= 1");
  RngStream root(cfg.seed);
  std::pair<ShallowNet, TrainTrace> best;
  bool have = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    ShallowNet net0 = init_shallow(data, cfg, root.split("restart", static_cast<std::uint64_t>(r)), act);
    auto result = train_one(net0, data, cfg);
    result.second.restart_index = r;
    if (!have || result.second.final_objective < best.second.final_objective) {
      best = std::move(result);
      have = true;
    }
  }
  return best;
}

// Standard entry point: initialize per cfg and train in the configured mode.
inline std::pair<ShallowNet, TrainTrace> train_shallow(const Dataset& data, const TrainConfig& cfg,
                                                       ActivationSpec act = ActivationSpec::relu()) {
  if (cfg.mode == TrainMode::gd_weight_decay)
    return multi_restart(
        [](const ShallowNet& n, const Dataset& d, const TrainConfig& c) {
          return train_gd_weight_decay(n, d, c);
        },
        data, cfg, act);
  return multi_restart(
      [](const ShallowNet& n, const Dataset& d, const TrainConfig& c) {
        return train_prox_path_norm(n, d, c);
      },
      data, cfg, act);
}

}  // namespace sparsereg
