#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sparsereg/errors.hpp"

namespace sparsereg {

enum class ActivationKind { relu, truncated_power, sigmoid, arctan, exponential, linear };

// Activation registry entry: pointwise rule, a.e. derivative, positive
// homogeneity degree, and the frequency response of the matched sparsifying
// transform. The ReLU kink derivative is fixed to 0.
struct ActivationSpec {
  ActivationKind kind = ActivationKind::relu;
  int power = 1;  // truncated-power order k; 1 for every other kind

  static ActivationSpec relu() { return {ActivationKind::relu, 1}; }
  static ActivationSpec truncated_power(int k) {
    if (k < 1) throw unsupported_error("truncated_power: order must be >= 1");
    return {ActivationKind::truncated_power, k};
  }
  static ActivationSpec sigmoid() { return {ActivationKind::sigmoid, 1}; }
  static ActivationSpec arctan() { return {ActivationKind::arctan, 1}; }
  static ActivationSpec exponential() { return {ActivationKind::exponential, 1}; }
  static ActivationSpec linear() { return {ActivationKind::linear, 1}; }

  double value(double t) const {
    switch (kind) {
      case ActivationKind::relu:
        return t > 0.0 ? t : 0.0;
      case ActivationKind::truncated_power: {
        if (t <= 0.0) return 0.0;
        double p = 1.0;
        for (int i = 0; i < power; ++i) p *= t;
        return p / factorial(power);
      }
      case ActivationKind::sigmoid:
        return 1.0 / (1.0 + std::exp(-t)) - 0.5;
      case ActivationKind::arctan:
        return std::atan(t) / std::numbers::pi;
      case ActivationKind::exponential:
        return 0.5 * std::exp(-std::abs(t));
      case ActivationKind::linear:
        return t;
    }
    return 0.0;
  }

  double derivative(double t) const {
    switch (kind) {
      case ActivationKind::relu:
        return t > 0.0 ? 1.0 : 0.0;
      case ActivationKind::truncated_power: {
        if (t <= 0.0) return 0.0;
        if (power == 1) return 1.0;
        double p = 1.0;
        for (int i = 0; i < power - 1; ++i) p *= t;
        return p / factorial(power - 1);
      }
      case ActivationKind::sigmoid: {
        const double s = 1.0 / (1.0 + std::exp(-t));
        return s * (1.0 - s);
      }
      case ActivationKind::arctan:
        return 1.0 / (std::numbers::pi * (1.0 + t * t));
      case ActivationKind::exponential:
        return t == 0.0 ? 0.0 : -0.5 * std::copysign(std::exp(-std::abs(t)), t);
      case ActivationKind::linear:
        return 1.0;
    }
    return 0.0;
  }

  // Positive homogeneity degree; 0 means not homogeneous.
  int homogeneity_degree() const {
    switch (kind) {
      case ActivationKind::relu:
        return 1;
      case ActivationKind::truncated_power:
        return power;
      case ActivationKind::linear:
        return 1;
      default:
        return 0;
    }
  }

  // The balance equivalences require degree-1 homogeneity.
  bool degree_one_homogeneous() const { return homogeneity_degree() == 1; }

  // Frequency response H(omega) of the matched sparsifying transform.
  // relu: -w^2; truncated power: (iw)^{k+1}; sigmoid: (i/pi) sinh(pi w);
  // arctan: i w e^{|w|}; exponential: 1 + w^2. The linear activation sits in
  // every transform's null space and has no registry row.
  std::complex<double> sparsifying_response(double omega) const {
    using C = std::complex<double>;
    switch (kind) {
      case ActivationKind::relu:
        return C(-omega * omega, 0.0);
      case ActivationKind::truncated_power: {
        C r(1.0, 0.0);
        const C iw(0.0, omega);
        for (int i = 0; i < power + 1; ++i) r *= iw;
        return r;
      }
      case ActivationKind::sigmoid:
        return C(0.0, std::sinh(std::numbers::pi * omega) / std::numbers::pi);
      case ActivationKind::arctan:
        return C(0.0, omega * std::exp(std::abs(omega)));
      case ActivationKind::exponential:
        return C(1.0 + omega * omega, 0.0);
      case ActivationKind::linear:
        throw unsupported_error("linear activation has no registered sparsifying transform");
    }
    return {};
  }

  std::string name() const {
    switch (kind) {
      case ActivationKind::relu:
        return "relu";
      case ActivationKind::truncated_power:
        return "truncated_power";
      case ActivationKind::sigmoid:
        return "sigmoid";
      case ActivationKind::arctan:
        return "arctan";
      case ActivationKind::exponential:
        return "exponential";
      case ActivationKind::linear:
        return "linear";
    }
    return "?";
  }

  static ActivationSpec from_name(const std::string& name, int k = 1) {
    if (name == "relu") return relu();
    if (name == "truncated_power") return truncated_power(k);
    if (name == "sigmoid") return sigmoid();
    if (name == "arctan") return arctan();
    if (name == "exponential") return exponential();
    if (name == "linear") return linear();
    throw parse_error("unknown activation '" + name + "'");
  }

  bool operator==(const ActivationSpec& o) const {
    return kind == o.kind && (kind != ActivationKind::truncated_power || power == o.power);
  }

 private:
  static double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }
};

}  // namespace sparsereg
