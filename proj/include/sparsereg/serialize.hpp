#pragma once

#include <cstdio>
#include <string>
#include <variant>

#include <json.hpp>

#include "sparsereg/net.hpp"

namespace sparsereg {

inline constexpr int kNetSchemaVersion = 1;

// %.17g keeps every bit of a double and round-trips exactly.
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void emit_vec(std::string& out, const Vec& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_g17(v[i]);
  }
  out += ']';
}

inline void emit_matrix(std::string& out, const Matrix& m) {
  out += '[';
  for (int i = 0; i < m.rows; ++i) {
    if (i) out += ',';
    out += '[';
    for (int j = 0; j < m.cols; ++j) {
      if (j) out += ',';
      out += fmt_g17(m(i, j));
    }
    out += ']';
  }
  out += ']';
}

inline void emit_activation(std::string& out, const ActivationSpec& a) {
  out += "{\"name\":\"" + a.name() + "\"";
  if (a.kind == ActivationKind::truncated_power)
    out += ",\"k\":" + std::to_string(a.power);
  out += '}';
}

}  // namespace detail

// Versioned structured-text document for a shallow net. Key order is fixed so
// identical nets serialize to identical bytes.
inline std::string serialize_net(const ShallowNet& net) {
  validate(net);
  std::string out;
  out += "{\"schema_version\":" + std::to_string(kNetSchemaVersion);
  out += ",\"kind\":\"shallow\"";
  out += ",\"activation\":";
  detail::emit_activation(out, net.activation);
  out += ",\"d\":" + std::to_string(net.input_dim);
  out += ",\"D\":" + std::to_string(net.output_dim);
  out += ",\"neurons\":[";
  for (int k = 0; k < net.width(); ++k) {
    if (k) out += ',';
    out += '[';
    detail::emit_vec(out, net.neurons[k].w);
    out += ',';
    out += fmt_g17(net.neurons[k].b);
    out += ',';
    detail::emit_vec(out, net.neurons[k].v);
    out += ']';
  }
  out += "],\"skip\":{\"c\":";
  detail::emit_matrix(out, net.skip);
  out += ",\"c0\":";
  detail::emit_vec(out, net.skip_offset);
  out += "}}\n";
  return out;
}

inline std::string serialize_net(const DeepNet& net) {
  validate(net);
  std::string out;
  out += "{\"schema_version\":" + std::to_string(kNetSchemaVersion);
  out += ",\"kind\":\"deep\"";
  out += ",\"d\":" + std::to_string(net.input_dim());
  out += ",\"D\":" + std::to_string(net.output_dim());
  out += ",\"layers\":[";
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    if (l) out += ',';
    out += "{\"W\":";
    detail::emit_matrix(out, layer.weight);
    out += ",\"b\":";
    detail::emit_vec(out, layer.bias);
    out += ",\"activation\":\"" + to_string(layer.activation) + "\"";
    if (layer.factorization) {
      out += ",\"factorization\":{\"U\":";
      detail::emit_matrix(out, layer.factorization->u);
      out += ",\"V\":";
      detail::emit_matrix(out, layer.factorization->v);
      out += '}';
    }
    out += '}';
  }
  out += "]}\n";
  return out;
}

using NetDocument = std::variant<ShallowNet, DeepNet>;

namespace detail {

using nlohmann::json;

inline const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw parse_error("missing field", path + "." + key);
  return *it;
}

inline double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw parse_error("expected a number", path);
  return j.get<double>();
}

inline Vec vec(const json& j, const std::string& path) {
  if (!j.is_array()) throw parse_error("expected an array of numbers", path);
  Vec v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

inline Matrix matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw parse_error("expected a nonempty array of rows", path);
  Matrix m(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vec row = vec(j[i], path + "[" + std::to_string(i) + "]");
    if (static_cast<int>(row.size()) != m.cols)
      throw parse_error("ragged matrix rows", path + "[" + std::to_string(i) + "]");
    for (int c = 0; c < m.cols; ++c) m(static_cast<int>(i), c) = row[c];
  }
  return m;
}

inline ActivationSpec activation(const json& j, const std::string& path) {
  if (!j.is_object()) throw parse_error("expected an activation object", path);
  const json& name = field(j, "name", path);
  if (!name.is_string()) throw parse_error("expected a string", path + ".name");
  int k = 1;
  if (j.contains("k")) k = j["k"].get<int>();
  try {
    return ActivationSpec::from_name(name.get<std::string>(), k);
  } catch (const parse_error& e) {
    throw parse_error(e.what(), path + ".name");
  }
}

inline ShallowNet parse_shallow(const json& j) {
  const std::string p = "$";
  ShallowNet net;
  net.input_dim = static_cast<int>(num(field(j, "d", p), p + ".d"));
  net.output_dim = static_cast<int>(num(field(j, "D", p), p + ".D"));
  net.activation = activation(field(j, "activation", p), p + ".activation");
  const json& neurons = field(j, "neurons", p);
  if (!neurons.is_array()) throw parse_error("expected an array", p + ".neurons");
  for (std::size_t k = 0; k < neurons.size(); ++k) {
    const std::string np = p + ".neurons[" + std::to_string(k) + "]";
    const json& t = neurons[k];
    if (!t.is_array() || t.size() != 3)
      throw parse_error("expected a [w, b, v] triple", np);
    Neuron u;
    u.w = vec(t[0], np + "[0]");
    u.b = num(t[1], np + "[1]");
    u.v = vec(t[2], np + "[2]");
    net.neurons.push_back(std::move(u));
  }
  const json& skip = field(j, "skip", p);
  net.skip = matrix(field(skip, "c", p + ".skip"), p + ".skip.c");
  net.skip_offset = vec(field(skip, "c0", p + ".skip"), p + ".skip.c0");
  try {
    validate(net);
  } catch (const dimension_error& e) {
    throw parse_error(std::string("invalid net: ") + e.what(), p);
  }
  return net;
}

inline DeepNet parse_deep(const json& j) {
  const std::string p = "$";
  DeepNet net;
  const json& layers = field(j, "layers", p);
  if (!layers.is_array()) throw parse_error("expected an array", p + ".layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string lp = p + ".layers[" + std::to_string(l) + "]";
    const json& jl = layers[l];
    Layer layer;
    layer.weight = matrix(field(jl, "W", lp), lp + ".W");
    layer.bias = vec(field(jl, "b", lp), lp + ".b");
    const json& act = field(jl, "activation", lp);
    if (!act.is_string()) throw parse_error("expected a string", lp + ".activation");
    try {
      layer.activation = layer_activation_from(act.get<std::string>());
    } catch (const parse_error& e) {
      throw parse_error(e.what(), lp + ".activation");
    }
    if (jl.contains("factorization")) {
      const json& f = jl["factorization"];
      LayerFactorization fac;
      fac.u = matrix(field(f, "U", lp + ".factorization"), lp + ".factorization.U");
      fac.v = matrix(field(f, "V", lp + ".factorization"), lp + ".factorization.V");
      layer.factorization = std::move(fac);
    }
    net.layers.push_back(std::move(layer));
  }
  try {
    validate(net);
  } catch (const dimension_error& e) {
    throw parse_error(std::string("invalid net: ") + e.what(), p);
  }
  return net;
}

}  // namespace detail

inline NetDocument deserialize_net(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed net document: ") + e.what());
  }
  if (!j.is_object()) throw parse_error("net document must be an object", "$");
  const auto& ver = detail::field(j, "schema_version", "$");
  if (!ver.is_number_integer() || ver.get<int>() != kNetSchemaVersion)
    throw parse_error("unsupported schema version " + ver.dump() + ", expected " +
                          std::to_string(kNetSchemaVersion),
                      "$.schema_version");
  const auto& kind = detail::field(j, "kind", "$");
  if (kind == "shallow") return detail::parse_shallow(j);
  if (kind == "deep") return detail::parse_deep(j);
  throw parse_error("unknown net kind " + kind.dump(), "$.kind");
}

inline ShallowNet deserialize_shallow(const std::string& text) {
  NetDocument doc = deserialize_net(text);
  if (auto* p = std::get_if<ShallowNet>(&doc)) return std::move(*p);
  throw parse_error("expected a shallow net document", "$.kind");
}

inline DeepNet deserialize_deep(const std::string& text) {
  NetDocument doc = deserialize_net(text);
  if (auto* p = std::get_if<DeepNet>(&doc)) return std::move(*p);
  throw parse_error("expected a deep net document", "$.kind");
}

}  // namespace sparsereg
