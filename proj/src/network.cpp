#include "saa/network.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "saa/rng.hpp"

namespace saa::network {

using nlohmann::json;

std::string to_token(OutputMode mode) {
  return mode == OutputMode::complement ? "complement" : "lagrangian";
}

OutputMode parse_output_mode(const std::string& token) {
  if (token == "complement") return OutputMode::complement;
  if (token == "lagrangian") return OutputMode::lagrangian;
  throw ConfigError("unknown output mode '" + token + "'");
}

void NetworkShape::validate() const {
  if (inputs < 1 || hidden < 1 || assets < 2) {
    throw ConfigError("network shape needs M >= 1, H >= 1, N >= 2");
  }
  if (mode == OutputMode::complement && assets != 2) {
    throw ConfigError("complement mode requires exactly two assets");
  }
}

ParamGradients ParamGradients::zeros(const NetworkShape& shape) {
  ParamGradients g;
  g.w_in = Matrix(shape.hidden, shape.inputs);
  g.b_hidden.assign(shape.hidden, 0.0);
  g.w_out = Matrix(shape.output_nodes(), shape.hidden);
  g.b_out.assign(shape.output_nodes(), 0.0);
  g.mu = 0.0;
  return g;
}

void ParamGradients::add_scaled(const ParamGradients& other, double factor) {
  for (std::size_t i = 0; i < w_in.data().size(); ++i) {
    w_in.data()[i] += factor * other.w_in.data()[i];
  }
  for (std::size_t i = 0; i < b_hidden.size(); ++i) b_hidden[i] += factor * other.b_hidden[i];
  for (std::size_t i = 0; i < w_out.data().size(); ++i) {
    w_out.data()[i] += factor * other.w_out.data()[i];
  }
  for (std::size_t i = 0; i < b_out.size(); ++i) b_out[i] += factor * other.b_out[i];
  mu += factor * other.mu;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

NetworkParams init(const NetworkShape& shape, std::uint64_t seed) {
  shape.validate();
  Rng rng(seed);
  NetworkParams p;
  p.shape = shape;
  p.w_in = Matrix(shape.hidden, shape.inputs);
  p.b_hidden.assign(shape.hidden, 0.0);
  p.w_out = Matrix(shape.output_nodes(), shape.hidden);
  p.b_out.assign(shape.output_nodes(), 0.0);
  p.mu = 0.0;

  const double in_bound = 1.0 / std::sqrt(static_cast<double>(shape.inputs));
  for (double& w : p.w_in.data()) w = rng.uniform(-in_bound, in_bound);
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  for (double& w : p.w_out.data()) w = rng.uniform(-out_bound, out_bound);
  return p;
}

ForwardTrace forward_trace(const NetworkParams& params, std::span<const double> z) {
  const NetworkShape& shape = params.shape;
  if (z.size() != shape.inputs) throw DegenerateInput("forward: state dimension mismatch");

  ForwardTrace trace;
  trace.hidden.resize(shape.hidden);
  for (std::size_t h = 0; h < shape.hidden; ++h) {
    double a = params.b_hidden[h];
    for (std::size_t m = 0; m < shape.inputs; ++m) a += params.w_in(h, m) * z[m];
    trace.hidden[h] = sigmoid(a);
  }

  const std::size_t n_out = shape.output_nodes();
  trace.raw.resize(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    double a = params.b_out[o];
    for (std::size_t h = 0; h < shape.hidden; ++h) a += params.w_out(o, h) * trace.hidden[h];
    // keep the open-interval range even when the sigmoid saturates in
    // floating point (|a| beyond ~37)
    trace.raw[o] = std::min(1.0 - 1e-12, std::max(1e-12, sigmoid(a)));
  }

  if (shape.mode == OutputMode::complement) {
    // x1 = 1 - x2 makes x1 + x2 == 1 exact in floating point
    const double x2 = 1.0 - trace.raw[0];
    trace.weights = {1.0 - x2, x2};
  } else {
    trace.weights = trace.raw;
  }
  return trace;
}

std::vector<double> forward(const NetworkParams& params, std::span<const double> z) {
  return forward_trace(params, z).weights;
}

ParamGradients backward(const NetworkParams& params, std::span<const double> z,
                        const ForwardTrace& trace, std::span<const double> upstream) {
  const NetworkShape& shape = params.shape;
  if (upstream.size() != shape.assets) {
    throw DegenerateInput("backward: upstream dimension mismatch");
  }

  ParamGradients g = ParamGradients::zeros(shape);
  const std::size_t n_out = shape.output_nodes();

  // dL/d raw_o, folding the complement asset into the single output node.
  std::vector<double> d_raw(n_out);
  if (shape.mode == OutputMode::complement) {
    d_raw[0] = upstream[0] - upstream[1];
  } else {
    for (std::size_t o = 0; o < n_out; ++o) d_raw[o] = upstream[o];
  }

  std::vector<double> delta_out(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    delta_out[o] = d_raw[o] * trace.raw[o] * (1.0 - trace.raw[o]);
    g.b_out[o] = delta_out[o];
    for (std::size_t h = 0; h < shape.hidden; ++h) {
      g.w_out(o, h) = delta_out[o] * trace.hidden[h];
    }
  }

  for (std::size_t h = 0; h < shape.hidden; ++h) {
    double back = 0.0;
    for (std::size_t o = 0; o < n_out; ++o) back += params.w_out(o, h) * delta_out[o];
    const double delta_h = back * trace.hidden[h] * (1.0 - trace.hidden[h]);
    g.b_hidden[h] = delta_h;
    for (std::size_t m = 0; m < shape.inputs; ++m) g.w_in(h, m) = delta_h * z[m];
  }
  return g;
}

std::string to_json(const NetworkParams& params) {
  json doc;
  doc["shape"] = {{"inputs", params.shape.inputs},
                  {"hidden", params.shape.hidden},
                  {"assets", params.shape.assets},
                  {"output_mode", to_token(params.shape.mode)}};
  doc["w_in"] = params.w_in.data();
  doc["b_hidden"] = params.b_hidden;
  doc["w_out"] = params.w_out.data();
  doc["b_out"] = params.b_out;
  doc["mu"] = params.mu;
  return doc.dump(2);
}

NetworkParams params_from_json(const std::string& text) {
  json doc = json::parse(text);
  NetworkParams p;
  p.shape.inputs = doc.at("shape").at("inputs").get<std::size_t>();
  p.shape.hidden = doc.at("shape").at("hidden").get<std::size_t>();
  p.shape.assets = doc.at("shape").at("assets").get<std::size_t>();
  p.shape.mode = parse_output_mode(doc.at("shape").at("output_mode").get<std::string>());
  p.shape.validate();

  p.w_in = Matrix(p.shape.hidden, p.shape.inputs);
  p.w_in.data() = doc.at("w_in").get<std::vector<double>>();
  p.b_hidden = doc.at("b_hidden").get<std::vector<double>>();
  p.w_out = Matrix(p.shape.output_nodes(), p.shape.hidden);
  p.w_out.data() = doc.at("w_out").get<std::vector<double>>();
  p.b_out = doc.at("b_out").get<std::vector<double>>();
  p.mu = doc.at("mu").get<double>();

  if (p.w_in.data().size() != p.shape.hidden * p.shape.inputs ||
      p.b_hidden.size() != p.shape.hidden ||
      p.w_out.data().size() != p.shape.output_nodes() * p.shape.hidden ||
      p.b_out.size() != p.shape.output_nodes()) {
    throw DataError("network JSON has inconsistent array sizes");
  }
  return p;
}

}  // namespace saa::network
