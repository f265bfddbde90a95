#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "saa/types.hpp"

namespace saa::network {

// Output conventions for the weight map. In lagrangian mode the network
// emits one sigmoid per asset and the budget x'e = 1 is enforced through the
// multiplier term of the objective. Complement mode is the two-asset
// single-output construction x = [y, 1 - y], which satisfies the budget
// identically.
enum class OutputMode { lagrangian, complement };

std::string to_token(OutputMode mode);
OutputMode parse_output_mode(const std::string& token);

struct NetworkShape {
  std::size_t inputs = 1;   // M
  std::size_t hidden = 1;   // H
  std::size_t assets = 2;   // N
  OutputMode mode = OutputMode::lagrangian;

  std::size_t output_nodes() const {
    return mode == OutputMode::complement ? 1 : assets;
  }
  void validate() const;

  bool operator==(const NetworkShape&) const = default;
};

struct NetworkParams {
  NetworkShape shape;
  Matrix w_in;                   // H x M
  std::vector<double> b_hidden;  // H
  Matrix w_out;                  // N_out x H
  std::vector<double> b_out;     // N_out
  double mu = 0.0;

  bool operator==(const NetworkParams&) const = default;
};

struct ParamGradients {
  Matrix w_in;
  std::vector<double> b_hidden;
  Matrix w_out;
  std::vector<double> b_out;
  double mu = 0.0;

  static ParamGradients zeros(const NetworkShape& shape);
  void add_scaled(const ParamGradients& other, double factor);
};

// Intermediate activations; kept so backward avoids recomputing the pass.
struct ForwardTrace {
  std::vector<double> hidden;   // H
  std::vector<double> raw;      // N_out, strictly in (0,1)
  std::vector<double> weights;  // N
};

double sigmoid(double x);

// Weights drawn uniformly from +/- 1/sqrt(fan_in) per layer, zero biases,
// mu = 0.
NetworkParams init(const NetworkShape& shape, std::uint64_t seed);

ForwardTrace forward_trace(const NetworkParams& params, std::span<const double> z);
std::vector<double> forward(const NetworkParams& params, std::span<const double> z);

// Exact chain-rule gradients of L wrt every parameter given dL/dx. The mu
// slot is left at zero; mu enters the objective outside the network.
ParamGradients backward(const NetworkParams& params, std::span<const double> z,
                        const ForwardTrace& trace, std::span<const double> upstream);

std::string to_json(const NetworkParams& params);
NetworkParams params_from_json(const std::string& text);

}  // namespace saa::network
