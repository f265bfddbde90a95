#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "saa/data_io.hpp"
#include "saa/network.hpp"
#include "saa/parallel.hpp"
#include "saa/ratios.hpp"

namespace saa::training {

struct TrainConfig {
  double gamma0 = 0.5;
  int max_iters = 5000;
  int patience = 200;
  double improvement_tol = 1e-8;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden_grid = {4};
  int cv_folds = 3;
  double constraint_tol = 0.01;  // post-training |x'e - 1| check

  void validate() const;
};

struct TrainedModel {
  network::NetworkParams params;
  ratios::RatioSpec spec;
  StandardizationStats stats;
  std::vector<double> objective_trace;
  bool converged = false;
};

// gamma_i = gamma0 / (1 + iteration)
double learning_rate(int iteration, double gamma0);

// (1/T) sum_t [ psi(x_t' R_{t+1}) + mu (x_t' e - 1) ] on standardized states.
double lagrangian_objective(const network::NetworkParams& params, const AlignedDataset& data,
                            const ratios::RatioSpec& spec,
                            exec::Mode mode = exec::default_mode());

struct ObjectiveGradient {
  double value = 0.0;
  network::ParamGradients grads;  // includes d objective / d mu
  double mean_abs_budget_gap = 0.0;
};

// Full-batch value and exact gradient in one pass; the training hot loop.
ObjectiveGradient objective_and_gradient(const network::NetworkParams& params,
                                         const AlignedDataset& data,
                                         const ratios::RatioSpec& spec,
                                         exec::Mode mode = exec::default_mode());

// Gradient ascent on network weights and mu with the decaying step schedule,
// stopping on patience without improvement or the iteration cap. The states
// in `data` must already be standardized with `stats`.
TrainedModel train(const AlignedDataset& data, const StandardizationStats& stats,
                   const ratios::RatioSpec& spec, network::NetworkShape shape,
                   const TrainConfig& config);

// Contiguous-block fold split over the training months; returns the H from
// config.hidden_grid with the best average held-out mean monthly ratio,
// smaller H on ties.
std::size_t cross_validate(const AlignedDataset& data, const ratios::RatioSpec& spec,
                           network::NetworkShape shape, const TrainConfig& config);

struct Prediction {
  std::vector<double> weights;
  bool renormalized = false;
};

// Standardizes the raw state with the model's training stats and runs the
// network; lagrangian-mode weights are renormalized for reporting when the
// budget gap exceeds constraint_tol.
Prediction predict_weights(const TrainedModel& model, std::span<const double> z_raw,
                           double constraint_tol = 0.01);

}  // namespace saa::training
