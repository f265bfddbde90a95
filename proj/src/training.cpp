#include "saa/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace saa::training {

using network::NetworkParams;
using network::NetworkShape;
using network::OutputMode;
using network::ParamGradients;

void TrainConfig::validate() const {
  if (gamma0 <= 0.0) throw ConfigError("gamma0 must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be positive");
  if (patience < 1) throw ConfigError("patience must be positive");
  if (improvement_tol <= 0.0) throw ConfigError("improvement_tol must be positive");
  if (constraint_tol <= 0.0) throw ConfigError("constraint_tol must be positive");
  if (hidden_grid.empty()) throw ConfigError("hidden_grid must not be empty");
  if (hidden_grid.size() > 1 && cv_folds < 2) {
    throw ConfigError("cv_folds must be >= 2 when the hidden grid has several entries");
  }
}

double learning_rate(int iteration, double gamma0) {
  return gamma0 / (1.0 + static_cast<double>(iteration));
}

namespace {

struct MonthWork {
  double lagrangian = 0.0;
  double ratio_value = 0.0;
  double budget_gap = 0.0;
  ParamGradients grads;
  bool with_grads = false;
};

MonthWork month_contribution(const NetworkParams& params, const AlignedPair& pair,
                             const ratios::RatioSpec& spec, bool with_grads) {
  const Matrix& rets = pair.month_returns;
  const std::size_t days = rets.rows();
  const std::size_t n = rets.cols();

  const network::ForwardTrace trace = network::forward_trace(params, pair.state);

  std::vector<double> portfolio(days);
  for (std::size_t d = 0; d < days; ++d) {
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) s += trace.weights[a] * rets(d, a);
    portfolio[d] = s;
  }

  double gap = 0.0;
  for (double w : trace.weights) gap += w;
  gap -= 1.0;

  MonthWork work;
  work.budget_gap = gap;
  const ratios::RatioValue value = ratios::evaluate(spec, portfolio);
  work.ratio_value = value.value;
  work.lagrangian = value.value + params.mu * gap;

  if (with_grads) {
    const std::vector<double> d_ratio = ratios::gradient_wrt_returns(spec, portfolio);
    std::vector<double> upstream(n, params.mu);
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0.0;
      for (std::size_t d = 0; d < days; ++d) s += d_ratio[d] * rets(d, a);
      upstream[a] += s;
    }
    work.grads = network::backward(params, pair.state, trace, upstream);
    work.grads.mu = gap;
    work.with_grads = true;
  }
  return work;
}

// Runs the per-month kernel either serially or month-parallel; contributions
// are reduced in month order afterwards so both paths agree bit for bit.
std::vector<MonthWork> per_month(const NetworkParams& params, const AlignedDataset& data,
                                 const ratios::RatioSpec& spec, bool with_grads,
                                 exec::Mode mode) {
  const std::size_t t_len = data.size();
  std::vector<MonthWork> work(t_len);

  if (mode == exec::Mode::serial) {
    for (std::size_t t = 0; t < t_len; ++t) {
      work[t] = month_contribution(params, data.pairs[t], spec, with_grads);
    }
    return work;
  }

  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long t = 0; t < static_cast<long>(t_len); ++t) {
    try {
      work[t] = month_contribution(params, data.pairs[t], spec, with_grads);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return work;
}

ObjectiveGradient reduce(const NetworkShape& shape, const std::vector<MonthWork>& work,
                         bool with_grads) {
  const double t_len = static_cast<double>(work.size());
  ObjectiveGradient out;
  out.grads = ParamGradients::zeros(shape);
  for (const MonthWork& w : work) {
    out.value += w.lagrangian;
    out.mean_abs_budget_gap += std::abs(w.budget_gap);
    if (with_grads) out.grads.add_scaled(w.grads, 1.0 / t_len);
  }
  out.value /= t_len;
  out.mean_abs_budget_gap /= t_len;
  return out;
}

void check_train_inputs(const AlignedDataset& data, const NetworkShape& shape) {
  if (data.size() < 12) throw InsufficientData("train: need at least 12 months");
  if (shape.inputs != data.variables() || shape.assets != data.assets()) {
    throw ConfigError("train: network shape does not match the dataset");
  }
}

}  // namespace

double lagrangian_objective(const NetworkParams& params, const AlignedDataset& data,
                            const ratios::RatioSpec& spec, exec::Mode mode) {
  if (data.size() == 0) throw InsufficientData("lagrangian_objective: empty dataset");
  return reduce(params.shape, per_month(params, data, spec, false, mode), false).value;
}

ObjectiveGradient objective_and_gradient(const NetworkParams& params, const AlignedDataset& data,
                                         const ratios::RatioSpec& spec, exec::Mode mode) {
  if (data.size() == 0) throw InsufficientData("objective_and_gradient: empty dataset");
  return reduce(params.shape, per_month(params, data, spec, true, mode), true);
}

TrainedModel train(const AlignedDataset& data, const StandardizationStats& stats,
                   const ratios::RatioSpec& spec, NetworkShape shape,
                   const TrainConfig& config) {
  config.validate();
  shape.validate();
  spec.validate();
  check_train_inputs(data, shape);

  TrainedModel model;
  model.spec = spec;
  model.stats = stats;
  model.params = network::init(shape, config.seed);
  model.objective_trace.reserve(static_cast<std::size_t>(config.max_iters));

  const bool update_mu = shape.mode == OutputMode::lagrangian;
  double best = -std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const ObjectiveGradient og = objective_and_gradient(model.params, data, spec);
    if (!std::isfinite(og.value)) {
      throw NumericFailure("train: objective diverged at iteration " + std::to_string(iter));
    }
    model.objective_trace.push_back(og.value);

    if (og.value > best + config.improvement_tol) {
      best = og.value;
      stall = 0;
    } else {
      ++stall;
    }
    if (stall >= config.patience) break;

    const double gamma = learning_rate(iter, config.gamma0);
    for (std::size_t i = 0; i < model.params.w_in.data().size(); ++i) {
      model.params.w_in.data()[i] += gamma * og.grads.w_in.data()[i];
    }
    for (std::size_t i = 0; i < model.params.b_hidden.size(); ++i) {
      model.params.b_hidden[i] += gamma * og.grads.b_hidden[i];
    }
    for (std::size_t i = 0; i < model.params.w_out.data().size(); ++i) {
      model.params.w_out.data()[i] += gamma * og.grads.w_out.data()[i];
    }
    for (std::size_t i = 0; i < model.params.b_out.size(); ++i) {
      model.params.b_out[i] += gamma * og.grads.b_out[i];
    }
    // Saddle-point update: the multiplier moves against its gradient so the
    // budget residual is damped rather than amplified. Ascending mu rewards
    // whatever sign the residual already has and saturates both outputs.
    if (update_mu) model.params.mu -= gamma * og.grads.mu;
  }

  // budget gap at the final iterate (the loop above reports pre-update values)
  const double final_gap =
      reduce(shape, per_month(model.params, data, spec, false, exec::default_mode()), false)
          .mean_abs_budget_gap;
  model.converged = final_gap <= config.constraint_tol;
  return model;
}

std::size_t cross_validate(const AlignedDataset& data, const ratios::RatioSpec& spec,
                           NetworkShape shape, const TrainConfig& config) {
  config.validate();
  if (config.hidden_grid.size() == 1) return config.hidden_grid[0];

  const std::size_t t_len = data.size();
  const std::size_t folds = static_cast<std::size_t>(config.cv_folds);
  if (t_len / folds < 1) throw InsufficientData("cross_validate: folds would be empty");

  std::vector<std::size_t> grid = config.hidden_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t best_h = grid.front();

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double score_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t lo = f * t_len / folds;
      const std::size_t hi = (f + 1) * t_len / folds;

      AlignedDataset train_set;
      train_set.asset_names = data.asset_names;
      train_set.variable_names = data.variable_names;
      for (std::size_t t = 0; t < t_len; ++t) {
        if (t >= lo && t < hi) continue;
        train_set.month_keys.push_back(data.month_keys[t]);
        train_set.pairs.push_back(data.pairs[t]);
      }
      if (hi - lo < 1 || train_set.size() < 12) {
        throw InsufficientData("cross_validate: fold too small");
      }

      TrainConfig fold_config = config;
      fold_config.hidden_grid = {grid[gi]};
      fold_config.seed = config.seed + f * 10007 + gi;
      NetworkShape fold_shape = shape;
      fold_shape.hidden = grid[gi];

      TrainedModel model =
          train(train_set, StandardizationStats{}, spec, fold_shape, fold_config);

      double held_out = 0.0;
      for (std::size_t t = lo; t < hi; ++t) {
        held_out += month_contribution(model.params, data.pairs[t], spec, false).ratio_value;
      }
      score_sum += held_out / static_cast<double>(hi - lo);
    }
    const double score = score_sum / static_cast<double>(folds);
    if (score > best_score) {
      best_score = score;
      best_h = grid[gi];
    }
  }
  return best_h;
}

Prediction predict_weights(const TrainedModel& model, std::span<const double> z_raw,
                           double constraint_tol) {
  const std::vector<double> z = standardize_vector(z_raw, model.stats);
  Prediction out;
  out.weights = network::forward(model.params, z);
  if (model.params.shape.mode == OutputMode::lagrangian) {
    double sum = 0.0;
    for (double w : out.weights) sum += w;
    if (std::abs(sum - 1.0) > constraint_tol) {
      for (double& w : out.weights) w /= sum;
      out.renormalized = true;
    }
  }
  return out;
}

}  // namespace saa::training
