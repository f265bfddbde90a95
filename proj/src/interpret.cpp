#include "saa/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "saa/ratios.hpp"
#include "saa/rng.hpp"

namespace saa::interpret {

namespace {

std::vector<std::size_t> rank_descending(const std::vector<double>& key) {
  std::vector<std::size_t> order(key.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return order;
}

double sharpe_score(const training::TrainedModel& model,
                    const std::vector<std::vector<double>>& raw_states,
                    const AlignedDataset& oos) {
  const ratios::RatioSpec sharpe{ratios::Kind::sharpe, 0.5, 0.99};
  double total = 0.0;
  for (std::size_t t = 0; t < oos.size(); ++t) {
    const training::Prediction p = training::predict_weights(model, raw_states[t]);
    const Matrix& rets = oos.pairs[t].month_returns;
    std::vector<double> daily(rets.rows());
    for (std::size_t d = 0; d < rets.rows(); ++d) {
      double r = 0.0;
      for (std::size_t a = 0; a < rets.cols(); ++a) r += p.weights[a] * rets(d, a);
      daily[d] = r;
    }
    total += ratios::evaluate(sharpe, daily).value;
  }
  return total / static_cast<double>(oos.size());
}

std::vector<std::vector<double>> raw_state_columns(const AlignedDataset& oos) {
  std::vector<std::vector<double>> states(oos.size());
  for (std::size_t t = 0; t < oos.size(); ++t) states[t] = oos.pairs[t].state;
  return states;
}

}  // namespace

ImportanceReport connection_weights(const network::NetworkParams& params) {
  const network::NetworkShape& shape = params.shape;
  ImportanceReport out;
  out.method = "connection_weights";
  out.ri.assign(shape.inputs, 0.0);

  // first asset's output node (the single node in complement mode)
  for (std::size_t i = 0; i < shape.inputs; ++i) {
    double s = 0.0;
    for (std::size_t h = 0; h < shape.hidden; ++h) {
      s += params.w_in(h, i) * params.w_out(0, h);
    }
    out.ri[i] = s;
  }

  std::vector<double> magnitude(out.ri.size());
  for (std::size_t i = 0; i < out.ri.size(); ++i) magnitude[i] = std::abs(out.ri[i]);
  out.ranking = rank_descending(magnitude);
  return out;
}

double mean_monthly_sharpe(const training::TrainedModel& model, const AlignedDataset& oos) {
  if (oos.size() == 0) throw InsufficientData("mean_monthly_sharpe: empty dataset");
  return sharpe_score(model, raw_state_columns(oos), oos);
}

ImportanceReport permutation_importance(const training::TrainedModel& model,
                                        const AlignedDataset& oos, int k, std::uint64_t seed,
                                        exec::Mode mode) {
  if (oos.size() == 0) throw InsufficientData("permutation_importance: empty dataset");
  if (k < 1) throw ConfigError("permutation_importance: k must be >= 1");

  const std::size_t t_len = oos.size();
  const std::size_t m = oos.variables();
  const auto base_states = raw_state_columns(oos);
  const double reference = sharpe_score(model, base_states, oos);

  // one job per (variable, repetition); the RI averages the per-repetition
  // score differences so an inert variable comes out exactly zero
  const std::size_t jobs = m * static_cast<std::size_t>(k);
  std::vector<double> drop(jobs, 0.0);

  const auto run_job = [&](std::size_t job) {
    const std::size_t variable = job / static_cast<std::size_t>(k);
    const std::size_t rep = job % static_cast<std::size_t>(k);

    std::vector<std::size_t> perm(t_len);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(Rng::derive(seed, variable * 100003ULL + rep));
    rng.shuffle(perm);

    auto states = base_states;
    for (std::size_t t = 0; t < t_len; ++t) {
      states[t][variable] = base_states[perm[t]][variable];
    }
    drop[job] = sharpe_score(model, states, oos) - reference;
  };

  if (mode == exec::Mode::serial) {
    for (std::size_t job = 0; job < jobs; ++job) run_job(job);
  } else {
#pragma omp parallel for schedule(static)
    for (long job = 0; job < static_cast<long>(jobs); ++job) {
      run_job(static_cast<std::size_t>(job));
    }
  }

  ImportanceReport out;
  out.method = "permutation";
  out.ri.assign(m, 0.0);
  for (std::size_t variable = 0; variable < m; ++variable) {
    double s = 0.0;
    for (int rep = 0; rep < k; ++rep) {
      s += drop[variable * static_cast<std::size_t>(k) + rep];
    }
    out.ri[variable] = -s / static_cast<double>(k);  // RI = s_ref - mean(s_k)
  }
  out.ranking = rank_descending(out.ri);
  return out;
}

SensitivityCurve perturb_sensitivity(const training::TrainedModel& model,
                                     const AlignedDataset& oos, std::size_t variable) {
  if (oos.size() == 0) throw InsufficientData("perturb_sensitivity: empty dataset");
  if (variable >= oos.variables()) throw ConfigError("perturb_sensitivity: bad variable index");

  const std::size_t t_len = oos.size();
  const auto base_states = raw_state_columns(oos);

  double mean = 0.0;
  for (std::size_t t = 0; t < t_len; ++t) mean += base_states[t][variable];
  mean /= static_cast<double>(t_len);
  double var = 0.0;
  for (std::size_t t = 0; t < t_len; ++t) {
    const double d = base_states[t][variable] - mean;
    var += d * d;
  }
  const double sigma = std::sqrt(var / static_cast<double>(t_len));
  if (sigma <= 0.0) {
    throw DegenerateInput("perturb_sensitivity: variable has zero variance out of sample");
  }

  const double reference = sharpe_score(model, base_states, oos);

  SensitivityCurve curve;
  curve.variable = variable;
  curve.pct_change.resize(curve.shifts.size());
  for (std::size_t si = 0; si < curve.shifts.size(); ++si) {
    if (curve.shifts[si] == 0) {
      curve.pct_change[si] = 0.0;  // the shifted data equals the original
      continue;
    }
    auto states = base_states;
    const double delta = curve.shifts[si] * sigma;
    for (std::size_t t = 0; t < t_len; ++t) states[t][variable] += delta;
    const double score = sharpe_score(model, states, oos);
    curve.pct_change[si] =
        score == reference ? 0.0 : 100.0 * (score - reference) / reference;
  }
  return curve;
}

}  // namespace saa::interpret
