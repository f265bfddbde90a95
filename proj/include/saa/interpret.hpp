#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saa/data_io.hpp"
#include "saa/network.hpp"
#include "saa/parallel.hpp"
#include "saa/training.hpp"

namespace saa::interpret {

struct ImportanceReport {
  std::string method;              // "connection_weights" | "permutation"
  std::vector<double> ri;          // per state variable
  std::vector<std::size_t> ranking;  // variable indices, most important first
};

// RI_i = sum_h w_ih * w_ho against the first asset's output node. Signed
// values are reported; ranking uses |RI| (the printed tables show magnitudes).
ImportanceReport connection_weights(const network::NetworkParams& params);

// Mean monthly Sharpe of the model's portfolio over the raw out-of-sample
// months; the score behind permutation importance and perturb curves.
double mean_monthly_sharpe(const training::TrainedModel& model, const AlignedDataset& oos);

// Eq.-(9)-style score drop: shuffle one variable's column across months for
// k repetitions and average the Sharpe change. Deterministic by seed.
ImportanceReport permutation_importance(const training::TrainedModel& model,
                                        const AlignedDataset& oos, int k, std::uint64_t seed,
                                        exec::Mode mode = exec::default_mode());

struct SensitivityCurve {
  std::size_t variable = 0;
  std::vector<int> shifts = {-3, -2, -1, 0, 1, 2, 3};  // multiples of sigma
  std::vector<double> pct_change;                      // vs the unshifted score
};

// Shift the raw values of one variable by multiples of its out-of-sample
// stddev, re-standardize with the training stats, and track the Sharpe
// change in percent.
SensitivityCurve perturb_sensitivity(const training::TrainedModel& model,
                                     const AlignedDataset& oos, std::size_t variable);

}  // namespace saa::interpret
