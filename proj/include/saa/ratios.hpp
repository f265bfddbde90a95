#pragma once

#include <span>
#include <string>
#include <vector>

#include "saa/parallel.hpp"
#include "saa/types.hpp"

namespace saa::ratios {

enum class Kind { sharpe, mad, minimax, gini, cvar, rachev };

// Canonical ordering used for serialization and tie-breaking throughout.
inline constexpr Kind kAllKinds[] = {Kind::sharpe, Kind::mad,  Kind::minimax,
                                     Kind::gini,   Kind::cvar, Kind::rachev};

std::string to_token(Kind kind);
Kind parse_token(const std::string& token);  // throws ConfigError

struct RatioSpec {
  Kind kind = Kind::sharpe;
  double alpha = 0.5;   // lower-tail fraction (cvar, rachev)
  double beta = 0.99;   // upper-tail fraction (rachev)

  void validate() const;
  std::string label() const;  // e.g. "cvar(0.5)"
};

struct RatioValue {
  double value = 0.0;
  double reward = 0.0;
  double risk = 0.0;
  bool degenerate = false;  // risk <= 0 for a nominally positive risk measure
};

// Tail cardinality ceil(level * d), guarded against the binary representation
// of level pushing the product just past an integer, clamped to [1, d].
std::size_t tail_count(double level, std::size_t d);

// -(k-th smallest of r) with k = ceil(level * d); no interpolation.
double empirical_var(std::span<const double> r, double level);

// Mean of -r over the worst ceil(level * d) observations.
double expected_tail_loss(std::span<const double> r, double level);

// Mean of r over the best max(1, ceil((1 - level) * d)) observations.
double upper_tail_mean(std::span<const double> r, double level);

// Evaluate one performance ratio on a vector of portfolio returns.
// Non-positive risk yields the raw signed quotient with degenerate set;
// an exactly zero denominator throws DegenerateRisk.
RatioValue evaluate(const RatioSpec& spec, std::span<const double> r);

// d value / d r_d with tail membership and the argmin frozen at r, sign(0)=0
// for MAD/Gini, and the risk term assigned to the first argmin for MiniMax.
std::vector<double> gradient_wrt_returns(const RatioSpec& spec, std::span<const double> r);

// Batch evaluation over many return vectors (one per month); the hot path
// behind training objectives and grid sweeps.
std::vector<RatioValue> evaluate_many(const RatioSpec& spec,
                                      const std::vector<std::vector<double>>& series,
                                      exec::Mode mode = exec::default_mode());

}  // namespace saa::ratios
