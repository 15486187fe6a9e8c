#pragma once

#include <optional>
#include <vector>

#include "coexist/core.hpp"

namespace coexist {

/// Fraction of differing symbols.
double ser(const Vec& truth, const Vec& decided);

struct TrialTruth {
  std::vector<double> delays_s;
  std::vector<Vec> waveforms;  // c_j g_j
};

struct TrialEstimate {
  std::vector<double> delays_s;
  std::vector<Vec> waveforms;  // c g estimates
};

struct DelayRmseResult {
  std::optional<double> rmse_s;               // undefined when nothing was identified
  std::vector<std::vector<int>> identified;   // Omega_m per trial (true-radar indices)
  int trials_with_identification = 0;
};

/// A radar is identified iff some estimate lies within `radius_s` of its true
/// delay. RMSE averages squared errors per trial over identified radars, then
/// across trials with a nonempty identified set.
DelayRmseResult delay_rmse(const std::vector<TrialTruth>& truth,
                           const std::vector<TrialEstimate>& estimates, double radius_s);

/// Mean over trials (with nonempty Omega) of the mean relative waveform error
/// ||c g - est||^2 / ||c g||^2 over identified radars, matched by delay.
std::optional<double> waveform_relative_mse(const std::vector<TrialTruth>& truth,
                                            const std::vector<TrialEstimate>& estimates,
                                            const std::vector<std::vector<int>>& identified);

}  // namespace coexist
