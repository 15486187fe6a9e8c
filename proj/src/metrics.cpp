#include "coexist/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coexist {

double ser(const Vec& truth, const Vec& decided) {
  if (truth.size() != decided.size()) throw std::invalid_argument("ser: length mismatch");
  if (truth.size() == 0) return 0.0;
  int errors = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth(i) != decided(i)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(truth.size());
}

DelayRmseResult delay_rmse(const std::vector<TrialTruth>& truth,
                           const std::vector<TrialEstimate>& estimates, double radius_s) {
  if (radius_s <= 0.0) throw std::invalid_argument("delay_rmse: radius must be > 0");
  if (truth.size() != estimates.size()) throw std::invalid_argument("delay_rmse: trial mismatch");
  DelayRmseResult out;
  out.identified.resize(truth.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    double trial_acc = 0.0;
    int identified = 0;
    for (std::size_t j = 0; j < truth[m].delays_s.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (double est : estimates[m].delays_s) {
        best = std::min(best, std::abs(est - truth[m].delays_s[j]));
      }
      if (best < radius_s) {
        out.identified[m].push_back(static_cast<int>(j));
        trial_acc += best * best;
        ++identified;
      }
    }
    if (identified > 0) {
      acc += trial_acc / identified;
      ++out.trials_with_identification;
    }
  }
  if (out.trials_with_identification > 0) {
    out.rmse_s = std::sqrt(acc / out.trials_with_identification);
  }
  return out;
}

std::optional<double> waveform_relative_mse(const std::vector<TrialTruth>& truth,
                                            const std::vector<TrialEstimate>& estimates,
                                            const std::vector<std::vector<int>>& identified) {
  double acc = 0.0;
  int trials = 0;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    if (identified[m].empty()) continue;
    double trial_acc = 0.0;
    for (int j : identified[m]) {
      // best-match estimate by delay proximity
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < estimates[m].delays_s.size(); ++e) {
        const double d = std::abs(estimates[m].delays_s[e] - truth[m].delays_s[j]);
        if (d < best_d) {
          best_d = d;
          best = e;
        }
      }
      const Vec& cg = truth[m].waveforms[j];
      const Vec& est = estimates[m].waveforms[best];
      trial_acc += (cg - est).squaredNorm() / cg.squaredNorm();
    }
    acc += trial_acc / identified[m].size();
    ++trials;
  }
  if (trials == 0) return std::nullopt;
  return acc / trials;
}

}  // namespace coexist
