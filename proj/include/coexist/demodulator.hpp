#pragma once

#include <vector>

#include "coexist/signal_model.hpp"

namespace coexist {

struct DemodResult {
  Vec symbols;                          // hard decisions, in B^M
  std::vector<int> flagged_subcarriers; // |gamma| below the singular guard
};

/// Initial decoder: per-subcarrier zero-forcing equalization followed by
/// minimum-distance slicing. Subcarriers with |gamma| < 1e-12 are flagged and
/// decided on the raw value.
DemodResult demodulate_initial(const FreqObservation& obs, const CommLink& link);

/// Frequency-domain residual z = rbar - F H A bhat. With bhat = b - v this is
/// <H A v, f_k> + interference + noise elementwise.
Vec residual(const FreqObservation& obs, const Vec& bhat, const CommLink& link);

/// Error-corrected re-demodulation: slice(bhat_prev + vhat) elementwise.
Vec redemodulate(const Vec& bhat_prev, const Vec& vhat, const Constellation& constellation);

}  // namespace coexist
