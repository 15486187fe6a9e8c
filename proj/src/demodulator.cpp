#include "coexist/demodulator.hpp"

namespace coexist {

DemodResult demodulate_initial(const FreqObservation& obs, const CommLink& link) {
  DemodResult out;
  out.symbols = Vec(link.m);
  for (int i = 0; i < link.m; ++i) {
    const cxd g = link.gamma(i);
    cxd y;
    if (std::abs(g) < 1e-12) {
      out.flagged_subcarriers.push_back(i);
      y = obs.values(i);
    } else {
      y = obs.values(i) / g;
    }
    out.symbols(i) = link.constellation.slice(y);
  }
  return out;
}

Vec residual(const FreqObservation& obs, const Vec& bhat, const CommLink& link) {
  return obs.values - link.apply_fha(bhat);
}

Vec redemodulate(const Vec& bhat_prev, const Vec& vhat, const Constellation& constellation) {
  return constellation.slice(bhat_prev + vhat);
}

}  // namespace coexist
