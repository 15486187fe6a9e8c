#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "coexist/demodulator.hpp"
#include "coexist/results.hpp"
#include "coexist/signal_model.hpp"

namespace coexist {

/// On-grid dictionary: Upsilon(k, j*K + kk) = e^{-i 2 pi k tau_j'} conj(dbar_k(kk)),
/// i.e. block column j applied to a coefficient block equals <X, dbar_k e_k^H>
/// for X = h a(tau_j')^H.
struct GridDictionary {
  std::vector<double> delays;  // tau' grid, in [0,1)
  Mat upsilon;                 // N x (Jtilde K)
  int k = 0;                   // coefficient block size K
  IndexSplit split;
  double column_norm_mean = 0.0;  // kappa

  int grid_size() const { return static_cast<int>(delays.size()); }
};

/// Uniform grid of oversampling*N delays over [tau_lo, tau_hi) mapped into [0,1).
GridDictionary build_grid(const IndexSplit& split, const RadarDictionary& dict, int oversampling,
                          double tau_lo = 0.0, double tau_hi = 1.0,
                          std::size_t entry_cap = std::size_t{1} << 27);

struct L1Weights {
  double lambda = 0.0;  // on alpha
  double gamma = 0.0;   // on v
};

/// Section-V defaults: lambda = sigma_w kappa sqrt(2 log(Jtilde K)),
/// gamma = 0.5 sigma_w sqrt(2 log(Jtilde K)).
L1Weights csl1_default_weights(double sigma_w, const GridDictionary& grid);

/// Known-delay default: gamma = 2 sigma_w sqrt(2 log N), no weight on alpha.
L1Weights known_delay_default_weights(double sigma_w, int n);

struct L1Solution {
  Vec alpha;
  Vec v;
  std::vector<double> objective_trace;  // nonincreasing
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

struct L1Options {
  int max_iter = 2000;
  double tol = 1e-9;
};

/// Accelerated proximal gradient (monotone FISTA with backtracking) for
///   min 0.5 ||z - Phi v - Upsilon alpha||^2 + lambda ||alpha||_1 + gamma ||v||_1.
/// lambda == 0 leaves the alpha block unpenalized (least-squares block).
L1Solution solve_l1(const Vec& z, const GridDictionary& grid, const CommLink& link, double lambda,
                    double gamma, const L1Options& opt = {});

/// Max relative violation of the l1 optimality conditions at (alpha, v):
/// for active coords |grad + w sign| / w, for inactive (|grad| - w)_+ / w.
double l1_kkt_violation(const Vec& z, const GridDictionary& grid, const CommLink& link,
                        double lambda, double gamma, const L1Solution& sol);

/// Active blocks of alpha: block j reported iff its 2-norm is at least
/// threshold_rel times the largest block norm.
std::vector<std::pair<int, Vec>> extract_supports(const Vec& alpha, int k, double threshold_rel);

/// Time-domain waveform (1/N) F^H Dbar coeff.
Vec reconstruct_waveform(const Vec& coeff_block, const RadarDictionary& dict);

struct Csl1Options {
  int oversampling = 4;
  double tau_lo = 0.0;
  double tau_hi = 1.0;
  std::optional<L1Weights> weights;  // default: csl1_default_weights(sigma_w)
  int max_outer = 10;
  L1Options inner;
  double support_threshold = 0.05;
  double block_duration = 0.0;  // N*T seconds; used to report delays in seconds
};

/// Full CS-L1 loop: initial demodulation, then {residual -> solve_l1 ->
/// redemodulate} until the symbols reach a fixed point or max_outer.
SolveResult run_csl1(const FreqObservation& obs, const RadarDictionary& dict, const CommLink& link,
                     double sigma_w, const Csl1Options& opt = {}, const Vec* truth = nullptr);

/// Known-delay variant: least-squares radar block at the given delays, l1 on v.
SolveResult run_known_delays(const FreqObservation& obs, const RadarDictionary& dict,
                             const CommLink& link, double sigma_w,
                             const std::vector<double>& delays_norm, const Csl1Options& opt = {},
                             const Vec* truth = nullptr);

}  // namespace coexist
