#pragma once

#include <utility>
#include <vector>

#include "coexist/signal_model.hpp"

namespace coexist {

/// Components recovered from one row of the interference matrix:
/// row(k) = sum_j beta_j e^{-i 2 pi k tau_j'} over k = -n1..n2.
struct RowEstimate {
  std::vector<cxd> amplitudes;   // beta_j
  std::vector<double> delays;    // tau_j' in [0,1)

  int count() const { return static_cast<int>(delays.size()); }
};

struct MusicOptions {
  double eig_gap_rel = 1e-2;  // model order: eigenvalues >= rel * largest
  int grid_mult = 8;          // pseudospectrum grid = grid_mult * N
  double zero_row_tol = 1e-14;
};

/// Forward-backward spatially-smoothed MUSIC on a single row, subarray
/// length ceil(N/2), peak locations refined by golden-section search,
/// amplitudes by least squares on the recovered exponentials.
RowEstimate music_row(const Vec& row, const IndexSplit& split, int max_order,
                      const MusicOptions& opt = {});

struct AssociatedRadar {
  double delay_norm = 0.0;
  Vec coeff;  // c h accumulated coordinate by coordinate
};

/// Association across rows: a component (k, l) merges into an existing radar m
/// iff |tau_m - tau_l(k)| <= delta and coordinate k of m is still zero; the
/// merged delay is the amplitude-weighted mean. Components are visited rows
/// ascending, amplitudes descending, so the output is a pure function of the
/// input order.
std::pair<std::vector<AssociatedRadar>, int> associate(const std::vector<RowEstimate>& rows,
                                                       double delta);

/// Dual certificate: nu plus the vector polynomial q(tau') = D(nu) a(tau').
struct DualCertificate {
  Vec nu;         // C^N
  Mat dict_freq;  // Dbar
  IndexSplit split;

  Vec q(double tau_norm) const;        // C^K
  double q_norm(double tau_norm) const;
};

/// nu(k) = z(k) - <f_k, H A v> - <X, dbar_k e_k^H>: the data residual at the
/// primal solution, which is the maximizer of the dual objective.
DualCertificate dual_from_primal(const Vec& z, const Mat& x_hat, const Vec& v_hat,
                                 const CommLink& link, const Mat& dict_freq,
                                 const IndexSplit& split);

/// Delays where ||q(tau')|| peaks within 1% of lambda on a dense grid,
/// refined by golden-section search.
std::vector<double> locate_by_certificate(const DualCertificate& cert, double lambda,
                                          int grid_density);

}  // namespace coexist
