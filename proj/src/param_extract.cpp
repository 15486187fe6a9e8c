#include "coexist/param_extract.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace coexist {

namespace {

// golden-section minimizer of g over [lo, hi]
double golden_min(const std::function<double(double)>& g, double lo, double hi, int iters = 80) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < iters && (b - a) > 1e-15; ++i) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - gr * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + gr * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

Vec subarray_steering(int len, double tau) {
  Vec a(len);
  for (int i = 0; i < len; ++i) a(i) = std::polar(1.0, -2.0 * kPi * i * tau);
  return a;
}

}  // namespace

RowEstimate music_row(const Vec& row, const IndexSplit& split, int max_order,
                      const MusicOptions& opt) {
  RowEstimate out;
  const int n = split.n;
  if (row.size() != n) throw std::invalid_argument("music_row: row length mismatch");
  if (max_order >= (n + 1) / 2 + 1) {
    // subarray length ceil(N/2) supports at most ceil(N/2)-1 components
    max_order = (n + 1) / 2;
  }
  if (row.cwiseAbs().maxCoeff() <= opt.zero_row_tol) return out;

  const int L = (n + 1) / 2;  // ceil(N/2)
  const int snapshots = n - L + 1;

  // forward-backward smoothed covariance
  Mat R = Mat::Zero(L, L);
  for (int i = 0; i < snapshots; ++i) {
    const Vec y = row.segment(i, L);
    R += y * y.adjoint();
  }
  R /= static_cast<double>(snapshots);
  Mat J = Mat::Zero(L, L);
  for (int i = 0; i < L; ++i) J(i, L - 1 - i) = 1.0;
  R = 0.5 * (R + J * R.conjugate() * J);

  Eigen::SelfAdjointEigenSolver<Mat> eig(R);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmax <= 0.0) return out;
  int order = 0;
  for (int i = 0; i < L; ++i) {
    if (eig.eigenvalues()(i) >= opt.eig_gap_rel * lmax) ++order;
  }
  order = std::min({order, max_order, L - 1});
  if (order <= 0) return out;

  const Mat noise = eig.eigenvectors().leftCols(L - order);  // ascending eigenvalues

  auto spectrum_den = [&](double tau) { return (noise.adjoint() * subarray_steering(L, tau)).squaredNorm(); };

  const int grid = std::max(opt.grid_mult * n, 256);
  std::vector<double> den(grid);
  for (int i = 0; i < grid; ++i) den[i] = spectrum_den(static_cast<double>(i) / grid);

  // circular local minima of the denominator = pseudospectrum peaks
  std::vector<std::pair<double, int>> peaks;  // (den value, grid index)
  for (int i = 0; i < grid; ++i) {
    const double prev = den[(i + grid - 1) % grid];
    const double next = den[(i + 1) % grid];
    if (den[i] < prev && den[i] <= next) peaks.emplace_back(den[i], i);
  }
  std::sort(peaks.begin(), peaks.end());
  const int keep = std::min<int>(order, static_cast<int>(peaks.size()));

  std::vector<double> delays;
  for (int p = 0; p < keep; ++p) {
    const double t0 = static_cast<double>(peaks[p].second) / grid;
    const double h = 1.0 / grid;
    double t = golden_min(spectrum_den, t0 - h, t0 + h);
    t -= std::floor(t);
    delays.push_back(t);
  }

  // amplitudes: least squares on the full row, s(m) = sum_j b_j e^{-i2 pi m tau_j}
  Mat A(n, delays.size());
  for (std::size_t j = 0; j < delays.size(); ++j) {
    for (int m = 0; m < n; ++m) A(m, j) = std::polar(1.0, -2.0 * kPi * m * delays[j]);
  }
  const Vec b = A.colPivHouseholderQr().solve(row);
  for (std::size_t j = 0; j < delays.size(); ++j) {
    out.delays.push_back(delays[j]);
    out.amplitudes.push_back(b(j) * std::polar(1.0, -2.0 * kPi * split.n1 * delays[j]));
  }
  return out;
}

std::pair<std::vector<AssociatedRadar>, int> associate(const std::vector<RowEstimate>& rows,
                                                       double delta) {
  if (delta <= 0.0) throw std::invalid_argument("associate: delta must be > 0");
  const int k = static_cast<int>(rows.size());
  std::vector<AssociatedRadar> s;

  for (int row = 0; row < k; ++row) {
    // components by descending amplitude magnitude
    std::vector<int> order(rows[row].count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(rows[row].amplitudes[a]) > std::abs(rows[row].amplitudes[b]);
    });

    for (int l : order) {
      const double tau = rows[row].delays[l];
      const cxd beta = rows[row].amplitudes[l];

      int best = -1;
      double best_dist = delta;
      for (std::size_t m = 0; m < s.size(); ++m) {
        if (s[m].coeff(row) != cxd(0, 0)) continue;  // coordinate already assigned
        const double dist = std::abs(s[m].delay_norm - tau);
        if (dist <= best_dist) {
          best_dist = dist;
          best = static_cast<int>(m);
        }
      }
      if (best >= 0) {
        AssociatedRadar& r = s[best];
        const double weight = r.coeff.cwiseAbs().sum();
        r.delay_norm = (weight * r.delay_norm + std::abs(beta) * tau) /
                       (weight + std::abs(beta));
        r.coeff(row) = beta;
      } else {
        AssociatedRadar rnew;
        rnew.delay_norm = tau;
        rnew.coeff = Vec::Zero(k);
        rnew.coeff(row) = beta;
        s.push_back(std::move(rnew));
      }
    }
  }
  const int count = static_cast<int>(s.size());
  return {std::move(s), count};
}

Vec DualCertificate::q(double tau_norm) const {
  return dict_freq.adjoint() * nu.cwiseProduct(steering(split, tau_norm));
}

double DualCertificate::q_norm(double tau_norm) const { return q(tau_norm).norm(); }

DualCertificate dual_from_primal(const Vec& z, const Mat& x_hat, const Vec& v_hat,
                                 const CommLink& link, const Mat& dict_freq,
                                 const IndexSplit& split) {
  DualCertificate cert;
  cert.dict_freq = dict_freq;
  cert.split = split;
  cert.nu = z - link.apply_fha(v_hat);
  for (int r = 0; r < split.n; ++r) cert.nu(r) -= dict_freq.row(r) * x_hat.col(r);
  return cert;
}

std::vector<double> locate_by_certificate(const DualCertificate& cert, double lambda,
                                          int grid_density) {
  std::vector<double> out;
  if (cert.nu.cwiseAbs().maxCoeff() <= 0.0) return out;
  const int g = std::max(grid_density, 4 * cert.split.n);
  std::vector<double> vals(g);
  for (int i = 0; i < g; ++i) vals[i] = cert.q_norm(static_cast<double>(i) / g);

  auto neg_norm = [&](double tau) { return -cert.q_norm(tau); };
  for (int i = 0; i < g; ++i) {
    const double prev = vals[(i + g - 1) % g];
    const double next = vals[(i + 1) % g];
    if (vals[i] > prev && vals[i] >= next) {
      const double h = 1.0 / g;
      const double t0 = static_cast<double>(i) / g;
      double t = golden_min(neg_norm, t0 - h, t0 + h);
      t -= std::floor(t);
      if (cert.q_norm(t) >= 0.99 * lambda) {
        bool dup = false;
        for (double seen : out) {
          double d = std::abs(seen - t);
          d = std::min(d, 1.0 - d);
          if (d < 0.5 / g) dup = true;
        }
        if (!dup) out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace coexist
