#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace coexist {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Split of N frequency bins into k = -n1 .. n2 with n1 + n2 + 1 = n.
/// Odd n: n1 = n2 = (n-1)/2.  Even n: n1 = n2 + 1 = n/2.
struct IndexSplit {
  int n1 = 0;
  int n2 = 0;
  int n = 1;

  static IndexSplit for_size(int n);

  int k_at(int row) const { return row - n1; }
  int row_of(int k) const { return k + n1; }
};

bool operator==(const IndexSplit& a, const IndexSplit& b);

// Forward DFT matrix F with F(row,n) = exp(-i 2 pi k n / N), k = row - n1.
// Unnormalized: (1/N) F^H F = I.
Mat dft_matrix(const IndexSplit& split);

Vec dft(const IndexSplit& split, const Vec& x);    // F x
Vec idft(const IndexSplit& split, const Vec& xb);  // (1/N) F^H xb

/// Steering vector a(tau'), entries a_k = exp(+i 2 pi k tau'), k = -n1..n2.
/// a(0) is all ones and a is 1-periodic in tau'.
Vec steering(const IndexSplit& split, double tau_norm);

/// Deterministic per-stream RNG: one seed, independent sub-streams.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

/// Circularly-symmetric complex Gaussian CN(0, var).
cxd draw_cgauss(std::mt19937_64& rng, double var);

/// Unit-norm uniform vector on the complex sphere in C^k.
Vec draw_unit_vector(std::mt19937_64& rng, int k);

/// Complex soft threshold: x -> max(|x|-t, 0) x/|x| elementwise.
Vec soft_threshold(const Vec& x, double t);

}  // namespace coexist
