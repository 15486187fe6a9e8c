#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "coexist/demodulator.hpp"
#include "coexist/results.hpp"
#include "coexist/signal_model.hpp"

namespace coexist {

/// Projection onto Toeplitz matrices: every diagonal replaced by its mean.
/// Idempotent; Toeplitz inputs are fixed points; Hermitian inputs stay
/// Hermitian.
Mat toeplitz_project(const Mat& u);

/// Hermitian Toeplitz matrix with first column u (u(0) real).
Mat toeplitz_from_first_column(const Vec& u);

/// First column of the diagonal-mean Toeplitz projection of a Hermitian block.
Vec toeplitz_diagonal_means(const Mat& u);

/// Smoothed l1: mu * sum log cosh(|v_m| / mu), overflow-safe. Satisfies
/// psi_mu(v) <= ||v||_1 with gap at most M mu log 2.
double smoothed_l1(const Vec& v, double mu);

/// Gradient of psi_mu: tanh(|v_m|/mu) v_m/|v_m|, 0 at v_m = 0.
Vec smoothed_l1_grad(const Vec& v, double mu);

struct AnWeights {
  double lambda = 0.0;
  double gamma = 0.0;
};

/// Section-V defaults: lambda = sigma_w sqrt(K N log(K N)), gamma = lambda/sqrt(N).
AnWeights csan_default_weights(double sigma_w, int k, int n);

/// Data shared by the atomic-norm objective, its gradients and both solvers.
struct AnProblem {
  IndexSplit split;
  Mat dict_freq;        // Dbar, N x K; row k is dbar_k^H
  const CommLink* link = nullptr;
  Vec z;
  double lambda = 0.0;
  double gamma = 0.0;
  double rho_pen = 5.0;  // Toeplitz penalty weight (factored solver)
  double mu = 0.01;      // l1 smoothing level (factored solver)

  int n() const { return split.n; }
  int k() const { return static_cast<int>(dict_freq.cols()); }

  /// e = z - Phi v - diag(Dbar X); the data-term residual.
  Vec data_residual(const Mat& x, const Vec& v) const;
};

struct FactorState {
  Mat V;  // (N+K) x Jbar, Z = V V^H
  Vec v;  // C^M

  Mat x_block(int n, int k) const { return V.bottomRows(k) * V.topRows(n).adjoint(); }
};

enum class InitStrategy { zeros, gaussian, spectral };

/// Initial factor. gaussian: entries CN(0, s^2) with
/// s = 1e-2 ||z|| / sqrt((N+K) Jbar); spectral: factor of a PSD surrogate built
/// from the residual's empirical autocorrelation and a back-projected X.
FactorState init_factor(const AnProblem& problem, int rank_cap, InitStrategy strategy,
                        std::uint64_t seed);

/// Smoothed, Toeplitz-penalized objective on the factored variable,
///   zeta(VV^H, v) = data + (lambda/2N) Tr(U) + (lambda/2) Tr(T)
///                 + (rho_pen/2) ||P_toep(U) - U||_F^2 + gamma psi_mu(v).
double an_objective_factored(const AnProblem& problem, const Mat& V, const Vec& v);

/// Wirtinger gradients of the factored objective. The convention is fixed by
/// finite differences: f(V + t dV) - f(V) = t Re<gV, dV> + O(t^2), same for v.
void an_gradients(const AnProblem& problem, const Mat& V, const Vec& v, Mat& grad_V, Vec& grad_v);

/// SDP objective of the convex problem (exact l1, U = Toep(u), no penalty):
///   data + (lambda/2N) Tr(Toep(u)) + (lambda/2) Tr(T) + gamma ||v||_1.
double an_objective_sdp(const AnProblem& problem, const Mat& x, const Vec& u, const Mat& t,
                        const Vec& v);

struct CgOptions {
  int max_iter = 4000;
  double grad_tol = 0.01;
  double armijo_c = 1e-4;
  int max_backtracks = 50;
  bool polak_ribiere = false;  // default direction mixing is Hestenes-Stiefel
};

struct CgResult {
  FactorState state;
  std::vector<SolverIterTrace> trace;
  bool converged = false;
  bool line_search_failed = false;
  int iterations = 0;
};

/// Joint nonlinear CG over (V, v) with Armijo backtracking; first step is
/// steepest descent. Stops when the joint gradient norm falls below grad_tol.
CgResult cg_solve(const AnProblem& problem, FactorState init, const CgOptions& opt = {});

struct AdmmOptions {
  double rho = 1.0;
  bool adapt_rho = true;
  int max_iter = 20000;
  double tol = 1e-6;
};

struct SdpState {
  Mat x;  // K x N
  Vec u;  // first column of the Toeplitz block, u(0) real
  Mat t;  // K x K
  Vec v;  // C^M
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;

  Mat z_matrix() const;  // [[Toep(u), X^H],[X, T]]
};

/// Reference solver for the convex SDP form via ADMM with one PSD projection
/// (eigendecomposition) per iteration.
SdpState admm_solve(const AnProblem& problem, const AdmmOptions& opt = {});

/// Eigenvalue count above rel_tol * lambda_max (0 for PSD-zero inputs).
int rank_of_solution(const Mat& z, double rel_tol);

enum class AnSolverKind { cg, admm };

struct CsanOptions {
  std::optional<AnWeights> weights;  // default csan_default_weights(sigma_w,K,N)
  AnSolverKind solver = AnSolverKind::cg;
  int rank_cap = 10;   // Jbar
  double mu = 0.01;
  double rho_pen = 5.0;
  CgOptions cg;
  AdmmOptions admm;
  int max_outer = 10;
  std::uint64_t init_seed = 1;
  double assoc_delta = -1.0;  // < 0: default 1/(4N)
  int music_max_order = 8;
  double block_duration = 0.0;
};

/// Full CS-AN loop: initial demodulation, then {residual -> cg/admm solve ->
/// redemodulate} to a symbol fixed point; MUSIC + association afterwards.
SolveResult run_csan(const FreqObservation& obs, const RadarDictionary& dict, const CommLink& link,
                     double sigma_w, const CsanOptions& opt = {}, const Vec* truth = nullptr);

}  // namespace coexist
