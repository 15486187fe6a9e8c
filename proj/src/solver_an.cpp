#include "coexist/solver_an.hpp"

#include <chrono>
#include <cmath>

#include "coexist/metrics.hpp"
#include "coexist/param_extract.hpp"

namespace coexist {

Mat toeplitz_project(const Mat& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("toeplitz_project: square input required");
  const Eigen::Index n = u.rows();
  Mat out(n, n);
  for (Eigen::Index d = -(n - 1); d <= n - 1; ++d) {
    cxd acc(0, 0);
    const Eigen::Index len = n - std::abs(d);
    for (Eigen::Index j = 0; j < len; ++j) {
      const Eigen::Index r = d >= 0 ? j + d : j;
      const Eigen::Index c = d >= 0 ? j : j - d;
      acc += u(r, c);
    }
    const cxd mean = acc / static_cast<double>(len);
    for (Eigen::Index j = 0; j < len; ++j) {
      const Eigen::Index r = d >= 0 ? j + d : j;
      const Eigen::Index c = d >= 0 ? j : j - d;
      out(r, c) = mean;
    }
  }
  return out;
}

Mat toeplitz_from_first_column(const Vec& u) {
  const Eigen::Index n = u.size();
  Mat out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(r, c) = r >= c ? u(r - c) : std::conj(u(c - r));
    }
  }
  return out;
}

Vec toeplitz_diagonal_means(const Mat& u) {
  const Eigen::Index n = u.rows();
  Vec out(n);
  for (Eigen::Index d = 0; d < n; ++d) {
    cxd acc(0, 0);
    for (Eigen::Index j = 0; j < n - d; ++j) acc += u(d + j, j);
    out(d) = acc / static_cast<double>(n - d);
  }
  out(0) = cxd(out(0).real(), 0.0);
  return out;
}

namespace {
double log_cosh(double x) {
  const double a = std::abs(x);
  return a - std::log(2.0) + std::log1p(std::exp(-2.0 * a));
}
}  // namespace

double smoothed_l1(const Vec& v, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("smoothed_l1: mu must be > 0");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += log_cosh(std::abs(v(i)) / mu);
  return mu * acc;
}

Vec smoothed_l1_grad(const Vec& v, double mu) {
  Vec g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    g(i) = (m == 0.0) ? cxd(0, 0) : std::tanh(m / mu) * v(i) / m;
  }
  return g;
}

AnWeights csan_default_weights(double sigma_w, int k, int n) {
  const double kn = static_cast<double>(k) * n;
  const double lambda = sigma_w * std::sqrt(kn * std::log(kn));
  return {lambda, lambda / std::sqrt(static_cast<double>(n))};
}

Vec AnProblem::data_residual(const Mat& x, const Vec& v) const {
  Vec e = z - link->apply_fha(v);
  for (int r = 0; r < n(); ++r) {
    e(r) -= dict_freq.row(r) * x.col(r);  // <X, dbar_k e_k^H> = dbar_k^H X e_k
  }
  return e;
}

FactorState init_factor(const AnProblem& problem, int rank_cap, InitStrategy strategy,
                        std::uint64_t seed) {
  if (rank_cap < 1) throw std::invalid_argument("init_factor: rank cap must be >= 1");
  const int n = problem.n();
  const int k = problem.k();
  FactorState st;
  st.v = Vec::Zero(problem.link->m);
  switch (strategy) {
    case InitStrategy::zeros:
      st.V = Mat::Zero(n + k, rank_cap);
      break;
    case InitStrategy::gaussian: {
      auto rng = make_rng(seed, 300);
      const double scale =
          1e-2 * problem.z.norm() / std::sqrt(static_cast<double>(n + k) * rank_cap);
      st.V = Mat(n + k, rank_cap);
      for (int r = 0; r < n + k; ++r) {
        for (int c = 0; c < rank_cap; ++c) st.V(r, c) = draw_cgauss(rng, scale * scale);
      }
      break;
    }
    case InitStrategy::spectral: {
      // PSD surrogate from the residual's empirical autocorrelation and a
      // back-projected interference matrix, then a top-Jbar factorization.
      Vec u0(n);
      for (int d = 0; d < n; ++d) {
        cxd acc(0, 0);
        for (int r = 0; r + d < n; ++r) acc += problem.z(r + d) * std::conj(problem.z(r));
        u0(d) = acc / static_cast<double>(n - d);
      }
      u0(0) = cxd(u0(0).real(), 0.0);
      Mat x0(k, n);
      for (int r = 0; r < n; ++r) {
        const Vec d = problem.dict_freq.row(r).adjoint();
        const double nn = std::max(d.squaredNorm(), 1e-12);
        x0.col(r) = d * (problem.z(r) / nn);
      }
      Mat z0(n + k, n + k);
      z0.topLeftCorner(n, n) = toeplitz_from_first_column(u0);
      z0.topRightCorner(n, k) = x0.adjoint();
      z0.bottomLeftCorner(k, n) = x0;
      z0.bottomRightCorner(k, k) = x0 * x0.adjoint() / std::max(1.0, x0.norm());
      Eigen::SelfAdjointEigenSolver<Mat> eig((z0 + z0.adjoint()) / 2.0);
      st.V = Mat::Zero(n + k, rank_cap);
      const int take = std::min<int>(rank_cap, n + k);
      for (int i = 0; i < take; ++i) {
        const int idx = n + k - 1 - i;  // descending eigenvalues
        const double ev = eig.eigenvalues()(idx);
        if (ev > 0) st.V.col(i) = eig.eigenvectors().col(idx) * std::sqrt(ev);
      }
      break;
    }
  }
  return st;
}

namespace {

struct FactorBlocks {
  Mat u;        // N x N
  Mat x;        // K x N
  Mat u_resid;  // U - P_toep(U)
  Vec e;        // data residual
};

FactorBlocks factor_blocks(const AnProblem& problem, const Mat& V, const Vec& v) {
  const int n = problem.n();
  const int k = problem.k();
  FactorBlocks b;
  const auto vt = V.topRows(n);
  const auto vb = V.bottomRows(k);
  b.u = vt * vt.adjoint();
  b.x = vb * vt.adjoint();
  b.u_resid = b.u - toeplitz_project(b.u);
  b.e = problem.data_residual(b.x, v);
  return b;
}

}  // namespace

double an_objective_factored(const AnProblem& problem, const Mat& V, const Vec& v) {
  const int n = problem.n();
  const int k = problem.k();
  const auto vt = V.topRows(n);
  const auto vb = V.bottomRows(k);
  const Mat x = vb * vt.adjoint();
  const Vec e = problem.data_residual(x, v);
  const Mat u = vt * vt.adjoint();
  const double pen = (u - toeplitz_project(u)).squaredNorm();
  return 0.5 * e.squaredNorm() + problem.lambda / (2.0 * n) * vt.squaredNorm() +
         0.5 * problem.lambda * vb.squaredNorm() + 0.5 * problem.rho_pen * pen +
         problem.gamma * smoothed_l1(v, problem.mu);
}

void an_gradients(const AnProblem& problem, const Mat& V, const Vec& v, Mat& grad_V, Vec& grad_v) {
  const int n = problem.n();
  const int k = problem.k();
  const FactorBlocks b = factor_blocks(problem, V, v);
  const auto vt = V.topRows(n);
  const auto vb = V.bottomRows(k);

  // gX = -Dbar^H diag(e): column r is -e(r) dbar_r
  Mat gx(k, n);
  for (int r = 0; r < n; ++r) gx.col(r) = -b.e(r) * problem.dict_freq.row(r).adjoint();

  grad_V.resize(n + k, V.cols());
  grad_V.topRows(n) =
      (problem.lambda / n) * vt + 2.0 * problem.rho_pen * (b.u_resid * vt) + gx.adjoint() * vb;
  grad_V.bottomRows(k) = gx * vt + problem.lambda * vb;

  grad_v = -problem.link->apply_fha_adjoint(b.e) + problem.gamma * smoothed_l1_grad(v, problem.mu);
}

double an_objective_sdp(const AnProblem& problem, const Mat& x, const Vec& u, const Mat& t,
                        const Vec& v) {
  const Vec e = problem.data_residual(x, v);
  // Tr(Toep(u)) = N u(0), so (lambda/2N) Tr(Toep(u)) = lambda/2 u(0)
  return 0.5 * e.squaredNorm() + 0.5 * problem.lambda * u(0).real() +
         0.5 * problem.lambda * t.trace().real() + problem.gamma * v.cwiseAbs().sum();
}

CgResult cg_solve(const AnProblem& problem, FactorState init, const CgOptions& opt) {
  if (opt.max_iter < 1) throw std::invalid_argument("cg_solve: max_iter must be >= 1");
  CgResult res;
  res.state = std::move(init);
  Mat& V = res.state.V;
  Vec& v = res.state.v;

  double f = an_objective_factored(problem, V, v);
  Mat gV, gV_prev, P;
  Vec gv, gv_prev, p;
  double step_prev = 1.0;

  for (int it = 1; it <= opt.max_iter; ++it) {
    an_gradients(problem, V, v, gV, gv);
    const double gnorm = std::sqrt(gV.squaredNorm() + gv.squaredNorm());
    if (gnorm <= opt.grad_tol) {
      res.converged = true;
      break;
    }

    double omega = 0.0;
    if (it == 1) {
      P = -gV;
      p = -gv;
    } else {
      const Mat Q = gV - gV_prev;
      const Vec q = gv - gv_prev;
      const double num = (gV.conjugate().cwiseProduct(Q)).sum().real() + gv.dot(q).real();
      const double den = opt.polak_ribiere
                             ? (gV_prev.squaredNorm() + gv_prev.squaredNorm())
                             : ((P.conjugate().cwiseProduct(Q)).sum().real() + p.dot(q).real());
      omega = (std::abs(den) > 1e-300 && std::isfinite(num / den)) ? num / den : 0.0;
      P = -gV + omega * P;
      p = -gv + omega * p;
    }

    double dd = (P.conjugate().cwiseProduct(gV)).sum().real() + p.dot(gv).real();
    if (dd >= 0.0) {  // not a descent direction: restart with steepest descent
      P = -gV;
      p = -gv;
      omega = 0.0;
      dd = -gnorm * gnorm;
    }

    double step = 2.0 * step_prev;
    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      const double f_try = an_objective_factored(problem, V + step * P, v + step * p);
      if (f_try <= f + opt.armijo_c * step * dd) {
        V += step * P;
        v += step * p;
        f = f_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }
    step_prev = step;
    gV_prev = gV;
    gv_prev = gv;
    res.iterations = it;
    res.trace.push_back({f, gnorm, step, omega});
  }
  return res;
}

Mat SdpState::z_matrix() const {
  const Eigen::Index n = u.size();
  const Eigen::Index k = x.rows();
  Mat z(n + k, n + k);
  z.topLeftCorner(n, n) = toeplitz_from_first_column(u);
  z.topRightCorner(n, k) = x.adjoint();
  z.bottomLeftCorner(k, n) = x;
  z.bottomRightCorner(k, k) = t;
  return z;
}

SdpState admm_solve(const AnProblem& problem, const AdmmOptions& opt) {
  const int n = problem.n();
  const int k = problem.k();
  const int m = problem.link->m;
  const int d = n + k;
  double rho = opt.rho;

  RealVec dn2(n);  // ||dbar_k||^2 per row
  for (int r = 0; r < n; ++r) dn2(r) = problem.dict_freq.row(r).squaredNorm();

  Mat S = Mat::Zero(d, d), Lambda = Mat::Zero(d, d);
  Vec w = Vec::Zero(m), eta = Vec::Zero(m);
  SdpState st;
  st.x = Mat::Zero(k, n);
  st.u = Vec::Zero(n);
  st.t = Mat::Zero(k, k);
  st.v = Vec::Zero(m);

  Mat S_prev = S;
  Vec w_prev = w;

  for (int it = 1; it <= opt.max_iter; ++it) {
    const Mat B = S - Lambda / rho;
    const auto b_uu = B.topLeftCorner(n, n);
    const Mat b_x = (B.bottomLeftCorner(k, n) + B.topRightCorner(n, k).adjoint()) / 2.0;
    const Mat b_tt = (B.bottomRightCorner(k, k) + B.bottomRightCorner(k, k).adjoint()) / 2.0;

    // joint (X, u, T, v) block: X eliminated per column, v in closed form
    Vec dgb(n);  // dbar_r^H b_r
    for (int r = 0; r < n; ++r) dgb(r) = problem.dict_freq.row(r) * b_x.col(r);
    RealVec wk(n);
    for (int r = 0; r < n; ++r) wk(r) = 2.0 * rho / (2.0 * rho + dn2(r));

    const Vec zhat = problem.z - dgb;
    const Vec target = w - eta / rho;
    for (int i = 0; i < m; ++i) {
      const cxd g = problem.link->gamma(i);
      st.v(i) = (wk(i) * std::conj(g) * zhat(i) + rho * target(i)) /
                (wk(i) * std::norm(g) + rho);
    }

    const Vec c = problem.z - problem.link->apply_fha(st.v);
    for (int r = 0; r < n; ++r) {
      const Vec dbar = problem.dict_freq.row(r).adjoint();
      st.x.col(r) = b_x.col(r) + dbar * ((c(r) - dgb(r)) / (2.0 * rho + dn2(r)));
    }

    st.u = toeplitz_diagonal_means(b_uu);
    st.u(0) -= problem.lambda / (2.0 * rho * n);
    st.t = b_tt - (problem.lambda / (2.0 * rho)) * Mat::Identity(k, k);

    Mat Q(d, d);
    Q.topLeftCorner(n, n) = toeplitz_from_first_column(st.u);
    Q.topRightCorner(n, k) = st.x.adjoint();
    Q.bottomLeftCorner(k, n) = st.x;
    Q.bottomRightCorner(k, k) = st.t;

    // PSD projection
    Mat G = Q + Lambda / rho;
    G = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> eig(G);
    S = eig.eigenvectors() *
        eig.eigenvalues().cwiseMax(0.0).cast<cxd>().asDiagonal() *
        eig.eigenvectors().adjoint();

    w = soft_threshold(st.v + eta / rho, problem.gamma / rho);

    Lambda += rho * (Q - S);
    eta += rho * (st.v - w);

    const double r1 = std::sqrt((Q - S).squaredNorm() + (st.v - w).squaredNorm());
    const double s1 = rho * std::sqrt((S - S_prev).squaredNorm() + (w - w_prev).squaredNorm());
    st.primal_residual = r1;
    st.dual_residual = s1;
    st.iterations = it;
    S_prev = S;
    w_prev = w;

    const double scale_p = 1.0 + std::max(Q.norm(), S.norm());
    const double scale_d = 1.0 + Lambda.norm();
    if (r1 <= opt.tol * scale_p && s1 <= opt.tol * scale_d) {
      st.converged = true;
      break;
    }
    if (opt.adapt_rho && it % 25 == 0) {
      if (r1 > 10.0 * s1) {
        rho *= 2.0;
      } else if (s1 > 10.0 * r1) {
        rho /= 2.0;
      }
    }
  }

  st.v = w;  // exactly sparse copy
  return st;
}

int rank_of_solution(const Mat& z, double rel_tol) {
  Mat h = (z + z.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmax <= 0.0) return 0;
  int count = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) >= rel_tol * lmax) ++count;
  }
  return count;
}

SolveResult run_csan(const FreqObservation& obs, const RadarDictionary& dict, const CommLink& link,
                     double sigma_w, const CsanOptions& opt, const Vec* truth) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = obs.split.n;
  const int k = dict.k;
  const AnWeights w = opt.weights ? *opt.weights : csan_default_weights(sigma_w, k, n);

  SolveResult res;
  res.solver_name = opt.solver == AnSolverKind::cg ? "csan_cg" : "csan_admm";

  Vec bhat = demodulate_initial(obs, link).symbols;
  if (truth) res.ser_trace.push_back(ser(*truth, bhat));

  AnProblem problem;
  problem.split = obs.split;
  problem.dict_freq = dict.freq_columns;
  problem.link = &link;
  problem.lambda = w.lambda;
  problem.gamma = w.gamma;
  problem.rho_pen = opt.rho_pen;
  problem.mu = opt.mu;

  Mat x_hat = Mat::Zero(k, n);
  Vec v_hat = Vec::Zero(link.m);
  Mat warm_V;

  for (int l = 1; l <= opt.max_outer; ++l) {
    problem.z = residual(obs, bhat, link);
    if (opt.solver == AnSolverKind::cg) {
      FactorState init = init_factor(problem, opt.rank_cap, InitStrategy::gaussian, opt.init_seed);
      if (warm_V.size() > 0) init.V = warm_V;
      CgResult cg = cg_solve(problem, std::move(init), opt.cg);
      if (cg.line_search_failed && cg.trace.empty()) {
        res.solver_failed = true;
        break;
      }
      warm_V = cg.state.V;
      x_hat = cg.state.x_block(n, k);
      v_hat = cg.state.v;
      res.objective_trace.push_back(cg.trace.empty() ? 0.0 : cg.trace.back().objective);
    } else {
      SdpState sdp = admm_solve(problem, opt.admm);
      x_hat = sdp.x;
      v_hat = sdp.v;
      res.objective_trace.push_back(an_objective_sdp(problem, sdp.x, sdp.u, sdp.t, sdp.v));
    }
    const Vec bnext = redemodulate(bhat, v_hat, link.constellation);
    res.outer_iterations = l;
    if (truth) res.ser_trace.push_back(ser(*truth, bnext));
    const bool fixed = (bnext - bhat).cwiseAbs().maxCoeff() == 0.0;
    bhat = bnext;
    if (fixed) {
      res.reached_fixed_point = true;
      break;
    }
  }

  res.symbols = bhat;
  res.v_hat = v_hat;
  res.x_hat = x_hat;

  // explicit radar parameters from the interference-matrix estimate
  const double delta = opt.assoc_delta > 0 ? opt.assoc_delta : 1.0 / (4.0 * n);
  std::vector<RowEstimate> rows;
  rows.reserve(k);
  MusicOptions mopt;
  for (int r = 0; r < k; ++r) {
    rows.push_back(music_row(x_hat.row(r).transpose(), obs.split, opt.music_max_order, mopt));
  }
  const auto assoc = associate(rows, delta);
  for (const auto& a : assoc.first) {
    RadarEstimate est;
    est.delay_norm = a.delay_norm;
    est.delay_s = a.delay_norm * opt.block_duration;
    est.coeff = a.coeff;
    est.waveform = idft(obs.split, dict.freq_columns * a.coeff);
    res.radars.push_back(std::move(est));
  }

  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace coexist
