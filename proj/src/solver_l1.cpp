#include "coexist/solver_l1.hpp"

#include <chrono>
#include <cmath>

#include "coexist/metrics.hpp"

namespace coexist {

namespace {

GridDictionary assemble_grid(const IndexSplit& split, const RadarDictionary& dict,
                             std::vector<double> delays, std::size_t entry_cap) {
  const int n = split.n;
  const int k = dict.k;
  const std::size_t entries =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(k) * delays.size();
  if (entries > entry_cap) {
    throw std::invalid_argument("build_grid: Jtilde*K*N exceeds the configured cap");
  }
  GridDictionary grid;
  grid.split = split;
  grid.k = k;
  grid.delays = std::move(delays);
  grid.upsilon = Mat(n, static_cast<Eigen::Index>(grid.delays.size()) * k);
  for (std::size_t j = 0; j < grid.delays.size(); ++j) {
    for (int r = 0; r < n; ++r) {
      const cxd phase = std::polar(1.0, -2.0 * kPi * split.k_at(r) * grid.delays[j]);
      for (int c = 0; c < k; ++c) {
        grid.upsilon(r, static_cast<Eigen::Index>(j) * k + c) =
            phase * std::conj(dict.freq_columns(r, c));
      }
    }
  }
  double acc = 0.0;
  for (Eigen::Index c = 0; c < grid.upsilon.cols(); ++c) acc += grid.upsilon.col(c).norm();
  grid.column_norm_mean =
      grid.upsilon.cols() > 0 ? acc / static_cast<double>(grid.upsilon.cols()) : 0.0;
  return grid;
}

}  // namespace

GridDictionary build_grid(const IndexSplit& split, const RadarDictionary& dict, int oversampling,
                          double tau_lo, double tau_hi, std::size_t entry_cap) {
  if (oversampling < 1) throw std::invalid_argument("build_grid: oversampling must be >= 1");
  const int jt = oversampling * split.n;
  std::vector<double> delays(jt);
  const double span = tau_hi - tau_lo;
  for (int j = 0; j < jt; ++j) {
    double t = tau_lo + span * j / jt;
    delays[j] = t - std::floor(t);  // map into [0,1)
  }
  return assemble_grid(split, dict, std::move(delays), entry_cap);
}

L1Weights csl1_default_weights(double sigma_w, const GridDictionary& grid) {
  const double jk = static_cast<double>(grid.grid_size()) * grid.k;
  const double base = sigma_w * std::sqrt(2.0 * std::log(jk));
  return {grid.column_norm_mean * base, 0.5 * base};
}

L1Weights known_delay_default_weights(double sigma_w, int n) {
  return {0.0, 2.0 * sigma_w * std::sqrt(2.0 * std::log(static_cast<double>(n)))};
}

namespace {

struct JointVec {
  Vec alpha;
  Vec v;
};

double joint_sqnorm(const JointVec& a) { return a.alpha.squaredNorm() + a.v.squaredNorm(); }

}  // namespace

L1Solution solve_l1(const Vec& z, const GridDictionary& grid, const CommLink& link, double lambda,
                    double gamma, const L1Options& opt) {
  if (gamma <= 0.0 || lambda < 0.0) {
    throw std::invalid_argument("solve_l1: gamma must be > 0 and lambda >= 0");
  }
  const Mat& U = grid.upsilon;
  const Eigen::Index p = U.cols();
  const Eigen::Index m = link.m;

  auto forward = [&](const JointVec& x) -> Vec { return U * x.alpha + link.apply_fha(x.v); };
  auto adjoint = [&](const Vec& r) -> JointVec {
    return {U.adjoint() * r, link.apply_fha_adjoint(r)};
  };
  auto smooth = [&](const JointVec& x) -> double { return 0.5 * (forward(x) - z).squaredNorm(); };
  auto penalty = [&](const JointVec& x) -> double {
    return lambda * x.alpha.cwiseAbs().sum() + gamma * x.v.cwiseAbs().sum();
  };

  // step size from a power-iteration estimate of ||[Upsilon Phi]||^2
  double lip = 1.0;
  {
    JointVec y{Vec::Ones(p), Vec::Ones(m)};
    double nrm = std::sqrt(joint_sqnorm(y));
    y.alpha /= nrm;
    y.v /= nrm;
    for (int it = 0; it < 40; ++it) {
      JointVec ny = adjoint(forward(y));
      nrm = std::sqrt(joint_sqnorm(ny));
      if (nrm <= 0.0) break;
      y.alpha = ny.alpha / nrm;
      y.v = ny.v / nrm;
      lip = nrm;
    }
    lip = std::max(lip * 1.05, 1e-12);
  }

  L1Solution sol;
  JointVec x{Vec::Zero(p), Vec::Zero(m)};
  JointVec yv = x;
  double t = 1.0;
  double fx = smooth(x) + penalty(x);
  sol.objective_trace.push_back(fx);

  int stall = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Vec ry = forward(yv) - z;
    const double fy = 0.5 * ry.squaredNorm();
    const JointVec gy = adjoint(ry);

    JointVec zc;
    double L = lip;
    for (int bt = 0;; ++bt) {
      zc.alpha = (lambda > 0.0) ? soft_threshold(yv.alpha - gy.alpha / L, lambda / L)
                                : Vec(yv.alpha - gy.alpha / L);
      zc.v = soft_threshold(yv.v - gy.v / L, gamma / L);
      const JointVec d{zc.alpha - yv.alpha, zc.v - yv.v};
      const double model =
          fy + (gy.alpha.dot(d.alpha) + gy.v.dot(d.v)).real() + 0.5 * L * joint_sqnorm(d);
      if (smooth(zc) <= model + 1e-12 * std::max(1.0, std::abs(model))) break;
      L *= 2.0;
      if (bt >= 60 || L > 1e14 * lip) {
        sol.diverged = true;
        break;
      }
    }
    lip = L;
    if (sol.diverged) break;

    // monotone acceleration: fall back to the previous iterate if needed
    const double fz = smooth(zc) + penalty(zc);
    const JointVec xn = (fz <= fx) ? zc : x;
    const double fxn = std::min(fz, fx);

    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yv.alpha = xn.alpha + (t / tn) * (zc.alpha - xn.alpha) + ((t - 1.0) / tn) * (xn.alpha - x.alpha);
    yv.v = xn.v + (t / tn) * (zc.v - xn.v) + ((t - 1.0) / tn) * (xn.v - x.v);

    x = xn;
    t = tn;
    sol.iterations = it;
    sol.objective_trace.push_back(fxn);

    const double rel = std::abs(fx - fxn) / std::max(1.0, std::abs(fxn));
    fx = fxn;
    if (rel < opt.tol) {
      if (++stall >= 5) {
        sol.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
  }

  sol.alpha = x.alpha;
  sol.v = x.v;
  return sol;
}

double l1_kkt_violation(const Vec& z, const GridDictionary& grid, const CommLink& link,
                        double lambda, double gamma, const L1Solution& sol) {
  const Vec r = grid.upsilon * sol.alpha + link.apply_fha(sol.v) - z;
  const Vec ga = grid.upsilon.adjoint() * r;
  const Vec gv = link.apply_fha_adjoint(r);
  double worst = 0.0;
  auto check = [&](const Vec& x, const Vec& g, double w) {
    if (w <= 0.0) {
      for (Eigen::Index i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(g(i)));
      return;
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i)) > 0.0) {
        worst = std::max(worst, std::abs(g(i) + w * x(i) / std::abs(x(i))) / w);
      } else {
        worst = std::max(worst, std::max(0.0, std::abs(g(i)) - w) / w);
      }
    }
  };
  check(sol.alpha, ga, lambda);
  check(sol.v, gv, gamma);
  return worst;
}

std::vector<std::pair<int, Vec>> extract_supports(const Vec& alpha, int k, double threshold_rel) {
  std::vector<std::pair<int, Vec>> out;
  const int blocks = static_cast<int>(alpha.size()) / k;
  double max_norm = 0.0;
  for (int j = 0; j < blocks; ++j) {
    max_norm = std::max(max_norm, alpha.segment(static_cast<Eigen::Index>(j) * k, k).norm());
  }
  if (max_norm <= 0.0) return out;
  for (int j = 0; j < blocks; ++j) {
    Vec block = alpha.segment(static_cast<Eigen::Index>(j) * k, k);
    if (block.norm() >= threshold_rel * max_norm) out.emplace_back(j, std::move(block));
  }
  return out;
}

Vec reconstruct_waveform(const Vec& coeff_block, const RadarDictionary& dict) {
  const IndexSplit split = IndexSplit::for_size(dict.n());
  return idft(split, dict.freq_columns * coeff_block);
}

namespace {

SolveResult run_grid_loop(const FreqObservation& obs, const RadarDictionary& dict,
                          const CommLink& link, const GridDictionary& grid, L1Weights w,
                          const Csl1Options& opt, const Vec* truth, bool keep_all_blocks,
                          const char* name) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  res.solver_name = name;

  Vec bhat = demodulate_initial(obs, link).symbols;
  if (truth) res.ser_trace.push_back(ser(*truth, bhat));

  L1Solution last;
  for (int l = 1; l <= opt.max_outer; ++l) {
    const Vec z = residual(obs, bhat, link);
    last = solve_l1(z, grid, link, w.lambda, w.gamma, opt.inner);
    if (last.diverged) {
      res.solver_failed = true;
      break;
    }
    const Vec bnext = redemodulate(bhat, last.v, link.constellation);
    res.outer_iterations = l;
    res.objective_trace.push_back(last.objective_trace.back());
    if (truth) res.ser_trace.push_back(ser(*truth, bnext));
    const bool fixed = (bnext - bhat).cwiseAbs().maxCoeff() == 0.0;
    bhat = bnext;
    if (fixed) {
      res.reached_fixed_point = true;
      break;
    }
  }

  res.symbols = bhat;
  res.v_hat = last.v.size() ? last.v : Vec::Zero(link.m);
  res.alpha = last.alpha.size() ? last.alpha : Vec::Zero(grid.upsilon.cols());

  const int K = dict.k;
  std::vector<std::pair<int, Vec>> supports;
  if (keep_all_blocks) {
    for (int j = 0; j < grid.grid_size(); ++j) {
      supports.emplace_back(j, res.alpha.segment(static_cast<Eigen::Index>(j) * K, K));
    }
  } else {
    supports = extract_supports(res.alpha, K, opt.support_threshold);
  }
  res.x_hat = Mat::Zero(K, obs.split.n);
  for (auto& [j, coeff] : supports) {
    RadarEstimate est;
    est.delay_norm = grid.delays[j];
    est.delay_s = est.delay_norm * opt.block_duration;
    est.coeff = coeff;
    est.waveform = reconstruct_waveform(coeff, dict);
    res.x_hat += coeff * steering(obs.split, est.delay_norm).adjoint();
    res.radars.push_back(std::move(est));
  }
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

SolveResult run_csl1(const FreqObservation& obs, const RadarDictionary& dict, const CommLink& link,
                     double sigma_w, const Csl1Options& opt, const Vec* truth) {
  GridDictionary grid = build_grid(obs.split, dict, opt.oversampling, opt.tau_lo, opt.tau_hi);
  const L1Weights w = opt.weights ? *opt.weights : csl1_default_weights(sigma_w, grid);
  return run_grid_loop(obs, dict, link, grid, w, opt, truth, false, "csl1");
}

SolveResult run_known_delays(const FreqObservation& obs, const RadarDictionary& dict,
                             const CommLink& link, double sigma_w,
                             const std::vector<double>& delays_norm, const Csl1Options& opt,
                             const Vec* truth) {
  L1Weights w = opt.weights ? *opt.weights : known_delay_default_weights(sigma_w, obs.split.n);
  w.lambda = 0.0;
  std::vector<double> delays = delays_norm;
  for (auto& d : delays) d -= std::floor(d);
  GridDictionary grid = assemble_grid(obs.split, dict, std::move(delays), std::size_t{1} << 27);
  return run_grid_loop(obs, dict, link, grid, w, opt, truth, true, "csl1_known");
}

}  // namespace coexist
