#include "coexist/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coexist {

double srrc_autocorrelation(double t, const PulseShape& pulse) {
  const double s = t / pulse.chip_period;  // in chips
  const double b = pulse.excess_bandwidth;
  const double pis = kPi * s;
  const double sinc = (std::abs(s) < 1e-12) ? 1.0 - pis * pis / 6.0 : std::sin(pis) / pis;
  if (b == 0.0) return sinc;
  const double den = 1.0 - (2.0 * b * s) * (2.0 * b * s);
  if (std::abs(den) < 1e-9) {
    // rolloff zero at |s| = 1/(2 beta): limit is sinc(s) * pi/4
    return sinc * kPi / 4.0;
  }
  return sinc * std::cos(kPi * b * s) / den;
}

RadarDictionary build_dictionary(std::uint64_t seed, int n, int n_prime, int k) {
  if (!(k >= 1 && k <= n_prime && n_prime <= n)) {
    throw std::invalid_argument("build_dictionary: need 1 <= K <= N' <= N");
  }
  RadarDictionary dict;
  dict.pulse_length = n_prime;
  dict.k = k;
  dict.time_columns = Mat::Zero(n, k);
  auto rng = make_rng(seed, 100);
  for (int c = 0; c < k; ++c) {
    for (int m = 0; m < n_prime; ++m) {
      dict.time_columns(m, c) = draw_cgauss(rng, 1.0 / n_prime);
    }
  }
  const IndexSplit split = IndexSplit::for_size(n);
  dict.freq_columns = Mat(n, k);
  for (int c = 0; c < k; ++c) {
    dict.freq_columns.col(c) = dft(split, dict.time_columns.col(c));
  }
  return dict;
}

Constellation::Constellation(Kind kind, double energy) : kind_(kind), energy_(energy) {
  const double e = std::sqrt(energy);
  if (kind == Kind::bpsk) {
    points_ = {cxd(e, 0), cxd(-e, 0)};
  } else {
    // Gray-labeled QPSK: 00, 01, 11, 10
    const double a = e / std::sqrt(2.0);
    points_ = {cxd(a, a), cxd(-a, a), cxd(-a, -a), cxd(a, -a)};
  }
}

int Constellation::slice_index(cxd y) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = std::abs(y - points_[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

cxd Constellation::slice(cxd y) const { return points_[slice_index(y)]; }

Vec Constellation::slice(const Vec& y) const {
  Vec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = slice(y(i));
  return out;
}

Vec CommLink::apply_fha(const Vec& b) const { return gamma.cwiseProduct(b); }

Vec CommLink::apply_fha_adjoint(const Vec& r) const { return gamma.conjugate().cwiseProduct(r); }

Vec CommLink::mix_time(const Vec& b) const { return idft(split, apply_fha(b)); }

Vec build_ricean_channel(std::uint64_t seed, int n, double ricean_ratio) {
  if (ricean_ratio < 0.0) throw std::invalid_argument("ricean ratio must be >= 0");
  double rho, sigma_h;
  if (std::isinf(ricean_ratio)) {
    rho = 1.0;
    sigma_h = 0.0;
  } else {
    sigma_h = 1.0 / std::sqrt(1.0 + ricean_ratio * ricean_ratio);
    rho = ricean_ratio * sigma_h;
  }
  auto rng = make_rng(seed, 200);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  Vec gamma(n);
  for (int i = 0; i < n; ++i) {
    const cxd specular = std::polar(rho, uni(rng));
    const cxd diffuse = (sigma_h > 0.0) ? draw_cgauss(rng, sigma_h * sigma_h) : cxd(0, 0);
    gamma(i) = specular + diffuse;
  }
  return gamma;
}

CommLink make_ofdm_link(const IndexSplit& split, Vec gamma, Constellation constellation,
                        double ricean_ratio) {
  CommLink link;
  link.split = split;
  link.m = split.n;
  link.gamma = std::move(gamma);
  link.constellation = constellation;
  link.ricean_ratio = ricean_ratio;
  if (std::isinf(ricean_ratio)) {
    link.rho = 1.0;
    link.sigma_h = 0.0;
  } else {
    link.sigma_h = 1.0 / std::sqrt(1.0 + ricean_ratio * ricean_ratio);
    link.rho = ricean_ratio * link.sigma_h;
  }
  return link;
}

CommLink make_identity_link(const IndexSplit& split, Constellation constellation) {
  CommLink link = make_ofdm_link(split, Vec::Ones(split.n), constellation,
                                 std::numeric_limits<double>::infinity());
  return link;
}

Vec radar_freq_waveform(const SceneConfig& scene, int j) {
  return scene.dictionary.freq_columns * scene.radars.at(j).subspace_coeff;
}

Vec radar_time_waveform(const SceneConfig& scene, int j) {
  return idft(scene.split, radar_freq_waveform(scene, j));
}

Vec draw_symbols(const SceneConfig& scene) {
  auto rng = make_rng(scene.seed, 0);
  const auto& pts = scene.link.constellation.points();
  std::uniform_int_distribution<int> pick(0, static_cast<int>(pts.size()) - 1);
  Vec b(scene.link.m);
  for (int i = 0; i < scene.link.m; ++i) b(i) = pts[pick(rng)];
  return b;
}

namespace {

Vec draw_noise(const SceneConfig& scene) {
  auto rng = make_rng(scene.seed, 1);
  Vec w(scene.split.n);
  for (int i = 0; i < scene.split.n; ++i) {
    w(i) = scene.noise_var > 0.0 ? draw_cgauss(rng, scene.noise_var) : cxd(0, 0);
  }
  return w;
}

Vec interference_freq(const SceneConfig& scene) {
  const int n = scene.split.n;
  Vec acc = Vec::Zero(n);
  for (std::size_t j = 0; j < scene.radars.size(); ++j) {
    const Vec gbar = radar_freq_waveform(scene, static_cast<int>(j));
    const auto& radar = scene.radars[j];
    for (int r = 0; r < n; ++r) {
      const double k = scene.split.k_at(r);
      acc(r) += radar.coupling * gbar(r) *
                std::polar(1.0, -2.0 * kPi * k * radar.normalized_delay);
    }
  }
  return acc;
}

}  // namespace

SceneRealization synthesize_approx_full(const SceneConfig& scene) {
  SceneRealization out;
  out.symbols = draw_symbols(scene);
  out.xbar = scene.link.apply_fha(out.symbols);
  out.interference_bar = interference_freq(scene);
  out.noise_bar = draw_noise(scene);
  out.obs.values = out.xbar + out.interference_bar + out.noise_bar;
  out.obs.split = scene.split;
  out.obs.noise_var = scene.noise_var;
  return out;
}

FreqObservation synthesize_approx(const SceneConfig& scene) {
  return synthesize_approx_full(scene).obs;
}

SceneRealization synthesize_exact_full(const SceneConfig& scene, const QuadratureOptions& opt) {
  const int n = scene.split.n;
  const double T = scene.pulse.chip_period;

  SceneRealization out;
  out.symbols = draw_symbols(scene);
  out.xbar = scene.link.apply_fha(out.symbols);
  out.interference_bar = interference_freq(scene);
  out.noise_bar = draw_noise(scene);

  const Vec x = idft(scene.split, out.xbar);  // time-domain comm samples
  std::vector<Vec> g(scene.radars.size());
  for (std::size_t j = 0; j < scene.radars.size(); ++j) {
    g[j] = radar_time_waveform(scene, static_cast<int>(j));
  }

  double tau_min = 0.0, tau_max = 0.0;
  if (!scene.radars.empty()) {
    tau_min = tau_max = scene.radars[0].delay;
    for (const auto& radar : scene.radars) {
      tau_min = std::min(tau_min, radar.delay);
      tau_max = std::max(tau_max, radar.delay);
    }
  }

  // everything below in chips
  const double lo = (tau_min - scene.pulse.trunc_halfwidth) / T;
  const double hi = (tau_max + scene.pulse.trunc_halfwidth) / T + (n - 1);
  std::vector<double> tau_chips(scene.radars.size());
  for (std::size_t j = 0; j < scene.radars.size(); ++j) tau_chips[j] = scene.radars[j].delay / T;

  PulseShape unit_pulse = scene.pulse;
  unit_pulse.chip_period = 1.0;

  auto r_det = [&](double s) {
    cxd acc(0, 0);
    for (int m = 0; m < n; ++m) acc += x(m) * srrc_autocorrelation(s - m, unit_pulse);
    for (std::size_t j = 0; j < scene.radars.size(); ++j) {
      const cxd c = scene.radars[j].coupling;
      for (int m = 0; m < n; ++m) {
        acc += c * g[j](m) * srrc_autocorrelation(s - m - tau_chips[j], unit_pulse);
      }
    }
    return acc;
  };

  // composite Simpson, step halved until the spectrum stabilizes
  const double h0 = 1.0 / 12.0;  // T / (8 (1 + max|k|/N)) <= T/12
  long nint = std::max<long>(8, static_cast<long>(std::ceil((hi - lo) / h0)));
  if (nint % 2 != 0) ++nint;

  std::vector<cxd> nodes;  // r_det at the current grid
  Vec rb_prev;
  bool converged = false;
  for (int level = 0; level <= opt.max_refinements; ++level) {
    const double h = (hi - lo) / nint;
    std::vector<cxd> vals(nint + 1);
    if (level == 0) {
      for (long i = 0; i <= nint; ++i) vals[i] = r_det(lo + h * i);
    } else {
      for (long i = 0; i <= nint; i += 2) vals[i] = nodes[i / 2];
      for (long i = 1; i <= nint; i += 2) vals[i] = r_det(lo + h * i);
    }
    nodes = vals;

    Vec rb = Vec::Zero(n);
    for (long i = 0; i <= nint; ++i) {
      double w = (i == 0 || i == nint) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double s = lo + h * i;
      const cxd weighted = vals[i] * (w * h / 3.0);
      // e^{-i 2 pi k s / N} walked across k via one phasor per node
      const cxd step = std::polar(1.0, -2.0 * kPi * s / n);
      cxd phase = std::polar(1.0, 2.0 * kPi * scene.split.n1 * s / n);  // k = -n1
      for (int r = 0; r < n; ++r) {
        rb(r) += weighted * phase;
        phase *= step;
      }
    }

    if (rb_prev.size() == n) {
      const double diff = (rb - rb_prev).cwiseAbs().maxCoeff();
      const double scale = std::max(1.0, rb.cwiseAbs().maxCoeff());
      if (diff <= opt.rel_tol * scale) {
        rb_prev = rb;
        converged = true;
        break;
      }
    }
    rb_prev = rb;
    nint *= 2;
  }
  if (!converged) {
    throw std::runtime_error("synthesize_exact: quadrature did not converge within refinement cap");
  }

  out.obs.values = rb_prev + out.noise_bar;
  out.obs.split = scene.split;
  out.obs.noise_var = scene.noise_var;
  return out;
}

FreqObservation synthesize_exact(const SceneConfig& scene, const QuadratureOptions& opt) {
  return synthesize_exact_full(scene, opt).obs;
}

double approximation_error_bound(const SceneConfig& scene, double m0) {
  if (m0 <= 1.0) throw std::invalid_argument("approximation_error_bound: m0 must be > 1");
  const double T = scene.pulse.chip_period;
  double tau_min = 0.0;
  if (!scene.radars.empty()) {
    tau_min = scene.radars[0].delay;
    for (const auto& radar : scene.radars) tau_min = std::min(tau_min, radar.delay);
  }
  const double tbar = (scene.pulse.trunc_halfwidth - tau_min) / T;
  if (tbar <= 0.0) throw std::invalid_argument("approximation_error_bound: T' - tau_min must be > 0");

  const Vec x = scene.link.mix_time(draw_symbols(scene));
  double total = 2.0 * x.cwiseAbs().sum();
  for (std::size_t j = 0; j < scene.radars.size(); ++j) {
    const Vec g = radar_time_waveform(scene, static_cast<int>(j));
    total += 2.0 * std::abs(scene.radars[j].coupling) * g.cwiseAbs().sum();
  }
  return total / (m0 * std::pow(tbar, m0));
}

SceneConfig scale_to_snr_sir(SceneConfig scene, std::optional<double> snr_db,
                             std::optional<double> sir_db) {
  scene.snr_db = snr_db;
  scene.sir_db = sir_db;
  const double eps_b = scene.link.constellation.energy();
  const double chan = scene.link.channel_power();
  if (snr_db) {
    scene.noise_var = chan * eps_b / std::pow(10.0, *snr_db / 10.0);
  } else {
    scene.noise_var = 0.0;
  }
  if (sir_db) {
    if (scene.radars.empty()) {
      throw std::invalid_argument("scale_to_snr_sir: SIR requires at least one radar");
    }
    Vec agg = Vec::Zero(scene.split.n);
    for (std::size_t j = 0; j < scene.radars.size(); ++j) {
      agg += scene.radars[j].coupling * radar_time_waveform(scene, static_cast<int>(j));
    }
    const double energy = agg.squaredNorm();
    if (energy <= 0.0) {
      throw std::invalid_argument("scale_to_snr_sir: zero aggregate radar energy");
    }
    const double target = scene.split.n * eps_b * chan / std::pow(10.0, *sir_db / 10.0);
    const double scale = std::sqrt(target / energy);
    for (auto& radar : scene.radars) radar.coupling *= scale;
  }
  return scene;
}

}  // namespace coexist
