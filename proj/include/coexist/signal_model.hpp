#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "coexist/core.hpp"

namespace coexist {

/// Square-root raised cosine chip pulse. The receiver works with its
/// autocorrelation, the raised-cosine Nyquist pulse R(t) with R(0) = 1.
struct PulseShape {
  double excess_bandwidth = 0.0;   // beta in [0,1)
  double chip_period = 1.0;        // T, seconds
  double trunc_halfwidth = 2.0;    // T', seconds (integration window margin)
};

/// Raised-cosine autocorrelation R(t) of the SRRC pulse, R(0)=1, even in t.
/// Removable singularities (t=0 and the rolloff zero of the denominator)
/// are evaluated by their limits.
double srrc_autocorrelation(double t, const PulseShape& pulse);

struct RadarDictionary {
  Mat time_columns;   // N x K, rows >= pulse_length are exactly zero
  Mat freq_columns;   // Dbar = F * time_columns; row k is dbar_k^H
  int pulse_length = 0;  // N'
  int k = 0;             // K

  int n() const { return static_cast<int>(time_columns.rows()); }
};

/// Gaussian random-code dictionary: d(m) ~ CN(0, 1/N') for m < N', 0 after.
RadarDictionary build_dictionary(std::uint64_t seed, int n, int n_prime, int k);

struct RadarSource {
  double delay = 0.0;             // tau, seconds
  double normalized_delay = 0.0;  // tau' = tau / (N T), in [0,1)
  cxd coupling{0.0, 0.0};         // c
  Vec subspace_coeff;             // h, unit 2-norm, C^K
};

class Constellation {
 public:
  enum class Kind { bpsk, qpsk };

  Constellation() : Constellation(Kind::qpsk, 1.0) {}
  Constellation(Kind kind, double energy);

  Kind kind() const { return kind_; }
  double energy() const { return energy_; }
  const std::vector<cxd>& points() const { return points_; }

  /// Minimum-distance decision; ties broken toward the lowest point index.
  cxd slice(cxd y) const;
  int slice_index(cxd y) const;

  Vec slice(const Vec& y) const;

 private:
  Kind kind_;
  double energy_;
  std::vector<cxd> points_;
};

/// OFDM link: A = (1/N) F^H, H = (1/N) F^H diag(gamma) F, so F H A = diag(gamma).
struct CommLink {
  IndexSplit split;
  int m = 0;                  // symbols per block, equals N for OFDM
  Vec gamma;                  // diagonal of F H A
  Constellation constellation;
  double ricean_ratio = 0.0;  // rho / sigma_h
  double rho = 0.0;
  double sigma_h = 0.0;

  double channel_power() const { return rho * rho + sigma_h * sigma_h; }

  Vec apply_fha(const Vec& b) const;          // F H A b = gamma .* b
  Vec apply_fha_adjoint(const Vec& r) const;  // (F H A)^H r
  Vec mix_time(const Vec& b) const;           // x = H A b (time domain)
};

/// Ricean per-subcarrier diagonal: gamma_k = rho e^{i theta_k} + CN(0, sigma_h^2),
/// normalized so E|gamma_k|^2 = rho^2 + sigma_h^2 = 1. ratio = rho/sigma_h;
/// ratio = 0 gives Rayleigh moduli, ratio = inf a constant modulus.
Vec build_ricean_channel(std::uint64_t seed, int n, double ricean_ratio);

CommLink make_ofdm_link(const IndexSplit& split, Vec gamma, Constellation constellation,
                        double ricean_ratio);

/// Identity F H A (gamma = 1): the setup of the small worked example.
CommLink make_identity_link(const IndexSplit& split, Constellation constellation);

struct SceneConfig {
  IndexSplit split;
  PulseShape pulse;
  RadarDictionary dictionary;
  std::vector<RadarSource> radars;
  CommLink link;
  double noise_var = 0.0;  // sigma_w^2
  std::optional<double> snr_db;
  std::optional<double> sir_db;
  std::uint64_t seed = 0;

  double block_duration() const { return pulse.chip_period * split.n; }
};

struct FreqObservation {
  Vec values;  // rbar, indexed k = -n1..n2
  IndexSplit split;
  double noise_var = 0.0;
};

/// Everything drawn for one trial, kept so oracles can score against truth.
struct SceneRealization {
  Vec symbols;            // b, drawn from the scene seed
  Vec xbar;               // F H A b
  Vec interference_bar;   // sum_j c_j gbar_j(k) e^{-i 2 pi k tau'_j}
  Vec noise_bar;          // wbar
  FreqObservation obs;
};

/// Time-domain radar waveform g_j = (1/N) F^H Dbar h_j.
Vec radar_time_waveform(const SceneConfig& scene, int j);

/// Frequency-domain radar waveform gbar_j = Dbar h_j.
Vec radar_freq_waveform(const SceneConfig& scene, int j);

/// Symbols drawn deterministically from the scene seed.
Vec draw_symbols(const SceneConfig& scene);

/// Approximate (frequency-domain) observation model:
/// rbar(k) = xbar(k) + sum_j c_j gbar_j(k) e^{-i 2 pi k tau'_j} + wbar(k).
SceneRealization synthesize_approx_full(const SceneConfig& scene);
FreqObservation synthesize_approx(const SceneConfig& scene);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  int max_refinements = 10;
};

/// Exact observation: adaptive composite-Simpson quadrature of the projected
/// received signal over [tau_min - T', tau_max + (N-1)T + T'], normalized by
/// the chip period so both models share one scale. Noise is added in the
/// frequency domain, CN(0, sigma_w^2) i.i.d. across k.
SceneRealization synthesize_exact_full(const SceneConfig& scene, const QuadratureOptions& opt = {});
FreqObservation synthesize_exact(const SceneConfig& scene, const QuadratureOptions& opt = {});

/// Tail bound on |rbar_exact - rbar_approx|:
///   sum_n 2|x(n)| / (m0 Tbar^m0) + sum_j sum_n 2|c_j g_j(n)| / (m0 Tbar^m0),
/// with Tbar = (T' - tau_min) measured in chip periods. Requires Tbar > 0.
double approximation_error_bound(const SceneConfig& scene, double m0);

/// Sets noise_var from SNR = (rho^2+sigma_h^2) eps_b / sigma_w^2 and scales all
/// coupling magnitudes so SIR = N eps_b (rho^2+sigma_h^2) / ||sum_j c_j g_j||^2.
SceneConfig scale_to_snr_sir(SceneConfig scene, std::optional<double> snr_db,
                             std::optional<double> sir_db);

}  // namespace coexist
