#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coexist/metrics.hpp"
#include "coexist/signal_model.hpp"
#include "coexist/solver_an.hpp"
#include "coexist/solver_l1.hpp"

namespace coexist {

enum class Algo { iter0, csl1, csl1_known, csan_cg, csan_admm };

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

/// Generative scenario description. The paper-scale default is an OFDM block
/// of 100 us split into N subcarriers (chip period 100us/N), K = 5 dictionary
/// waveforms of 32 chips, delays uniform over [10, 70] us.
struct ScenePreset {
  int n = 129;
  double block_duration = 100e-6;  // N * T seconds
  int n_prime = 32;
  int dict_k = 5;
  int radar_count = 2;
  std::optional<double> snr_db = 15.0;
  std::optional<double> sir_db = 0.0;
  double ricean = 3.0;
  Constellation::Kind modulation = Constellation::Kind::qpsk;
  double energy = 1.0;
  double delay_min_s = 10e-6;
  double delay_max_s = 70e-6;
  double trunc_mult = 2.0;   // T' = trunc_mult * block duration
  double beta = -1.0;        // excess bandwidth; < 0 selects 1/N

  double chip_period() const { return block_duration / n; }
};

/// One concrete trial drawn from the preset: dictionary, radar parameters and
/// channel all derive from the seed; couplings/noise then scaled to SNR/SIR.
SceneConfig draw_scene(const ScenePreset& preset, std::uint64_t seed);

struct ExperimentConfig {
  std::string scenario = "fig3";
  std::string sweep = "iterations";  // snr | sir | J | K | ricean | iterations
  std::vector<double> values = {0};
  int trials = 200;
  std::uint64_t base_seed = 1;
  std::vector<Algo> algos = {Algo::iter0, Algo::csl1, Algo::csan_cg};
  ScenePreset preset;
  int threads = 0;  // 0: hardware concurrency
  bool exact_synthesis = false;
  int max_outer = 10;
  int csl1_oversampling = 4;
  bool grid_full_window = false;  // grid spans [0,1) instead of the delay window
  int cg_max_iter = 1000;
  double cg_grad_tol = 0.01;
  int l1_max_iter = 400;
  double l1_tol = 1e-8;
};

struct ResultRow {
  double sweep_value = 0.0;
  std::string algo;
  int iteration = 0;
  double ser_mean = 0.0;
  double ser_ci = 0.0;  // 1.96 * standard error over trials
};

struct AlgoAggregate {
  double sweep_value = 0.0;
  std::string algo;
  std::optional<double> delay_rmse_s;
  std::optional<double> waveform_mse;
  double identified_fraction = 0.0;
  double fixed_point_fraction = 0.0;
  int failures = 0;
  double mean_wall_time_s = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<AlgoAggregate> aggregates;
  int threads_used = 1;
  int trials = 0;

  /// Per-trial SER traces indexed [sweep][algo][trial][iteration].
  std::vector<std::vector<std::vector<std::vector<double>>>> traces;

  std::string to_csv() const;
  nlohmann::json summary_json(const ExperimentConfig& config) const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Desk-scale scenario presets: fig3 (SER vs iteration), fig5a/fig5b (SER vs
/// SNR at SIR -5/+5 dB), fig6 (estimation accuracy vs SNR), fig7j/fig7k
/// (SER vs J / K), fig8 (SER vs Ricean ratio). `full_scale` restores N = 129.
ExperimentConfig preset_config(const std::string& name, bool full_scale = false);

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

}  // namespace coexist
