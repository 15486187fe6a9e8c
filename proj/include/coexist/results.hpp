#pragma once

#include <string>
#include <vector>

#include "coexist/core.hpp"

namespace coexist {

/// One extracted radar. Only the products c*h and c*g are reported; the
/// individual factors are not identifiable.
struct RadarEstimate {
  double delay_norm = 0.0;  // tau' in [0,1)
  double delay_s = 0.0;     // tau' * N * T
  Vec coeff;                // c h, C^K
  Vec waveform;             // c g = (1/N) F^H Dbar (c h), C^N
};

struct SolverIterTrace {
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double omega = 0.0;
};

/// Output of one joint interference-estimation / demodulation run.
struct SolveResult {
  Vec symbols;                         // final bhat
  Vec v_hat;                           // final error estimate
  Mat x_hat;                           // K x N interference matrix estimate
  Vec alpha;                           // grid coefficients (CS-L1 paths)
  std::vector<RadarEstimate> radars;
  std::vector<double> ser_trace;       // per outer iteration incl. iteration 0
  std::vector<double> objective_trace; // final inner objective per outer iteration
  int outer_iterations = 0;
  bool reached_fixed_point = false;
  bool solver_failed = false;
  std::string solver_name;
  double wall_time_s = 0.0;
};

}  // namespace coexist
