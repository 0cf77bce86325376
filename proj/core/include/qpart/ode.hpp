#pragma once

#include <functional>
#include <vector>

namespace qpart {

/// Right-hand side y' = f(t, y); dy has the same size as y.
using OdeRhs =
    std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

/// Scalar event function; integration stops when it crosses zero in the
/// requested direction (+1 rising, -1 falling, 0 any).
using OdeEvent = std::function<double(double t, const std::vector<double>& y)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double max_step = 1e-3;
  double initial_step = 0.0;  // 0 = max_step
  double t_max = 1e9;
  int event_direction = 0;
  double event_min_t = 0.0;   // ignore events before this time
  double event_tol = 1e-13;   // bisection width on the dense output
};

/// Accepted-step trajectory with endpoint derivatives (cubic Hermite
/// dense output between consecutive entries).
struct OdeResult {
  std::vector<double> ts;
  std::vector<std::vector<double>> ys;
  std::vector<std::vector<double>> fs;
  bool event_hit = false;
  double t_event = 0.0;
  std::vector<double> y_event;

  /// Dense-output state at time t (clamped to the covered range).
  std::vector<double> interpolate(double t) const;
};

/// Runge-Kutta-Fehlberg 4(5): propagates the fourth-order solution and
/// controls the step with the embedded fifth-order estimate. A huge
/// tolerance turns it into a fixed-step integrator at max_step.
OdeResult integrate_rkf45(const OdeRhs& rhs, double t0,
                          std::vector<double> y0, const OdeOptions& opt,
                          const OdeEvent& event = nullptr);

}  // namespace qpart
