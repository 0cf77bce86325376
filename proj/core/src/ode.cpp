#include "qpart/ode.hpp"

#include <algorithm>
#include <cmath>

#include "qpart/errors.hpp"

namespace qpart {

namespace {

// Fehlberg tableau.
constexpr double kA21 = 1.0 / 4.0;
constexpr double kA31 = 3.0 / 32.0, kA32 = 9.0 / 32.0;
constexpr double kA41 = 1932.0 / 2197.0, kA42 = -7200.0 / 2197.0,
                 kA43 = 7296.0 / 2197.0;
constexpr double kA51 = 439.0 / 216.0, kA52 = -8.0, kA53 = 3680.0 / 513.0,
                 kA54 = -845.0 / 4104.0;
constexpr double kA61 = -8.0 / 27.0, kA62 = 2.0, kA63 = -3544.0 / 2565.0,
                 kA64 = 1859.0 / 4104.0, kA65 = -11.0 / 40.0;
constexpr double kC2 = 1.0 / 4.0, kC3 = 3.0 / 8.0, kC4 = 12.0 / 13.0,
                 kC5 = 1.0, kC6 = 1.0 / 2.0;
constexpr double kB41 = 25.0 / 216.0, kB43 = 1408.0 / 2565.0,
                 kB44 = 2197.0 / 4104.0, kB45 = -1.0 / 5.0;
constexpr double kB51 = 16.0 / 135.0, kB53 = 6656.0 / 12825.0,
                 kB54 = 28561.0 / 56430.0, kB55 = -9.0 / 50.0,
                 kB56 = 2.0 / 55.0;

std::vector<double> hermite(double t, double t0,
                            const std::vector<double>& y0,
                            const std::vector<double>& f0, double t1,
                            const std::vector<double>& y1,
                            const std::vector<double>& f1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  std::vector<double> y(y0.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return y;
}

}  // namespace

std::vector<double> OdeResult::interpolate(double t) const {
  if (ts.empty()) throw NumericalError("OdeResult::interpolate: empty trajectory");
  if (t <= ts.front()) return ys.front();
  if (t >= ts.back()) return ys.back();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  return hermite(t, ts[i], ys[i], fs[i], ts[i + 1], ys[i + 1], fs[i + 1]);
}

OdeResult integrate_rkf45(const OdeRhs& rhs, double t0, std::vector<double> y0,
                          const OdeOptions& opt, const OdeEvent& event) {
  const std::size_t dim = y0.size();
  OdeResult out;
  std::vector<double> f0(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim);
  std::vector<double> ytmp(dim), y4(dim), y5(dim), f_new(dim);

  double t = t0;
  std::vector<double> y = std::move(y0);
  rhs(t, y, f0);
  out.ts.push_back(t);
  out.ys.push_back(y);
  out.fs.push_back(f0);

  double h = opt.initial_step > 0 ? opt.initial_step : opt.max_step;
  h = std::min(h, opt.max_step);
  double e_prev = event ? event(t, y) : 0.0;

  int rejected_in_row = 0;
  while (t < opt.t_max) {
    h = std::min(h, opt.t_max - t);
    if (h <= 0) break;

    for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * kA21 * f0[i];
    rhs(t + kC2 * h, ytmp, k2);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (kA31 * f0[i] + kA32 * k2[i]);
    rhs(t + kC3 * h, ytmp, k3);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (kA41 * f0[i] + kA42 * k2[i] + kA43 * k3[i]);
    rhs(t + kC4 * h, ytmp, k4);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (kA51 * f0[i] + kA52 * k2[i] + kA53 * k3[i] +
                            kA54 * k4[i]);
    rhs(t + kC5 * h, ytmp, k5);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (kA61 * f0[i] + kA62 * k2[i] + kA63 * k3[i] +
                            kA64 * k4[i] + kA65 * k5[i]);
    rhs(t + kC6 * h, ytmp, k6);

    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      y4[i] = y[i] + h * (kB41 * f0[i] + kB43 * k3[i] + kB44 * k4[i] +
                          kB45 * k5[i]);
      y5[i] = y[i] + h * (kB51 * f0[i] + kB53 * k3[i] + kB54 * k4[i] +
                          kB55 * k5[i] + kB56 * k6[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y4[i]));
      err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
    }

    if (err <= 1.0 || h <= 1e-14 * std::max(1.0, std::abs(t))) {
      const double t_new = t + h;
      rhs(t_new, y4, f_new);
      out.ts.push_back(t_new);
      out.ys.push_back(y4);
      out.fs.push_back(f_new);

      if (event) {
        const double e_new = event(t_new, y4);
        const bool rising = e_prev < 0.0 && e_new >= 0.0;
        const bool falling = e_prev > 0.0 && e_new <= 0.0;
        const bool crossed = (opt.event_direction > 0 && rising) ||
                             (opt.event_direction < 0 && falling) ||
                             (opt.event_direction == 0 && (rising || falling));
        if (crossed && t_new > opt.event_min_t) {
          double lo = t, hi = t_new, e_lo = e_prev;
          while (hi - lo > opt.event_tol * std::max(1.0, std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            auto ymid = hermite(mid, t, y, f0, t_new, y4, f_new);
            const double em = event(mid, ymid);
            if ((em < 0.0) == (e_lo < 0.0)) {
              lo = mid;
              e_lo = em;
            } else {
              hi = mid;
            }
          }
          out.event_hit = true;
          out.t_event = 0.5 * (lo + hi);
          out.y_event = hermite(out.t_event, t, y, f0, t_new, y4, f_new);
          return out;
        }
        e_prev = e_new;
      }

      t = t_new;
      y = y4;
      std::swap(f0, f_new);
      rejected_in_row = 0;
      const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = std::min(opt.max_step, h * std::clamp(grow, 0.2, 5.0));
    } else {
      if (++rejected_in_row > 60)
        throw NumericalError("rkf45: step control failed to converge");
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.7);
    }
  }
  return out;
}

}  // namespace qpart
