#include "qpart/partition.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qpart/errors.hpp"
#include "qpart/numerics.hpp"

namespace qpart {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEnergyFloor = 1e-8;  // positive lower bound for interval energies

double solve_cell(const Profile& profile, const OperatorCoefficients& coeffs,
                  double p, double a, double b, int n) {
  const Grid grid = make_grid(profile, a, b, n);
  const DiscreteOperator op = assemble(grid, coeffs);
  const IntervalSolution sol = least_energy_best(op, p);
  if (!sol.converged) return kNaN;
  if (!(sol.energy > kEnergyFloor))
    throw NumericalError("interval energy below positive lower bound");
  return sol.energy;
}

IntervalSolution solve_cell_full(const Profile& profile,
                                 const OperatorCoefficients& coeffs, double p,
                                 double a, double b, int n) {
  const Grid grid = make_grid(profile, a, b, n);
  const DiscreteOperator op = assemble(grid, coeffs);
  IntervalSolution sol = least_energy_best(op, p);
  if (!sol.converged)
    throw NumericalError("interval solver did not converge on (" +
                         std::to_string(a) + ", " + std::to_string(b) + ")");
  return sol;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
               ? c : '_';
  return out;
}

}  // namespace

std::string to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::Dp: return "dp";
    case PartitionMethod::Refine: return "refine";
    case PartitionMethod::Segregation: return "segregation";
  }
  return "?";
}

bool EnergyTable::cell_valid(int i, int j) const {
  return i >= 0 && j > i && j < G && std::isfinite(E[i][j]);
}

EnergyTable energy_table(const Profile& profile, const OperatorCoefficients& coeffs,
                         double p, int G, const TableOptions& opts) {
  if (G < 8) throw ConfigError("energy_table: G must be >= 8");

  EnergyTable tab;
  tab.G = G;
  tab.d = profile.d;
  tab.n_interval = opts.n_interval;
  tab.p = p;
  tab.ts.resize(G);
  for (int i = 0; i < G; ++i) tab.ts[i] = profile.d * i / (G - 1);
  tab.ts.back() = profile.d;
  {
    std::ostringstream key;
    key << profile.name << "|" << coeffs.label << "|p=" << p << "|G=" << G
        << "|n=" << opts.n_interval;
    tab.key = key.str();
  }

  namespace fs = std::filesystem;
  fs::path cache_file;
  if (!opts.cache_dir.empty()) {
    cache_file = fs::path(opts.cache_dir) /
                 ("table_" + sanitize(tab.key) + "_" +
                  std::to_string(std::hash<std::string>{}(tab.key)) + ".json");
    if (fs::exists(cache_file)) {
      std::ifstream in(cache_file);
      nlohmann::json j;
      try {
        in >> j;
        if (j.at("version") == 1 && j.at("key") == tab.key &&
            std::abs(j.at("d").get<double>() - tab.d) < 1e-14) {
          tab.E = j.at("E").get<std::vector<std::vector<double>>>();
          tab.ts = j.at("ts").get<std::vector<double>>();
          return tab;
        }
      } catch (const std::exception&) {
        // fall through and recompute
      }
    }
  }

  tab.E.assign(G, std::vector<double>(G, kNaN));
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < G; ++i)
    for (int j = i + 1; j < G; ++j) cells.emplace_back(i, j);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto [i, j] = cells[k];
      try {
        tab.E[i][j] = solve_cell(profile, coeffs, p, tab.ts[i], tab.ts[j],
                                 opts.n_interval);
      } catch (const std::exception&) {
        tab.E[i][j] = kNaN;  // invalid cell
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    work(0, cells.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (cells.size() + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
      const std::size_t b = std::min(cells.size(), w * chunk);
      const std::size_t e = std::min(cells.size(), (w + 1) * chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  if (!cache_file.empty()) {
    fs::create_directories(cache_file.parent_path());
    nlohmann::json j;
    j["version"] = 1;
    j["key"] = tab.key;
    j["d"] = tab.d;
    j["G"] = G;
    j["n_interval"] = opts.n_interval;
    j["p"] = p;
    j["ts"] = tab.ts;
    j["E"] = tab.E;
    std::ofstream out(cache_file);
    out << j.dump();
  }
  return tab;
}

Partition dp_partition(const EnergyTable& tab, int ell) {
  const int G = tab.G;
  if (ell < 1 || ell > G - 1)
    throw ConfigError("dp_partition: infeasible ell for this table");

  const double inf = std::numeric_limits<double>::infinity();
  // D[e][j] = best energy splitting [t_0, t_j] into e pieces.
  std::vector<std::vector<double>> D(ell + 1, std::vector<double>(G, inf));
  std::vector<std::vector<int>> parent(ell + 1, std::vector<int>(G, -1));
  for (int j = 1; j < G; ++j)
    if (tab.cell_valid(0, j)) D[1][j] = tab.E[0][j];
  for (int e = 2; e <= ell; ++e) {
    for (int j = e; j < G; ++j) {
      for (int i = e - 1; i < j; ++i) {
        if (!std::isfinite(D[e - 1][i]) || !tab.cell_valid(i, j)) continue;
        const double cand = D[e - 1][i] + tab.E[i][j];
        if (cand < D[e][j]) {
          D[e][j] = cand;
          parent[e][j] = i;
        }
      }
    }
  }
  if (!std::isfinite(D[ell][G - 1]))
    throw NumericalError("dp_partition: no feasible partition (invalid cells?)");

  Partition part;
  part.ell = ell;
  part.method = PartitionMethod::Dp;
  part.total_energy = D[ell][G - 1];

  std::vector<int> cuts;  // interior candidate indices, right to left
  int j = G - 1;
  for (int e = ell; e >= 2; --e) {
    const int i = parent[e][j];
    cuts.push_back(i);
    j = i;
  }
  std::reverse(cuts.begin(), cuts.end());
  for (int c : cuts) part.breakpoints.push_back(tab.ts[c]);
  {
    int prev = 0;
    for (int c : cuts) {
      part.interval_energies.push_back(tab.E[prev][c]);
      prev = c;
    }
    part.interval_energies.push_back(tab.E[prev][G - 1]);
  }

  // Report optimal-path ties within 1e-12 (absolute on the totals).
  const double tol = 1e-12 * std::max(1.0, std::abs(part.total_energy));
  std::vector<std::vector<int>> ties;
  std::vector<int> path;
  std::function<void(int, int, double)> dfs = [&](int e, int jj, double slack) {
    if (ties.size() >= 64) return;
    if (e == 1) {
      if (tab.cell_valid(0, jj) && tab.E[0][jj] <= D[1][jj] + slack) {
        std::vector<int> tuple(path.rbegin(), path.rend());
        ties.push_back(tuple);
      }
      return;
    }
    for (int i = e - 1; i < jj; ++i) {
      if (!std::isfinite(D[e - 1][i]) || !tab.cell_valid(i, jj)) continue;
      const double cand = D[e - 1][i] + tab.E[i][jj];
      if (cand <= D[e][jj] + slack) {
        path.push_back(i);
        dfs(e - 1, i, slack - (cand - D[e][jj]) > 0 ? slack - (cand - D[e][jj]) : 0.0);
        path.pop_back();
      }
    }
  };
  dfs(ell, G - 1, tol);
  if (ties.size() > 1) part.tied_breakpoint_indices = std::move(ties);
  return part;
}

Partition enumerate_partition(const EnergyTable& tab, int ell) {
  const int G = tab.G;
  if (ell < 1 || ell > G - 1)
    throw ConfigError("enumerate_partition: infeasible ell for this table");

  Partition best;
  best.ell = ell;
  best.method = PartitionMethod::Dp;
  best.total_energy = std::numeric_limits<double>::infinity();
  std::vector<int> cuts(ell - 1);
  std::vector<int> best_cuts;

  std::function<void(int, int, double)> rec = [&](int pos, int start, double acc) {
    if (pos == ell - 1) {
      const int prev = pos == 0 ? 0 : cuts[pos - 1];
      if (!tab.cell_valid(prev, G - 1)) return;
      const double total = acc + tab.E[prev][G - 1];
      if (total < best.total_energy) {
        best.total_energy = total;
        best_cuts = cuts;
      }
      return;
    }
    for (int c = start; c < G - 1 - (ell - 2 - pos); ++c) {
      const int prev = pos == 0 ? 0 : cuts[pos - 1];
      if (!tab.cell_valid(prev, c)) continue;
      cuts[pos] = c;
      rec(pos + 1, c + 1, acc + tab.E[prev][c]);
    }
  };
  rec(0, 1, 0.0);
  if (!std::isfinite(best.total_energy))
    throw NumericalError("enumerate_partition: no feasible partition");

  int prev = 0;
  for (int c : best_cuts) {
    best.breakpoints.push_back(tab.ts[c]);
    best.interval_energies.push_back(tab.E[prev][c]);
    prev = c;
  }
  best.interval_energies.push_back(tab.E[prev][G - 1]);
  return best;
}

void attach_solutions(const Profile& profile, const OperatorCoefficients& coeffs,
                      double p, Partition& part, int n_interval) {
  std::vector<double> ends = {0.0};
  for (double b : part.breakpoints) ends.push_back(b);
  ends.push_back(profile.d);
  part.solutions.clear();
  part.interval_energies.clear();
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    part.solutions.push_back(
        solve_cell_full(profile, coeffs, p, ends[k], ends[k + 1], n_interval));
    part.interval_energies.push_back(part.solutions.back().energy);
  }
  part.total_energy = 0.0;
  for (double e : part.interval_energies) part.total_energy += e;
}

Partition refine(const Profile& profile, const OperatorCoefficients& coeffs,
                 double p, const Partition& init, const RefineOptions& opts) {
  if (init.ell < 2) {
    Partition out = init;
    out.method = PartitionMethod::Refine;
    return out;
  }
  const int ell = init.ell;
  std::vector<double> bps = init.breakpoints;

  try {
    auto seg_energy = [&](double a, double b) {
      return solve_cell_full(profile, coeffs, p, a, b, opts.n_interval).energy;
    };
    std::vector<double> energies(ell);
    auto ends = [&](int k) {
      if (k == 0) return 0.0;
      if (k == ell) return profile.d;
      return bps[k - 1];
    };
    for (int k = 0; k < ell; ++k) energies[k] = seg_energy(ends(k), ends(k + 1));

    double total = 0.0;
    for (double e : energies) total += e;

    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      const double total_before = total;
      for (int i = 0; i < ell - 1; ++i) {
        const double lo = ends(i), hi = ends(i + 2);
        const double pad = 0.02 * (hi - lo);
        auto phi = [&](double x) {
          return seg_energy(lo, x) + seg_energy(x, hi);
        };
        const double x = golden_minimize(phi, lo + pad, hi - pad,
                                         opts.tol_x * profile.d);
        const double e_left = seg_energy(lo, x);
        const double e_right = seg_energy(x, hi);
        if (e_left + e_right < energies[i] + energies[i + 1]) {
          bps[i] = x;
          energies[i] = e_left;
          energies[i + 1] = e_right;
        }
      }
      total = 0.0;
      for (double e : energies) total += e;
      if (total_before - total < opts.tol_energy) break;
    }

    Partition out;
    out.ell = ell;
    out.method = PartitionMethod::Refine;
    out.breakpoints = bps;
    out.interval_energies = energies;
    out.total_energy = total;
    attach_solutions(profile, coeffs, p, out, opts.n_interval);
    out.method = PartitionMethod::Refine;
    return out;
  } catch (const NumericalError&) {
    return init;  // solver failure: keep the initial partition
  }
}

namespace {

struct FlowWorkspace {
  const DiscreteOperator* op = nullptr;
  double p = 0.0;
  int F = 0;
  std::vector<std::vector<double>> u;       // components (free = all nodes)

  double mass(int k) const {
    return op->grid.mw[k] * op->grid.beta[k];
  }

  double coupling_power(double v) const { return std::pow(std::abs(v), 0.5 * p); }

  // V_i(k) = sum_{j != i} |u_j(k)|^{p/2}
  std::vector<double> competitor_field(int i) const {
    std::vector<double> V(F, 0.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (static_cast<int>(j) == i) continue;
      for (int k = 0; k < F; ++k) V[k] += coupling_power(u[j][k]);
    }
    return V;
  }

  double functional(double eta_abs) const {
    double J = 0.0;
    for (const auto& ui : u) {
      J += 0.5 * op->A.quad_form(ui);
      for (int k = 0; k < F; ++k)
        J -= mass(k) * std::pow(std::abs(ui[k]), p) / p;
    }
    J += eta_abs * overlap();
    return J;
  }

  double overlap() const {
    double O = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i + 1; j < u.size(); ++j)
        for (int k = 0; k < F; ++k)
          O += mass(k) * coupling_power(u[i][k]) * coupling_power(u[j][k]);
    return O;
  }

  double norms_energy() const {
    double s = 0.0;
    for (const auto& ui : u) s += op->A.quad_form(ui);
    return energy_factor(p) * s;
  }
};

// Scale of the i-th component onto the coupled constraint set:
// Q + (p/2)|eta| C s^{p/2-2} - P s^{p-2} = 0.
double constraint_scale(double Q, double P, double C, double eta_abs, double p) {
  if (!(P > 0.0)) throw NumericalError("segregation: vanishing component");
  auto phi = [&](double s) {
    return Q + 0.5 * p * eta_abs * C * std::pow(s, 0.5 * p - 2.0) -
           P * std::pow(s, p - 2.0);
  };
  double hi = 1.0;
  while (phi(hi) > 0.0) {
    hi *= 2.0;
    // a scale this large means the component has no usable mass left
    if (hi > 1e12) throw NumericalError("segregation: component collapse");
  }
  double lo = 1e-12;
  if (phi(lo) < 0.0) lo = hi * 0.5;  // should not happen for p > 2
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SegregationResult segregation_flow(const Profile& profile,
                                   const OperatorCoefficients& coeffs, double p,
                                   int ell, const FlowOptions& opts) {
  if (ell < 2) throw ConfigError("segregation_flow: need ell >= 2");
  if (!(opts.eta0 < 0.0) || !(opts.eta_factor > 1.0))
    throw ConfigError("segregation_flow: schedule must decrease to -infinity");

  const Grid grid = make_grid(profile, 0.0, profile.d, opts.n_grid);
  const DiscreteOperator op = assemble(grid, coeffs);
  if (op.dofs() != grid.nodes())
    throw ConfigError("segregation_flow: expected natural conditions at both ends");

  FlowWorkspace ws;
  ws.op = &op;
  ws.p = p;
  ws.F = op.dofs();
  const bool clip_negative = coeffs.m == 1;

  auto initial_bump = [&](int i) {
    std::vector<double> w(ws.F, 0.0);
    const double lo = profile.d * i / ell, hi = profile.d * (i + 1) / ell;
    const double pi = std::acos(-1.0);
    for (int k = 0; k < ws.F; ++k) {
      const double t = grid.t[k];
      if (t > lo && t < hi) w[k] = std::sin(pi * (t - lo) / (hi - lo));
    }
    return w;
  };
  ws.u.resize(ell);
  for (int i = 0; i < ell; ++i) ws.u[i] = initial_bump(i);

  SegregationResult res;
  int collapses = 0;

  auto project_component = [&](int i, double eta_abs) {
    auto& ui = ws.u[i];
    const double Q = op.A.quad_form(ui);
    double P = 0.0, C = 0.0;
    const auto V = ws.competitor_field(i);
    for (int k = 0; k < ws.F; ++k) {
      P += ws.mass(k) * std::pow(std::abs(ui[k]), p);
      C += ws.mass(k) * V[k] * ws.coupling_power(ui[k]);
    }
    if (!(P > 0.0) || !(Q > 0.0)) throw NumericalError("segregation: component vanished");
    const double s = constraint_scale(Q, P, C, eta_abs, p);
    if (s > 1e6) throw NumericalError("segregation: component collapse");
    for (double& v : ui) v *= s;
    if (std::sqrt(Q) * s < 1e-6) throw NumericalError("segregation: component collapse");
  };

  auto project_or_reinit = [&](int i, double eta_abs) {
    bool finite = true;
    for (double v : ws.u[i]) finite = finite && std::isfinite(v);
    try {
      if (!finite) throw NumericalError("segregation: non-finite component");
      project_component(i, eta_abs);
      return false;
    } catch (const NumericalError&) {
      if (++collapses > 10)
        throw NumericalError("segregation_flow: repeated component collapse");
      ws.u[i] = initial_bump(i);
      try {
        project_component(i, eta_abs);
      } catch (const NumericalError&) {
        throw NumericalError("segregation_flow: repeated component collapse");
      }
      return true;
    }
  };

  double eta = opts.eta0;
  for (int stage = 0; stage < opts.eta_steps; ++stage, eta *= opts.eta_factor) {
    const double eta_abs = -eta;
    // Put the warm start on the constraint set for this eta.
    for (int i = 0; i < ell; ++i) project_or_reinit(i, eta_abs);

    double J = ws.functional(eta_abs);
    for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
      for (int i = 0; i < ell; ++i) {
        // Damped inverse iteration on the weak Euler-Lagrange equation of
        // the i-th component with the others frozen:
        //   A u = mass (|u|^{p-2} u - |eta| (p/2) V |u|^{p/2-1} sgn u),
        // preconditioned with the stored factor of A, and accepted only
        // when the coupled functional decreases (the constraint
        // projection pins the radial mode but not spiky shape growth).
        const auto V = ws.competitor_field(i);
        std::vector<double> b(ws.F);
        for (int k = 0; k < ws.F; ++k) {
          const double v = ws.u[i][k];
          const double nl = std::pow(std::abs(v), p - 2.0) * v;
          const double coup = 0.5 * p * std::pow(std::abs(v), 0.5 * p - 1.0) *
                              (v >= 0 ? 1.0 : -1.0) * V[k];
          b[k] = ws.mass(k) * (nl - eta_abs * coup);
        }
        std::vector<double> vnew = op.solve(std::move(b));
        // Shape-only direction: match the current A-norm so the radially
        // unstable mode of the fixed-point map stays with the projection.
        const double qu = op.A.quad_form(ws.u[i]);
        const double qv = op.A.quad_form(vnew);
        if (qv > 0.0) {
          const double match = std::sqrt(qu / qv);
          for (double& x : vnew) x *= match;
        }
        const std::vector<double> u_save = ws.u[i];
        const double J_before = ws.functional(eta_abs);
        bool moved = false;
        for (double theta : {0.8, 0.4, 0.2, 0.1, 0.05, 0.02}) {
          for (int k = 0; k < ws.F; ++k) {
            double x = (1.0 - theta) * u_save[k] + theta * vnew[k];
            // One-signed components for the second-order operator: the
            // coupling drives the overlap tail negative, and retracting
            // it to zero is the admissible move.
            if (clip_negative && x < 0.0) x = 0.0;
            ws.u[i][k] = x;
          }
          if (project_or_reinit(i, eta_abs)) {  // fresh restart: keep it
            moved = true;
            break;
          }
          if (ws.functional(eta_abs) <=
              J_before + 1e-12 * std::max(1.0, std::abs(J_before))) {
            moved = true;
            break;
          }
        }
        if (!moved) ws.u[i] = u_save;
      }
      const double J_new = ws.functional(eta_abs);
      if (std::abs(J - J_new) < opts.inner_tol * std::max(1.0, std::abs(J_new)) &&
          sweep > 2)
        break;
      J = J_new;
    }

    SystemState st;
    st.eta = eta;
    st.components = ws.u;
    st.overlap = ws.overlap();
    st.energy = ws.norms_energy();
    if (opts.verbose) {
      std::fprintf(stderr, "[flow] eta=%.3g overlap=%.6g energy=%.8g collapses=%d norms:",
                   eta, st.overlap, st.energy, collapses);
      for (const auto& ui : ws.u)
        std::fprintf(stderr, " %.4g", std::sqrt(op.A.quad_form(ui)));
      std::fprintf(stderr, "\n");
    }
    res.trajectory.push_back(std::move(st));
  }

  // Support extraction: longest run above the relative threshold.
  struct Run {
    int first = 0, last = 0;
    double mid = 0.0;
  };
  std::vector<Run> runs(ell);
  for (int i = 0; i < ell; ++i) {
    double mx = 0.0;
    for (double v : ws.u[i]) mx = std::max(mx, std::abs(v));
    const double thr = opts.support_threshold * mx;
    int best_first = -1, best_last = -1, cur_first = -1;
    for (int k = 0; k <= ws.F; ++k) {
      const bool on = k < ws.F && std::abs(ws.u[i][k]) > thr;
      if (on && cur_first < 0) cur_first = k;
      if (!on && cur_first >= 0) {
        if (best_first < 0 || k - cur_first > best_last - best_first + 1) {
          best_first = cur_first;
          best_last = k - 1;
        }
        cur_first = -1;
      }
    }
    if (best_first < 0)
      throw NumericalError("segregation_flow: empty support for a component");
    runs[i] = {best_first, best_last,
               0.5 * (grid.t[best_first] + grid.t[best_last])};
  }
  std::sort(runs.begin(), runs.end(),
            [](const Run& a, const Run& b) { return a.mid < b.mid; });
  for (int i = 0; i + 1 < ell; ++i)
    if (runs[i].last >= runs[i + 1].first)
      throw NumericalError("segregation_flow: supports are not disjoint intervals");

  Partition part;
  part.ell = ell;
  part.method = PartitionMethod::Segregation;
  for (int i = 0; i + 1 < ell; ++i)
    part.breakpoints.push_back(
        0.5 * (grid.t[runs[i].last] + grid.t[runs[i + 1].first]));
  attach_solutions(profile, coeffs, p, part, opts.n_interval);
  part.method = PartitionMethod::Segregation;

  res.partition = std::move(part);
  res.collapses = collapses;
  return res;
}

namespace {

double interp_linear(const std::vector<double>& ts, const std::vector<double>& vs,
                     double x) {
  if (x <= ts.front()) return vs.front();
  if (x >= ts.back()) return vs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  const double s = (x - ts[i]) / (ts[i + 1] - ts[i]);
  return (1.0 - s) * vs[i] + s * vs[i + 1];
}

}  // namespace

StitchedSolution stitch_nodal(const Profile& profile,
                              const OperatorCoefficients& coeffs, double p,
                              const Partition& part, int n_global) {
  if (coeffs.m != 1)
    throw ConfigError("stitch_nodal: alternating-sign gluing needs m = 1");
  if (static_cast<int>(part.solutions.size()) != part.ell)
    throw ConfigError("stitch_nodal: missing interval solutions");

  const Grid grid = make_grid(profile, 0.0, profile.d, n_global);
  const DiscreteOperator op = assemble(grid, coeffs);

  std::vector<double> ends = {0.0};
  for (double b : part.breakpoints) ends.push_back(b);
  ends.push_back(profile.d);

  StitchedSolution out;
  out.t = grid.t;
  out.u.assign(grid.nodes(), 0.0);
  for (int k = 0; k < part.ell; ++k) {
    const IntervalSolution& sol = part.solutions[k];
    // Orient each piece nonnegative before applying the alternating sign.
    double w_int = 0.0;
    for (std::size_t i = 0; i < sol.w.size(); ++i) w_int += sol.w[i];
    const double orient = w_int >= 0 ? 1.0 : -1.0;
    const double sign = (k % 2 == 0 ? 1.0 : -1.0) * orient;
    for (int i = 0; i < grid.nodes(); ++i) {
      const double t = grid.t[i];
      if (t < ends[k] || t > ends[k + 1]) continue;
      out.u[i] = sign * interp_linear(sol.t, sol.w, t);
    }
  }

  // Sign changes over nodes carrying at least 1% of the sup norm.
  double mx = 0.0;
  for (double v : out.u) mx = std::max(mx, std::abs(v));
  int prev_sign = 0;
  double prev_t = 0.0;
  for (int i = 0; i < grid.nodes(); ++i) {
    if (std::abs(out.u[i]) <= 0.01 * mx) continue;
    const int s = out.u[i] > 0 ? 1 : -1;
    if (prev_sign != 0 && s != prev_sign) {
      ++out.sign_changes;
      out.zero_locations.push_back(0.5 * (prev_t + grid.t[i]));
    }
    prev_sign = s;
    prev_t = grid.t[i];
  }

  // Weak residual against the full-interval operator.
  std::vector<double> r = op.A.mul(out.u);
  double rhs_norm = 0.0, res_norm = 0.0;
  for (int i = 0; i < grid.nodes(); ++i) {
    const double nl =
        grid.mw[i] * grid.beta[i] * std::pow(std::abs(out.u[i]), p - 2.0) * out.u[i];
    r[i] -= nl;
    rhs_norm += nl * nl;
    res_norm += r[i] * r[i];
  }
  out.weak_residual = std::sqrt(res_norm) / std::max(1e-300, std::sqrt(rhs_norm));
  return out;
}

std::string partition_to_json(const Partition& part, int indent) {
  nlohmann::json j;
  j["ell"] = part.ell;
  j["method"] = to_string(part.method);
  j["breakpoints"] = part.breakpoints;
  j["energies"] = part.interval_energies;
  j["total"] = part.total_energy;
  if (!part.tied_breakpoint_indices.empty())
    j["tied_breakpoint_indices"] = part.tied_breakpoint_indices;
  return j.dump(indent);
}

}  // namespace qpart
