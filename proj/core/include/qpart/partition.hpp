#pragma once

#include <string>
#include <vector>

#include "qpart/nehari.hpp"

namespace qpart {

enum class PartitionMethod { Dp, Refine, Segregation };

std::string to_string(PartitionMethod m);

/// An ell-way split of the orbit space into consecutive intervals
/// 0 = a_0 < a_1 < ... < a_{ell-1} < a_ell = d with the least-energy
/// solution and energy of each piece.
struct Partition {
  int ell = 1;
  std::vector<double> breakpoints;         // interior points a_1..a_{ell-1}
  std::vector<double> interval_energies;   // per piece, left to right
  double total_energy = 0.0;
  PartitionMethod method = PartitionMethod::Dp;
  std::vector<IntervalSolution> solutions; // filled by attach_solutions
  std::vector<std::vector<int>> tied_breakpoint_indices;  // DP ties, if any
};

/// Pairwise interval energies over G candidate cut points (the uniform
/// grid including both ends): E[i][j] = least energy on (t_i, t_j).
struct EnergyTable {
  int G = 0;
  double d = 0.0;
  std::vector<double> ts;
  std::vector<std::vector<double>> E;      // NaN marks a failed cell
  int n_interval = 0;
  double p = 0.0;
  std::string key;

  bool cell_valid(int i, int j) const;
};

struct TableOptions {
  int n_interval = 192;      // cells per interval solve
  std::string cache_dir;     // empty = no caching
  int jobs = 1;              // parallel cell workers
};

EnergyTable energy_table(const Profile& profile, const OperatorCoefficients& coeffs,
                         double p, int G, const TableOptions& opts = {});

/// Exact segmentation minimizer of sum E over ell consecutive pieces of
/// the candidate grid, O(G^2 ell); ties within 1e-12 are reported.
Partition dp_partition(const EnergyTable& table, int ell);

/// Brute-force enumeration over all breakpoint combinations; test oracle
/// for dp_partition (identical scan order and tie-breaking).
Partition enumerate_partition(const EnergyTable& table, int ell);

struct RefineOptions {
  int n_interval = 192;
  double tol_energy = 1e-10;  // stop when a full sweep improves less
  double tol_x = 1e-5;        // golden-section bracket width (times d)
  int max_sweeps = 40;
};

/// Cyclic coordinate descent on the breakpoints: each a_i is moved by
/// golden-section search on the two adjacent interval energies.
Partition refine(const Profile& profile, const OperatorCoefficients& coeffs,
                 double p, const Partition& init, const RefineOptions& opts = {});

/// Re-solves each interval of a partition and attaches the solutions;
/// also refreshes interval_energies and the total.
void attach_solutions(const Profile& profile, const OperatorCoefficients& coeffs,
                      double p, Partition& partition, int n_interval = 192);

/// State of the competitive system on the full interval.
struct SystemState {
  double eta = 0.0;
  std::vector<std::vector<double>> components;  // ell full-node vectors
  double overlap = 0.0;                         // sum_{i<j} int |w_i w_j|^{p/2} beta
  double energy = 0.0;                          // (1/2 - 1/p) sum ||w_i||^2
};

struct FlowOptions {
  double eta0 = -10.0;
  double eta_factor = 2.0;
  int eta_steps = 16;
  int n_grid = 384;           // cells of the full-interval grid
  int sweeps = 600;           // inner iteration cap per eta
  double inner_tol = 1e-10;
  double support_threshold = 0.01;  // relative to max |w_i|
  int n_interval = 192;       // for the extracted partition energies
  int verbose = 0;            // 1: per-stage diagnostics on stderr
};

struct SegregationResult {
  std::vector<SystemState> trajectory;  // one state per eta
  Partition partition;
  int collapses = 0;
};

/// Minimizes the coupled functional over the product constraint set for a
/// decreasing schedule of coupling strengths eta -> -infinity, warm-started
/// across the schedule; extracts breakpoints from the component supports.
SegregationResult segregation_flow(const Profile& profile,
                                   const OperatorCoefficients& coeffs, double p,
                                   int ell, const FlowOptions& opts = {});

struct StitchedSolution {
  std::vector<double> t, u;
  int sign_changes = 0;
  std::vector<double> zero_locations;
  double weak_residual = 0.0;  // against the full-interval operator
};

/// Alternating-sign concatenation of the interval solutions on a global
/// grid (m = 1). Diagnostics: sign-change count/locations and the weak
/// residual of the stitched function on the full interval.
StitchedSolution stitch_nodal(const Profile& profile,
                              const OperatorCoefficients& coeffs, double p,
                              const Partition& partition, int n_global = 1024);

std::string partition_to_json(const Partition& partition, int indent = 2);

}  // namespace qpart
