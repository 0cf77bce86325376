// Command-line front end: geometry catalog, soliton pipeline, interval
// partitions, and curvature predicates. Exit codes: 0 success, 2 bad
// configuration, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpart/curvature.hpp"
#include "qpart/errors.hpp"
#include "qpart/geometry.hpp"
#include "qpart/nehari.hpp"
#include "qpart/partition.hpp"
#include "qpart/reduced.hpp"
#include "qpart/soliton.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qpart::ConfigError("cannot open output file: " + path);
  out << text;
}

std::string default_cache_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QPART_CACHE_DIR")) return env;
  return "";
}

qpart::OperatorCoefficients operator_from_spec(const std::string& spec,
                                               const qpart::Profile& profile) {
  if (spec == "yamabe") return qpart::yamabe_coefficients(profile);
  if (spec.rfind("einstein:", 0) == 0) {
    std::vector<double> cs;
    std::string rest = spec.substr(9);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      const std::size_t comma = rest.find(',', pos);
      const std::string tok = rest.substr(pos, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - pos);
      try {
        cs.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw qpart::ConfigError("bad factor constant '" + tok + "' in " + spec);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return qpart::einstein_gjms_coefficients(static_cast<int>(cs.size()), cs);
  }
  throw qpart::ConfigError("unknown operator spec '" + spec +
                           "' (use yamabe or einstein:c1[,c2])");
}

json validation_to_json(const qpart::ValidationReport& rep) {
  json checks = json::array();
  for (const auto& ck : rep.checks) {
    checks.push_back({{"name", ck.name},
                      {"pass", ck.pass},
                      {"worst", ck.worst},
                      {"location", ck.location},
                      {"detail", ck.detail}});
  }
  return {{"pass", rep.pass},
          {"max_h_beta_deviation", rep.max_h_beta_deviation},
          {"checks", checks}};
}

int cmd_geometry_list() {
  for (const auto& [name, desc] : qpart::catalog())
    std::cout << name << "  -  " << desc << "\n";
  return 0;
}

int cmd_geometry_describe(const std::string& name, int samples,
                          const std::string& out_path) {
  const qpart::Profile p = qpart::profile_by_name(name);
  const qpart::ValidationReport rep = qpart::validate(p, samples);
  json j = json::parse(qpart::profile_to_json(p));
  j["validation"] = validation_to_json(rep);
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
  return rep.pass ? 0 : 3;
}

int cmd_soliton_solve(double step, const std::string& out_csv,
                      const std::string& out_json) {
  qpart::ShootOptions opt;
  opt.step = step;
  qpart::SolitonSolution sol = qpart::run_soliton_pipeline(opt);
  const double volume = qpart::total_volume(sol);

  std::string csv = "t,f2,f2p,R,Q\n";
  for (std::size_t i = 0; i < sol.t_grid.size(); ++i) {
    csv += fmt17(sol.t_grid[i]) + "," + fmt17(sol.f2[i]) + "," +
           fmt17(sol.f2p[i]) + "," + fmt17(sol.R[i]) + "," + fmt17(sol.Q[i]) +
           "\n";
  }
  if (!out_csv.empty()) write_text(out_csv, csv);

  json summary;
  summary["c"] = sol.c;
  summary["domain_length"] = sol.domain_length;
  summary["R_range"] = {sol.R.back(), sol.R.front()};
  summary["Q_range"] = {*std::min_element(sol.Q.begin(), sol.Q.end()),
                        *std::max_element(sol.Q.begin(), sol.Q.end())};
  summary["volume"] = volume;
  summary["conservation_residual"] = qpart::conservation_residual(sol);
  summary["samples"] = sol.t_grid.size();
  const std::string stext = summary.dump(2) + "\n";
  if (!out_json.empty())
    write_text(out_json, stext);
  else if (out_csv.empty())
    std::cout << stext;
  std::cout << "c = " << fmt17(sol.c)
            << ", domain length = " << fmt17(sol.domain_length)
            << ", volume / pi^2 = " << fmt17(volume / (std::acos(-1.0) * std::acos(-1.0)))
            << "\n";
  return 0;
}

struct PartitionArgs {
  std::string geometry = "sphere:3,3";
  std::string op_spec = "yamabe";
  double p = 0.0;  // 0 = critical
  int ell = 2;
  std::string method = "dp";
  int grid_n = 192;
  int table_g = 17;
  double eta0 = -10.0;
  double eta_factor = 2.0;
  int eta_steps = 16;
  bool nodal = false;
  std::string out_dir = "qpart_out";
  std::string cache_dir;
  int jobs = 1;
  double soliton_step = 1e-3;
};

int cmd_partition_solve(const PartitionArgs& args) {
  namespace fs = std::filesystem;
  const qpart::Profile profile = qpart::profile_by_name(args.geometry, args.soliton_step);
  const qpart::OperatorCoefficients coeffs = operator_from_spec(args.op_spec, profile);
  const double p = args.p > 0.0
                       ? args.p
                       : qpart::critical_exponent(profile.dim_N, coeffs.m);
  if (args.ell < 1) throw qpart::ConfigError("--ell must be >= 1");

  qpart::Partition part;
  if (args.method == "dp" || args.method == "refine") {
    qpart::TableOptions topt;
    topt.n_interval = args.grid_n;
    topt.cache_dir = default_cache_dir(args.cache_dir);
    topt.jobs = args.jobs;
    const qpart::EnergyTable table =
        qpart::energy_table(profile, coeffs, p, args.table_g, topt);
    part = qpart::dp_partition(table, args.ell);
    if (args.method == "refine") {
      qpart::RefineOptions ropt;
      ropt.n_interval = args.grid_n;
      part = qpart::refine(profile, coeffs, p, part, ropt);
    }
    qpart::attach_solutions(profile, coeffs, p, part, args.grid_n);
  } else if (args.method == "segregation") {
    qpart::FlowOptions fopt;
    fopt.eta0 = args.eta0;
    fopt.eta_factor = args.eta_factor;
    fopt.eta_steps = args.eta_steps;
    fopt.n_interval = args.grid_n;
    const qpart::SegregationResult res =
        qpart::segregation_flow(profile, coeffs, p, args.ell, fopt);
    part = res.partition;
  } else {
    throw qpart::ConfigError("unknown method '" + args.method +
                             "' (dp | refine | segregation)");
  }

  fs::create_directories(args.out_dir);
  json j = json::parse(qpart::partition_to_json(part));
  j["geometry"] = args.geometry;
  j["operator"] = coeffs.label;
  j["p"] = p;
  write_text((fs::path(args.out_dir) / "partition.json").string(), j.dump(2) + "\n");

  for (std::size_t k = 0; k < part.solutions.size(); ++k) {
    const auto& sol = part.solutions[k];
    std::string csv = "t,w\n";
    for (std::size_t i = 0; i < sol.t.size(); ++i)
      csv += fmt17(sol.t[i]) + "," + fmt17(sol.w[i]) + "\n";
    write_text((fs::path(args.out_dir) / ("interval_" + std::to_string(k) + ".csv"))
                   .string(),
               csv);
  }

  if (args.nodal) {
    const qpart::StitchedSolution st =
        qpart::stitch_nodal(profile, coeffs, p, part);
    std::string csv = "t,u\n";
    for (std::size_t i = 0; i < st.t.size(); ++i)
      csv += fmt17(st.t[i]) + "," + fmt17(st.u[i]) + "\n";
    write_text((fs::path(args.out_dir) / "nodal.csv").string(), csv);
  }

  std::cout << "total energy = " << fmt17(part.total_energy) << ", breakpoints =";
  for (double b : part.breakpoints) std::cout << " " << fmt17(b);
  std::cout << "\n";
  return 0;
}

int cmd_curvature_qsoliton(const std::string& csv_path, double step) {
  double qmin = 0.0, qmax = 0.0;
  if (!csv_path.empty()) {
    std::ifstream in(csv_path);
    if (!in) throw qpart::ConfigError("cannot read " + csv_path);
    std::string line;
    std::getline(in, line);  // header
    bool first = true;
    while (std::getline(in, line)) {
      const auto last_comma = line.find_last_of(',');
      if (last_comma == std::string::npos) continue;
      const double q = std::stod(line.substr(last_comma + 1));
      if (first || q < qmin) qmin = q;
      if (first || q > qmax) qmax = q;
      first = false;
    }
    if (first) throw qpart::ConfigError("no data rows in " + csv_path);
  } else {
    qpart::ShootOptions opt;
    opt.step = step;
    const qpart::SolitonSolution sol = qpart::run_soliton_pipeline(opt);
    qmin = *std::min_element(sol.Q.begin(), sol.Q.end());
    qmax = *std::max_element(sol.Q.begin(), sol.Q.end());
  }
  json j{{"q_min", qmin}, {"q_max", qmax}, {"positive", qmin > 0.0}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced Q-curvature problems on cohomogeneity-one geometries"};
  app.require_subcommand(1);

  // geometry
  auto* geo = app.add_subcommand("geometry", "profile catalog");
  geo->require_subcommand(1);
  geo->add_subcommand("list", "list the built-in families");
  auto* desc = geo->add_subcommand("describe", "emit profile JSON + validation");
  std::string geo_name;
  int geo_samples = 200;
  std::string geo_out;
  desc->add_option("name", geo_name, "catalog name, e.g. sphere:3,3")->required();
  desc->add_option("--samples", geo_samples, "validation grid size");
  desc->add_option("--out", geo_out, "write JSON here instead of stdout");

  // soliton
  auto* soliton = app.add_subcommand("soliton", "soliton trajectory pipeline");
  soliton->require_subcommand(1);
  auto* ssolve = soliton->add_subcommand("solve", "solve c, shoot, emit profiles");
  double s_step = 1e-3;
  std::string s_csv, s_json;
  ssolve->add_option("--step", s_step, "output spacing / max step");
  ssolve->add_option("--out", s_csv, "CSV path for t,f2,f2p,R,Q");
  ssolve->add_option("--summary", s_json, "JSON summary path");

  // partition
  auto* partition = app.add_subcommand("partition", "optimal interval partitions");
  partition->require_subcommand(1);
  auto* psolve = partition->add_subcommand("solve", "solve the ell-partition problem");
  PartitionArgs pa;
  std::string pa_config;
  psolve->add_option("--config", pa_config, "JSON run configuration (flags override)");
  auto* o_geometry = psolve->add_option("--geometry", pa.geometry, "catalog profile name");
  auto* o_operator = psolve->add_option("--operator", pa.op_spec, "yamabe | einstein:c1[,c2]");
  auto* o_p = psolve->add_option("--p", pa.p, "exponent (default: critical)");
  auto* o_ell = psolve->add_option("--ell", pa.ell, "number of pieces");
  auto* o_method = psolve->add_option("--method", pa.method, "dp | refine | segregation");
  auto* o_grid_n = psolve->add_option("--grid-n", pa.grid_n, "cells per interval solve");
  auto* o_table_g = psolve->add_option("--table-g", pa.table_g, "candidate cut points");
  auto* o_eta0 = psolve->add_option("--eta0", pa.eta0, "initial coupling");
  auto* o_eta_factor = psolve->add_option("--eta-factor", pa.eta_factor, "schedule growth factor");
  auto* o_eta_steps = psolve->add_option("--eta-steps", pa.eta_steps, "schedule length");
  auto* o_nodal = psolve->add_flag("--nodal", pa.nodal, "emit the alternating-sign gluing");
  auto* o_out = psolve->add_option("--out", pa.out_dir, "output directory");
  auto* o_cache = psolve->add_option("--cache-dir", pa.cache_dir, "energy-table cache directory");
  auto* o_jobs = psolve->add_option("--jobs", pa.jobs, "parallel table workers");
  auto* o_sstep = psolve->add_option("--soliton-step", pa.soliton_step, "step for koiso-cao geometry");

  // curvature
  auto* curv = app.add_subcommand("curvature", "curvature predicates");
  curv->require_subcommand(1);
  auto* qsol = curv->add_subcommand("q-soliton", "Q range along the soliton");
  std::string q_csv;
  double q_step = 1e-3;
  qsol->add_option("--csv", q_csv, "read a previously written t,f2,f2p,R,Q file");
  qsol->add_option("--step", q_step, "step when solving in-process");
  auto* coer = curv->add_subcommand("coercivity", "sufficient coercivity predicate");
  double c_qmin = 0.0, c_rmin = 0.0;
  int c_N = 0;
  coer->add_option("--Qmin", c_qmin)->required();
  coer->add_option("--Rmin", c_rmin)->required();
  coer->add_option("--N", c_N)->required();
  auto* prod = curv->add_subcommand("product-check", "soliton x Einstein product");
  int p_n2 = 4;
  double p_step = 1e-3;
  prod->add_option("--n2", p_n2, "dimension of the Einstein factor")->required();
  prod->add_option("--step", p_step);

  CLI11_PARSE(app, argc, argv);

  try {
    if (geo->parsed()) {
      if (geo->get_subcommand("list")->parsed()) return cmd_geometry_list();
      return cmd_geometry_describe(geo_name, geo_samples, geo_out);
    }
    if (soliton->parsed()) return cmd_soliton_solve(s_step, s_csv, s_json);
    if (partition->parsed()) {
      if (!pa_config.empty()) {
        std::ifstream in(pa_config);
        if (!in) throw qpart::ConfigError("cannot read config file " + pa_config);
        json cfg;
        try {
          in >> cfg;
        } catch (const std::exception& e) {
          throw qpart::ConfigError(std::string("bad config JSON: ") + e.what());
        }
        // File values fill whatever the flags left untouched.
        auto fill = [&](const CLI::Option* opt, const char* key, auto& field) {
          if (opt->count() == 0 && cfg.contains(key)) cfg.at(key).get_to(field);
        };
        if (o_ell->count() == 0 && !cfg.contains("ell"))
          throw qpart::ConfigError("ell missing from both flags and config file");
        fill(o_geometry, "geometry", pa.geometry);
        fill(o_operator, "operator", pa.op_spec);
        fill(o_p, "p", pa.p);
        fill(o_ell, "ell", pa.ell);
        fill(o_method, "method", pa.method);
        fill(o_grid_n, "grid_n", pa.grid_n);
        fill(o_table_g, "table_g", pa.table_g);
        fill(o_eta0, "eta0", pa.eta0);
        fill(o_eta_factor, "eta_factor", pa.eta_factor);
        fill(o_eta_steps, "eta_steps", pa.eta_steps);
        fill(o_nodal, "nodal", pa.nodal);
        fill(o_out, "out", pa.out_dir);
        fill(o_cache, "cache_dir", pa.cache_dir);
        fill(o_jobs, "jobs", pa.jobs);
        fill(o_sstep, "soliton_step", pa.soliton_step);
      } else if (o_ell->count() == 0) {
        throw qpart::ConfigError("--ell is required (flag or config file)");
      }
      return cmd_partition_solve(pa);
    }
    if (curv->parsed()) {
      if (qsol->parsed()) return cmd_curvature_qsoliton(q_csv, q_step);
      if (coer->parsed()) {
        const auto v = qpart::paneitz_coercivity_sufficient(c_qmin, c_rmin, c_N);
        std::cout << json{{"verdict", qpart::to_string(v)}}.dump(2) << "\n";
        return v == qpart::CoercivityVerdict::InvalidInput ? 2 : 0;
      }
      if (prod->parsed()) {
        qpart::ShootOptions opt;
        opt.step = p_step;
        const qpart::SolitonSolution sol = qpart::run_soliton_pipeline(opt);
        const qpart::ProductCheckResult res = qpart::product_check(p_n2, sol);
        json j{{"N", res.N},
               {"R_g2", res.R_g2},
               {"inequality_lhs", res.inequality_lhs},
               {"inequality_rhs", res.inequality_rhs},
               {"inequality_holds", res.inequality_holds},
               {"min_Q", res.min_Q},
               {"min_bound", res.min_bound},
               {"positive", res.positive}};
        std::cout << j.dump(2) << "\n";
        return 0;
      }
    }
  } catch (const qpart::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qpart::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
