#include "qpart/geometry.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "qpart/errors.hpp"

namespace qpart {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double warp_scale_hint(const Warp& w) {
  if (w.form != WarpForm::Sampled) return std::max(1.0, std::abs(w.scale));
  double m = 0.0;
  for (double v : w.curve.values()) m = std::max(m, std::abs(v));
  return std::max(1.0, m);
}

}  // namespace

double Warp::value(double t) const {
  switch (form) {
    case WarpForm::CosHalf: return scale * std::cos(0.5 * t);
    case WarpForm::SinHalf: return scale * std::sin(0.5 * t);
    case WarpForm::Sin:     return scale * std::sin(t);
    case WarpForm::Cos:     return scale * std::cos(t);
    case WarpForm::SinCos:  return scale * std::sin(t) * std::cos(t);
    case WarpForm::Sampled: return curve.value(t);
  }
  return 0.0;
}

double Warp::deriv(double t) const {
  switch (form) {
    case WarpForm::CosHalf: return -0.5 * scale * std::sin(0.5 * t);
    case WarpForm::SinHalf: return 0.5 * scale * std::cos(0.5 * t);
    case WarpForm::Sin:     return scale * std::cos(t);
    case WarpForm::Cos:     return -scale * std::sin(t);
    case WarpForm::SinCos:  return scale * std::cos(2.0 * t);
    case WarpForm::Sampled: return curve.deriv(t);
  }
  return 0.0;
}

double ScalarCurvature::operator()(double t) const {
  return constant ? value : curve.value(t);
}

double Profile::beta(double t) const {
  double b = 1.0;
  for (const Warp& w : warps) b *= ipow(w.value(t), w.multiplicity);
  return b;
}

double Profile::mean_curvature(double t) const {
  double h = 0.0;
  for (const Warp& w : warps) h += w.multiplicity * w.deriv(t) / w.value(t);
  return h;
}

int Profile::vanishing_multiplicity(bool right_end) const {
  const double t = right_end ? d : 0.0;
  int m = 0;
  for (const Warp& w : warps)
    if (std::abs(w.value(t)) < 1e-9 * warp_scale_hint(w)) m += w.multiplicity;
  return m;
}

Profile make_sphere(int n1, int n2) {
  if (n1 < 2 || n2 < 2)
    throw ConfigError("make_sphere: n1, n2 must be >= 2 (singular orbits may not be points)");
  Profile p;
  p.name = "sphere:" + std::to_string(n1) + "," + std::to_string(n2);
  p.dim_N = n1 + n2 - 1;
  p.d = std::acos(-1.0);
  p.warps = {{WarpForm::CosHalf, 1.0, n1 - 1, {}},
             {WarpForm::SinHalf, 1.0, n2 - 1, {}}};
  p.singular_dims = {n1 - 1, n2 - 1};
  p.orbit_labels = {"S^" + std::to_string(n1 - 1) + " x S^" + std::to_string(n2 - 1),
                    "S^" + std::to_string(n1 - 1), "S^" + std::to_string(n2 - 1)};
  p.scalar_curvature.constant = true;
  p.scalar_curvature.value = static_cast<double>(p.dim_N) * (p.dim_N - 1);
  return p;
}

Profile make_cpn(int n_cplx) {
  if (n_cplx < 3) throw ConfigError("make_cpn: complex dimension must be >= 3");
  Profile p;
  p.name = "cpn:" + std::to_string(n_cplx);
  p.dim_N = 2 * n_cplx;
  p.d = 0.5 * std::acos(-1.0);
  const double fiber_scale =
      std::sqrt((2.0 * n_cplx - 2.0) / static_cast<double>(n_cplx));
  p.warps = {{WarpForm::Sin, 1.0, 2 * n_cplx - 2, {}},
             {WarpForm::SinCos, fiber_scale, 1, {}}};
  p.singular_dims = {0, 2 * n_cplx - 2};
  p.orbit_labels = {"S^" + std::to_string(2 * n_cplx - 1), "point",
                    "CP^" + std::to_string(n_cplx - 1)};
  p.scalar_curvature.constant = true;
  p.scalar_curvature.value = 4.0 * n_cplx * (n_cplx + 1);
  return p;
}

Profile make_hpn(int n_quat) {
  if (n_quat < 2) throw ConfigError("make_hpn: quaternionic dimension must be >= 2");
  Profile p;
  p.name = "hpn:" + std::to_string(n_quat);
  p.dim_N = 4 * n_quat;
  p.d = 0.5 * std::acos(-1.0);
  p.warps = {{WarpForm::SinCos, 1.0, 4 * n_quat - 4, {}},
             {WarpForm::Cos, 1.0, 3, {}}};
  p.singular_dims = {3, 0};
  p.orbit_labels = {"S^" + std::to_string(4 * n_quat - 1), "S^3", "point"};
  p.scalar_curvature.constant = true;
  p.scalar_curvature.value = 16.0 * n_quat * (n_quat + 2);
  return p;
}

Profile profile_from_soliton(const SolitonSolution& sol) {
  if (!sol.profiles_filled)
    throw ConfigError("profile_from_soliton: curvature profiles not filled");
  const std::size_t m = sol.t_grid.size();
  if (m < 4) throw NumericalError("profile_from_soliton: trajectory too short");
  if (std::abs(sol.f2.back() - std::sqrt(2.0)) > 1e-2 ||
      std::abs(sol.f2p.back()) > 1e-8 || std::abs(sol.f2p.front()) > 1e-12)
    throw NumericalError("profile_from_soliton: endpoint checks failed");

  std::vector<double> f1(m), f1p(m), rp(m);
  for (std::size_t i = 0; i < m; ++i) {
    f1[i] = -sol.f2[i] * sol.f2p[i];
    f1p[i] = -(sol.f2p[i] * sol.f2p[i] + sol.f2[i] * sol.f2pp[i]);
    rp[i] = 2.0 * sol.potential_fp[i] * sol.Ric11[i];
  }

  Profile p;
  p.name = "koiso-cao";
  p.dim_N = 4;
  p.d = sol.domain_length;
  Warp w1;
  w1.form = WarpForm::Sampled;
  w1.multiplicity = 1;
  w1.curve = HermiteCurve(sol.t_grid, f1, f1p);
  Warp w2;
  w2.form = WarpForm::Sampled;
  w2.multiplicity = 2;
  w2.curve = HermiteCurve(sol.t_grid, sol.f2, sol.f2p);
  p.warps = {w1, w2};
  p.singular_dims = {2, 2};
  p.orbit_labels = {"S^3 (Hopf)", "S^2", "S^2"};
  p.scalar_curvature.constant = false;
  p.scalar_curvature.curve = HermiteCurve(sol.t_grid, sol.R, rp);
  return p;
}

ValidationReport validate(const Profile& profile, int samples) {
  if (samples < 10) throw ConfigError("validate: samples must be >= 10");
  ValidationReport rep;

  // Multiplicity sum.
  {
    int sum = 0;
    for (const Warp& w : profile.warps) sum += w.multiplicity;
    ValidationCheck ck;
    ck.name = "multiplicity sum";
    ck.pass = (sum == profile.dim_N - 1);
    ck.worst = std::abs(sum - (profile.dim_N - 1));
    ck.detail = "sum d_j = " + std::to_string(sum) + ", N - 1 = " +
                std::to_string(profile.dim_N - 1);
    rep.checks.push_back(ck);
  }

  const double margin = 0.02 * profile.d;
  auto grid_t = [&](int k) {
    return margin + (profile.d - 2.0 * margin) * k / (samples - 1);
  };

  // Beta positive on the interior.
  {
    ValidationCheck ck;
    ck.name = "beta positive";
    ck.pass = true;
    double worst = 1e300;
    for (int k = 0; k < samples; ++k) {
      const double t = grid_t(k);
      const double b = profile.beta(t);
      if (b < worst) {
        worst = b;
        ck.location = t;
      }
      if (!(b > 0.0)) ck.pass = false;
    }
    ck.worst = worst;
    rep.checks.push_back(ck);
  }

  // Endpoint warp structure: at least one warp collapses at each end and
  // the surviving warps are flat there.
  for (int side = 0; side < 2; ++side) {
    const double t = side == 0 ? 0.0 : profile.d;
    ValidationCheck ck;
    ck.name = side == 0 ? "endpoint structure (left)" : "endpoint structure (right)";
    ck.location = t;
    int vanishing = 0;
    double worst_flat = 0.0;
    for (const Warp& w : profile.warps) {
      const double scale = warp_scale_hint(w);
      if (std::abs(w.value(t)) < 1e-9 * scale)
        vanishing += w.multiplicity;
      else
        worst_flat = std::max(worst_flat, std::abs(w.deriv(t)) / scale);
    }
    ck.pass = vanishing >= 1 && worst_flat < 1e-6;
    ck.worst = worst_flat;
    ck.detail = "vanishing multiplicity " + std::to_string(vanishing);
    rep.checks.push_back(ck);
  }

  // h against beta'/beta by five-point finite differences.
  {
    ValidationCheck ck;
    ck.name = "h matches beta'/beta";
    const double step = 1e-4;
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double t = grid_t(k);
      const double bp = fd_derivative_5pt(
          [&](double x) { return profile.beta(x); }, t, step);
      const double dev = std::abs(profile.mean_curvature(t) - bp / profile.beta(t));
      if (dev > worst) {
        worst = dev;
        ck.location = t;
      }
    }
    ck.worst = worst;
    ck.pass = worst < 1e-6;
    rep.max_h_beta_deviation = worst;
    rep.checks.push_back(ck);
  }

  // Endpoint asymptotics: t h(t) -> vanishing multiplicity as t -> 0,
  // and symmetrically at t = d.
  for (int side = 0; side < 2; ++side) {
    ValidationCheck ck;
    ck.name = side == 0 ? "endpoint asymptotics (left)" : "endpoint asymptotics (right)";
    const double probe = 1e-3;
    const int target = profile.vanishing_multiplicity(side == 1);
    double ratio;
    if (side == 0) {
      const double t = probe;
      ratio = t * profile.mean_curvature(t) / target;
      ck.location = t;
    } else {
      const double t = profile.d - probe;
      ratio = (t - profile.d) * profile.mean_curvature(t) / target;
      ck.location = t;
    }
    ck.worst = std::abs(ratio - 1.0);
    ck.pass = ck.worst < 0.05;
    ck.detail = "limit target " + std::to_string(target);
    rep.checks.push_back(ck);
  }

  rep.pass = true;
  for (const auto& ck : rep.checks) rep.pass = rep.pass && ck.pass;
  return rep;
}

namespace {

using nlohmann::json;

std::string form_name(WarpForm f) {
  switch (f) {
    case WarpForm::CosHalf: return "cos_half";
    case WarpForm::SinHalf: return "sin_half";
    case WarpForm::Sin: return "sin";
    case WarpForm::Cos: return "cos";
    case WarpForm::SinCos: return "sin_cos";
    case WarpForm::Sampled: return "sampled";
  }
  return "?";
}

WarpForm form_from_name(const std::string& s) {
  if (s == "cos_half") return WarpForm::CosHalf;
  if (s == "sin_half") return WarpForm::SinHalf;
  if (s == "sin") return WarpForm::Sin;
  if (s == "cos") return WarpForm::Cos;
  if (s == "sin_cos") return WarpForm::SinCos;
  if (s == "sampled") return WarpForm::Sampled;
  throw ConfigError("unknown warp form: " + s);
}

}  // namespace

std::string profile_to_json(const Profile& p, int indent) {
  json j;
  j["name"] = p.name;
  j["dim_N"] = p.dim_N;
  j["d"] = p.d;
  j["singular_dims"] = p.singular_dims;
  j["orbit_labels"] = p.orbit_labels;
  j["warps"] = json::array();
  for (const Warp& w : p.warps) {
    json wj;
    wj["multiplicity"] = w.multiplicity;
    if (w.form == WarpForm::Sampled) {
      wj["kind"] = "sampled";
      wj["t"] = w.curve.knots();
      wj["v"] = w.curve.values();
      wj["dv"] = w.curve.derivs();
    } else {
      wj["kind"] = "analytic";
      wj["form"] = form_name(w.form);
      wj["scale"] = w.scale;
    }
    j["warps"].push_back(wj);
  }
  if (p.scalar_curvature.constant) {
    j["scalar_curvature"] = {{"kind", "constant"}, {"value", p.scalar_curvature.value}};
  } else {
    j["scalar_curvature"] = {{"kind", "sampled"},
                             {"t", p.scalar_curvature.curve.knots()},
                             {"v", p.scalar_curvature.curve.values()},
                             {"dv", p.scalar_curvature.curve.derivs()}};
  }
  return j.dump(indent);
}

Profile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("profile_from_json: ") + e.what());
  }
  Profile p;
  p.name = j.at("name").get<std::string>();
  p.dim_N = j.at("dim_N").get<int>();
  p.d = j.at("d").get<double>();
  p.singular_dims = j.at("singular_dims").get<std::array<int, 2>>();
  p.orbit_labels = j.at("orbit_labels").get<std::array<std::string, 3>>();
  for (const auto& wj : j.at("warps")) {
    Warp w;
    w.multiplicity = wj.at("multiplicity").get<int>();
    if (wj.at("kind") == "sampled") {
      w.form = WarpForm::Sampled;
      w.curve = HermiteCurve(wj.at("t").get<std::vector<double>>(),
                             wj.at("v").get<std::vector<double>>(),
                             wj.at("dv").get<std::vector<double>>());
    } else {
      w.form = form_from_name(wj.at("form").get<std::string>());
      w.scale = wj.at("scale").get<double>();
    }
    p.warps.push_back(std::move(w));
  }
  const auto& sc = j.at("scalar_curvature");
  if (sc.at("kind") == "constant") {
    p.scalar_curvature.constant = true;
    p.scalar_curvature.value = sc.at("value").get<double>();
  } else {
    p.scalar_curvature.constant = false;
    p.scalar_curvature.curve = HermiteCurve(sc.at("t").get<std::vector<double>>(),
                                            sc.at("v").get<std::vector<double>>(),
                                            sc.at("dv").get<std::vector<double>>());
  }
  return p;
}

Profile profile_by_name(const std::string& name, double soliton_step) {
  if (name == "koiso-cao") {
    ShootOptions opt;
    opt.step = soliton_step;
    return profile_from_soliton(run_soliton_pipeline(opt));
  }
  const auto colon = name.find(':');
  const std::string family = name.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : name.substr(colon + 1);
  auto parse_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad integer '" + s + "' in geometry name '" + name + "'");
    }
  };
  if (family == "sphere") {
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw ConfigError("sphere geometry needs two parameters, e.g. sphere:3,3");
    return make_sphere(parse_int(args.substr(0, comma)), parse_int(args.substr(comma + 1)));
  }
  if (family == "cpn") return make_cpn(parse_int(args));
  if (family == "hpn") return make_hpn(parse_int(args));
  throw ConfigError("unknown geometry '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> catalog() {
  return {
      {"sphere:n1,n2", "round sphere S^{n1+n2-1}, block rotations, orbit space [0, pi]"},
      {"cpn:n", "complex projective space CP^n (n >= 3), orbit space [0, pi/2]"},
      {"hpn:n", "quaternionic projective space HP^n (n >= 2), orbit space [0, pi/2]"},
      {"koiso-cao", "shrinking soliton on CP^2 # CP^2-bar, solved on demand"},
  };
}

}  // namespace qpart
