// Command-line front end: formulate -> solve -> certify pipelines for moment
// bounds of the Lorenz system, exact certificate verification, trajectory and
// orbit averaging, the moment-relation table, the z^3 feasibility region, and
// a summary report.  All outputs are JSON (CSV for point clouds); a run with
// identical configuration produces byte-identical output.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "sosbound/dynsim.hpp"
#include "sosbound/io.hpp"
#include "sosbound/pipeline.hpp"

using namespace sosbound;
using io::json;
using lorenz::LorenzParams;
using lorenz::MomentSpec;

namespace {

struct SystemFlags {
  std::string beta = "8/3";
  std::string sigma = "10";
  std::string r = "28";

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", beta, "beta as a rational, e.g. 8/3")->capture_default_str();
    cmd->add_option("--sigma", sigma, "sigma as a rational")->capture_default_str();
    cmd->add_option("--r", r, "r as a rational, or 'symbolic'")->capture_default_str();
  }
  LorenzParams params() const {
    LorenzParams p;
    p.beta = rat_parse(beta);
    p.sigma = rat_parse(sigma);
    if (r == "symbolic")
      p.r.reset();
    else
      p.r = rat_parse(r);
    return p;
  }
  json to_json() const {
    return json{{"beta", beta}, {"sigma", sigma}, {"r", r}};
  }
};

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    io::save_json(j, out_path);
}

MomentSpec parse_moment(const std::string& name) {
  auto m = lorenz::moment_by_name(name);
  if (!m)
    throw CLI::ValidationError("--moment", "unknown symmetric moment '" + name +
                                               "' (use e.g. z, x2, xy, y2, z2, x2z, y2z, xyz, "
                                               "z3, x4, x3y, x2y2, x2z2, xy3, xyz2, y4, y2z2, z4)");
  return *m;
}

json bound_result_json(const pipeline::BoundResult& res, const SystemFlags& sys) {
  json j;
  j["kind"] = "bound-report";
  j["moment"] = res.moment.name();
  j["degree"] = res.degree;
  j["system"] = sys.to_json();
  j["rescale"] = rat_str(res.rescale_used);
  j["status"] = sdpsolve::status_name(res.status);
  j["iterations"] = res.iterations;
  if (res.status == sdpsolve::SolveStatus::Optimal ||
      res.status == sdpsolve::SolveStatus::Marginal) {
    j["numeric_bound"] = res.numeric_bound;
    j["numeric_normalized"] = res.numeric_normalized;
  }
  j["verified"] = res.verified;
  if (res.verified) {
    j["verified_bound"] = rat_str(res.verified_bound);
    j["verified_bound_float"] = to_double(res.verified_bound);
    j["verified_normalized"] = res.verified_normalized;
    j["padding"] = rat_str(res.padding);
  }
  if (!res.note.empty()) j["note"] = res.note;
  return j;
}

json average_report_json(const dynsim::AverageReport& rep) {
  json raw = json::object(), norm = json::object();
  for (const auto& [m, v] : rep.raw) raw[m.name()] = v;
  for (const auto& [m, v] : rep.normalized) norm[m.name()] = v;
  return json{{"horizon", rep.horizon}, {"raw", raw}, {"normalized", norm}};
}

int run_bound(const SystemFlags& sys, const std::string& moment, int degree,
              const std::string& rescale, bool no_certify, const std::string& denmax,
              const std::string& out, const std::string& emit_problem,
              const std::string& emit_solution, const std::string& emit_certificate) {
  pipeline::BoundOptions opt;
  opt.params = sys.params();
  opt.moment = parse_moment(moment);
  opt.degree = degree;
  opt.rescale = rat_parse(rescale);
  opt.certify = !no_certify;
  opt.denominator_limit = BigInt(denmax);
  pipeline::BoundResult res;
  try {
    res = pipeline::bound_moment(opt);
  } catch (const sosform::UnrepresentableError& e) {
    json j{{"kind", "bound-report"},
           {"moment", moment},
           {"degree", degree},
           {"status", "infeasible"},
           {"stage", "formulate"},
           {"note", e.what()}};
    emit(j, out);
    return 1;
  }
  if (!emit_problem.empty()) {
    json p{{"kind", "sdp-problem"},
           {"sdp", io::instance_to_json(res.conversion.instance)},
           {"gram", io::gram_to_json(res.gram)}};
    io::save_json(p, emit_problem);
  }
  if (!emit_solution.empty()) io::save_json(io::solution_to_json(res.solution), emit_solution);
  if (!emit_certificate.empty() && res.certificate)
    io::save_json(io::certificate_to_json(*res.certificate), emit_certificate);
  emit(bound_result_json(res, sys), out);
  bool solved = res.status == sdpsolve::SolveStatus::Optimal ||
                res.status == sdpsolve::SolveStatus::Marginal;
  return (solved && (no_certify || res.verified)) ? 0 : 1;
}

int run_certify(const SystemFlags& sys, const std::string& builtin, const std::string& moment,
                int degree, const std::string& rescale, const std::string& out) {
  if (!builtin.empty()) {
    auto which = lorenz::builtin_by_name(builtin);
    if (!which) throw CLI::ValidationError("--builtin", "expected z2, z3 or xy3");
    LorenzParams p = sys.params();
    p.r.reset();  // built-ins are parametric in r
    io::CertificateFile file;
    try {
      file.cert = lorenz::builtin_certificate(*which, p);
    } catch (const lorenz::RegionViolation& e) {
      emit(json{{"kind", "certificate-error"}, {"error", e.what()}}, out);
      return 1;
    }
    file.params = p;
    file.name = builtin;
    auto f = lorenz::builtin_certificate_field(*which, p, file.cert.phi.vars_ptr());
    auto rep = certify::verify_certificate(file.cert, file.cert.phi, f, file.cert.V);
    if (!rep.ok) {
      emit(json{{"kind", "certificate-error"}, {"error", rep.detail}}, out);
      return 1;
    }
    emit(io::certificate_to_json(file), out);
    return 0;
  }
  if (moment.empty()) throw CLI::ValidationError("certify", "need --builtin or --moment");
  pipeline::BoundOptions opt;
  opt.params = sys.params();
  opt.moment = parse_moment(moment);
  opt.degree = degree;
  opt.rescale = rat_parse(rescale);
  opt.certify = true;
  auto res = pipeline::bound_moment(opt);
  if (!res.verified || !res.certificate) {
    emit(json{{"kind", "certificate-error"}, {"error", res.note}}, out);
    return 1;
  }
  emit(io::certificate_to_json(*res.certificate), out);
  return 0;
}

int run_verify(const std::string& path, const std::string& out) {
  // consumes only the certificate file plus the Lorenz system definition;
  // the solver is never touched on this path
  auto file = io::certificate_from_json(io::load_json(path));
  auto f = io::certificate_field(file);
  auto rep = certify::verify_certificate(file.cert, file.cert.phi, f, file.cert.V);
  json j{{"kind", "verify-report"},
         {"certificate", file.name},
         {"ok", rep.ok},
         {"detail", rep.detail},
         {"sense", file.cert.sense == sosform::Sense::Upper ? "upper" : "lower"},
         {"bound", polyalg::to_string(file.cert.bound_value)}};
  emit(j, out);
  return rep.ok ? 0 : 1;
}

int run_average(const SystemFlags& sys, double T, double dt, double transient,
                std::vector<double> x0, const std::string& out) {
  dynsim::TrajectoryConfig cfg;
  cfg.t_total = T;
  cfg.dt = dt;
  cfg.t_transient = transient;
  if (x0.size() == 3) cfg.initial_state = {x0[0], x0[1], x0[2]};
  auto rep = dynsim::time_average(sys.params(), lorenz::table_moments(), cfg);
  json j = average_report_json(rep);
  j["kind"] = "average-report";
  j["system"] = sys.to_json();
  j["dt"] = dt;
  j["transient"] = transient;
  emit(j, out);
  return 0;
}

int run_orbit(const SystemFlags& sys, const std::string& symbols, const std::string& out,
              const std::string& csv) {
  LorenzParams p = sys.params();
  dynsim::OrbitResult orbit;
  try {
    orbit = dynsim::find_periodic_orbit(p, symbols);
  } catch (const dynsim::OrbitNotFound& e) {
    emit(json{{"kind", "orbit-report"}, {"found", false}, {"error", e.what()}}, out);
    return 1;
  }
  auto rep = dynsim::orbit_average(p, orbit, lorenz::table_moments());
  json j{{"kind", "orbit-report"},
         {"found", true},
         {"symbols", orbit.symbols},
         {"period", orbit.period},
         {"residual", orbit.residual},
         {"averages", average_report_json(rep)}};
  json pts = json::array();
  for (const auto& s : orbit.section_points) pts.push_back({s[0], s[1], s[2]});
  j["section_points"] = pts;
  emit(j, out);
  if (!csv.empty()) {
    std::ofstream os(csv);
    os << "x,y,z\n";
    char buf[96];
    for (const auto& s : orbit.states) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s[0], s[1], s[2]);
      os << buf;
    }
  }
  return 0;
}

int run_relations(const SystemFlags& sys, const std::string& out) {
  auto rows = lorenz::appendix_relations(sys.params());  // throws on failure
  json arr = json::array();
  for (const auto& row : rows) {
    json terms = json::array(), chained = json::array();
    for (const auto& [m, c] : row.rhs) terms.push_back({m.name(), polyalg::to_string(c)});
    for (const auto& [m, c] : row.chained) chained.push_back({m.name(), polyalg::to_string(c)});
    arr.push_back(json{{"moment", row.phi.name()},
                       {"V", polyalg::to_string(row.V)},
                       {"rhs", terms},
                       {"chained", chained}});
  }
  json minimal = json::array();
  for (const auto& m : lorenz::minimal_moment_set()) minimal.push_back(m.name());
  emit(json{{"kind", "relations-report"},
            {"system", sys.to_json()},
            {"verified", true},
            {"minimal_set", minimal},
            {"relations", arr}},
       out);
  return 0;
}

int run_region(const SystemFlags& sys, double beta_min, double beta_max, int points,
               bool with_bounds, const std::string& out, const std::string& csv) {
  Rational sigma = rat_parse(sys.sigma);
  json rows = json::array();
  std::string csv_text = "beta,sigma,feasible,gamma1,gamma2\n";
  for (int i = 0; i < points; ++i) {
    double b = beta_min + (beta_max - beta_min) * (points == 1 ? 0.0 : double(i) / (points - 1));
    Rational beta = cf_round(b, 1000000L);
    auto reg = lorenz::gamma_feasible(beta, sigma);
    json row{{"beta", rat_str(beta)}, {"sigma", rat_str(sigma)}, {"feasible", reg.feasible}};
    std::string g1, g2;
    if (reg.witness) {
      g1 = rat_str(reg.witness->first);
      g2 = rat_str(reg.witness->second);
      row["gamma1"] = g1;
      row["gamma2"] = g2;
    }
    rows.push_back(row);
    csv_text += rat_str(beta) + "," + rat_str(sigma) + "," + (reg.feasible ? "1" : "0") + "," +
                g1 + "," + g2 + "\n";
  }
  json j{{"kind", "region-report"}, {"sigma", rat_str(sigma)}, {"points", rows}};
  if (with_bounds) {
    auto [lower, upper] = lorenz::z3_region_bounds(sigma);
    j["beta_lower_numeric"] = lower;
    j["beta_upper_exact"] = rat_str(upper);
    j["beta_upper_float"] = to_double(upper);
  }
  emit(j, out);
  if (!csv.empty()) {
    std::ofstream os(csv);
    os << csv_text;
  }
  return 0;
}

int run_report(const SystemFlags& sys, double T, int degree, const std::string& out) {
  LorenzParams p = sys.params();
  dynsim::TrajectoryConfig cfg;
  cfg.t_total = T;
  cfg.t_transient = 100.0;
  auto chaotic = dynsim::time_average(p, lorenz::table_moments(), cfg);
  auto orbit = dynsim::find_periodic_orbit(p, "+-");
  auto orbit_avg = dynsim::orbit_average(p, orbit, lorenz::table_moments());

  // moment groups with identical normalized averages; sharp_builtin groups
  // are covered by the exact z^2/z^3 certificates and the z proportionality
  struct Group {
    std::vector<std::string> moments;
    bool equilibrium_max;  // else maximized on the +- orbit
    bool sharp_builtin;
  };
  std::vector<Group> groups{
      {{"z", "x2", "xy"}, true, true},   {{"y2"}, false, false},
      {{"z2", "xyz"}, true, true},       {{"x2z"}, true, false},
      {{"y2z"}, false, false},           {{"z3", "xyz2"}, true, true},
      {{"x4", "x3y"}, false, false},     {{"x2y2"}, false, false},
      {{"x2z2"}, false, false},          {{"xy3"}, false, false},
      {{"y4"}, false, false},            {{"y2z2"}, false, false},
      {{"z4"}, false, false}};

  bool all_ok = true;
  json rows = json::array();
  for (const auto& g : groups) {
    MomentSpec m = *lorenz::moment_by_name(g.moments.front());
    json row;
    row["moments"] = g.moments;
    row["chaotic_mean"] = chaotic.normalized.at(m);
    double max_known = g.equilibrium_max ? 1.0 : orbit_avg.normalized.at(m);
    row["maximum_mean"] = max_known;
    if (g.sharp_builtin) {
      row["upper_bound"] = 1.0;
      row["bound_kind"] = "sharp-analytic";
      row["tightness"] = "sharp";
    } else {
      pipeline::BoundOptions opt;
      opt.params = p;
      opt.moment = m;
      opt.degree = degree;
      auto res = pipeline::bound_moment(opt);
      if (res.verified) {
        row["upper_bound"] = res.verified_normalized;
        row["bound_kind"] = "verified-degree-" + std::to_string(degree);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f%%",
                      100.0 * (res.verified_normalized - max_known) / max_known);
        row["tightness"] = buf;
      } else {
        row["upper_bound"] = nullptr;
        row["bound_kind"] = "unavailable";
        all_ok = false;
      }
    }
    rows.push_back(row);
  }
  json j{{"kind", "table-report"},
         {"system", sys.to_json()},
         {"horizon", T},
         {"degree", degree},
         {"orbit_period", orbit.period},
         {"rows", rows}};
  emit(j, out);
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigorous bounds on infinite-time averages of the Lorenz system via "
               "sum-of-squares relaxation"};
  app.set_config("--config", "", "read options from a key=value config file");
  app.require_subcommand(1);

  std::function<int()> action;

  auto* cb = app.add_subcommand("bound", "solve the upper-bound SDP for one moment and certify");
  SystemFlags sys_bound;
  sys_bound.attach(cb);
  std::string b_moment;
  int b_degree = 4;
  std::string b_rescale = "20", b_out, b_problem, b_solution, b_cert, b_denmax = "1000000";
  bool b_nocert = false;
  cb->add_option("--moment", b_moment, "moment name, e.g. z, y2, x2z")->required();
  cb->add_option("--degree", b_degree, "degree of the auxiliary function V")
      ->capture_default_str();
  cb->add_option("--rescale", b_rescale, "state rescale factor (rational)")
      ->capture_default_str();
  cb->add_option("--denmax", b_denmax, "denominator limit for rational projection")
      ->capture_default_str();
  cb->add_flag("--no-certify", b_nocert, "skip the rational certification step");
  cb->add_option("-o,--output", b_out, "write the report here instead of stdout");
  cb->add_option("--emit-problem", b_problem, "write problem.json (SDP + affine system)");
  cb->add_option("--emit-solution", b_solution, "write solution.json");
  cb->add_option("--emit-certificate", b_cert, "write certificate.json");
  cb->callback([&] {
    action = [&] {
      return run_bound(sys_bound, b_moment, b_degree, b_rescale, b_nocert, b_denmax, b_out,
                       b_problem, b_solution, b_cert);
    };
  });

  auto* cc = app.add_subcommand("certify", "emit a certificate file (builtin or solved)");
  SystemFlags sys_cert;
  sys_cert.attach(cc);
  std::string c_builtin, c_moment, c_rescale = "20", c_out;
  int c_degree = 4;
  cc->add_option("--builtin", c_builtin, "z2, z3 or xy3 (symbolic r)");
  cc->add_option("--moment", c_moment, "moment to bound and certify");
  cc->add_option("--degree", c_degree)->capture_default_str();
  cc->add_option("--rescale", c_rescale)->capture_default_str();
  cc->add_option("-o,--output", c_out);
  cc->callback([&] {
    action = [&] {
      return run_certify(sys_cert, c_builtin, c_moment, c_degree, c_rescale, c_out);
    };
  });

  auto* cv = app.add_subcommand("verify", "check a certificate file in exact arithmetic");
  std::string v_path, v_out;
  cv->add_option("certificate", v_path, "certificate.json path")->required();
  cv->add_option("-o,--output", v_out);
  cv->callback([&] {
    action = [&] { return run_verify(v_path, v_out); };
  });

  auto* ca = app.add_subcommand("average", "chaotic time averages of the eighteen moments");
  SystemFlags sys_avg;
  sys_avg.attach(ca);
  double a_T = 1e5, a_dt = 1e-3, a_tr = 100.0;
  std::vector<double> a_x0{1.0, 1.0, 1.0};
  std::string a_out;
  ca->add_option("--T", a_T, "total horizon")->capture_default_str();
  ca->add_option("--dt", a_dt)->capture_default_str();
  ca->add_option("--transient", a_tr)->capture_default_str();
  ca->add_option("--x0", a_x0, "initial state")->expected(3);
  ca->add_option("-o,--output", a_out);
  ca->callback([&] {
    action = [&] { return run_average(sys_avg, a_T, a_dt, a_tr, a_x0, a_out); };
  });

  auto* co = app.add_subcommand("orbit", "periodic orbit by multiple shooting, plus averages");
  SystemFlags sys_orb;
  sys_orb.attach(co);
  std::string o_sym = "+-", o_out, o_csv;
  co->add_option("--symbols", o_sym, "winding sequence: +- or ++-")->capture_default_str();
  co->add_option("-o,--output", o_out);
  co->add_option("--csv", o_csv, "write sampled orbit states as CSV");
  co->callback([&] {
    action = [&] { return run_orbit(sys_orb, o_sym, o_out, o_csv); };
  });

  auto* cr = app.add_subcommand("relations", "the moment-relation table, verified symbolically");
  SystemFlags sys_rel;
  sys_rel.attach(cr);
  std::string r_out;
  cr->add_option("-o,--output", r_out);
  cr->callback([&] {
    action = [&] { return run_relations(sys_rel, r_out); };
  });

  auto* cg = app.add_subcommand("region", "z^3 certificate feasibility in the (beta,sigma) plane");
  SystemFlags sys_reg;
  sys_reg.attach(cg);
  double g_bmin = 0.03, g_bmax = 11.0;
  int g_points = 15;
  bool g_bounds = false;
  std::string g_out, g_csv;
  cg->add_option("--beta-min", g_bmin)->capture_default_str();
  cg->add_option("--beta-max", g_bmax)->capture_default_str();
  cg->add_option("--points", g_points)->capture_default_str();
  cg->add_flag("--bounds", g_bounds, "also compute the beta interval limits at this sigma");
  cg->add_option("-o,--output", g_out);
  cg->add_option("--csv", g_csv);
  cg->callback([&] {
    action = [&] {
      return run_region(sys_reg, g_bmin, g_bmax, g_points, g_bounds, g_out, g_csv);
    };
  });

  auto* cp = app.add_subcommand("report", "summary table: means, maxima, best bounds, tightness");
  SystemFlags sys_rep;
  sys_rep.attach(cp);
  double p_T = 2e4;
  int p_degree = 6;
  std::string p_out;
  cp->add_option("--T", p_T, "chaotic averaging horizon")->capture_default_str();
  cp->add_option("--degree", p_degree, "V degree for solved bounds")->capture_default_str();
  cp->add_option("-o,--output", p_out);
  cp->callback([&] {
    action = [&] { return run_report(sys_rep, p_T, p_degree, p_out); };
  });

  try {
    app.parse(argc, argv);
    return action ? action() : 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
