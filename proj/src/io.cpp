#include "sosbound/io.hpp"

#include <fstream>

namespace sosbound::io {

using polyalg::RPoly;
using polyalg::VarSetPtr;

json instance_to_json(const sosform::SDPInstance& inst) {
  json j;
  j["blocks"] = inst.block_dims;
  j["free_names"] = inst.free_names;
  j["objective"] = inst.objective;
  j["maximize"] = inst.maximize;
  j["phi_degree"] = inst.phi_degree;
  j["free_degree_weight"] = inst.free_degree_weight;
  j["basis_degrees"] = inst.basis_degrees;
  j["structurally_infeasible"] = inst.structurally_infeasible;
  if (!inst.note.empty()) j["note"] = inst.note;
  json cons = json::array();
  for (const auto& c : inst.constraints) {
    json jc;
    jc["rhs"] = c.rhs;
    jc["monomial"] = c.monomial;
    jc["degree"] = c.monomial_degree;
    json terms = json::array();
    for (const auto& t : c.terms) terms.push_back({t.block, t.i, t.j, t.coeff});
    jc["terms"] = terms;
    json free_terms = json::array();
    for (const auto& [k, v] : c.free_terms) free_terms.push_back({k, v});
    jc["free"] = free_terms;
    cons.push_back(jc);
  }
  j["constraints"] = cons;
  return j;
}

sosform::SDPInstance instance_from_json(const json& j) {
  sosform::SDPInstance inst;
  inst.block_dims = j.at("blocks").get<std::vector<int>>();
  inst.free_names = j.at("free_names").get<std::vector<std::string>>();
  inst.objective = j.at("objective").get<std::vector<double>>();
  inst.maximize = j.at("maximize").get<bool>();
  inst.phi_degree = j.value("phi_degree", 0);
  inst.free_degree_weight = j.value("free_degree_weight", std::vector<int>{});
  inst.basis_degrees = j.value("basis_degrees", std::vector<std::vector<int>>{});
  inst.structurally_infeasible = j.value("structurally_infeasible", false);
  inst.note = j.value("note", std::string{});
  for (const auto& jc : j.at("constraints")) {
    sosform::SdpConstraint c;
    c.rhs = jc.at("rhs").get<double>();
    c.monomial = jc.value("monomial", std::string{});
    c.monomial_degree = jc.value("degree", 0);
    for (const auto& t : jc.at("terms"))
      c.terms.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(),
                         t.at(3).get<double>()});
    for (const auto& t : jc.at("free"))
      c.free_terms.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
    inst.constraints.push_back(std::move(c));
  }
  return inst;
}

json gram_to_json(const sosform::GramProblem& g) {
  json j;
  json bs = json::array(), ba = json::array();
  for (const auto& b : g.basis.sym) bs.push_back(polyalg::to_string(b));
  for (const auto& b : g.basis.anti) ba.push_back(polyalg::to_string(b));
  j["basis_s"] = bs;
  j["basis_a"] = ba;
  j["scalars"] = g.scalar_names;
  if (g.objective) {
    j["objective"] = *g.objective;
    j["maximize"] = g.maximize;
  }
  json rows = json::array();
  for (size_t i = 0; i < g.a.rows(); ++i) {
    json row;
    row["monomial"] = polyalg::monomial_str(g.s.poly.vars(), g.row_monomials[i]);
    row["rhs"] = rat_str(g.rhs[i]);
    json cols = json::array();
    for (size_t c = 0; c < g.a.cols(); ++c)
      if (g.a.at(i, c) != 0) cols.push_back({c, rat_str(g.a.at(i, c))});
    row["cols"] = cols;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["nqs"] = g.nqs;
  j["nqa"] = g.nqa;
  return j;
}

json solution_to_json(const sdpsolve::SDPSolution& sol) {
  json j;
  j["status"] = sdpsolve::status_name(sol.status);
  j["objective_value"] = sol.objective_value;
  j["duality_gap"] = sol.duality_gap;
  j["primal_residual"] = sol.primal_residual;
  j["dual_residual"] = sol.dual_residual;
  j["min_block_eigenvalue"] = sol.min_block_eigenvalue;
  j["iterations"] = sol.iterations;
  j["free_scalars"] = sol.free_scalars;
  json blocks = json::array();
  for (const auto& b : sol.gram_blocks) {
    json rows = json::array();
    for (int i = 0; i < b.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < b.cols(); ++k) row.push_back(b(i, k));
      rows.push_back(row);
    }
    blocks.push_back(rows);
  }
  j["gram_blocks"] = blocks;
  j["trace"] = sol.trace;
  return j;
}

namespace {

json ratmat_to_json(const ratlin::RatMat& m) {
  json rows = json::array();
  for (size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (size_t k = 0; k < m.cols(); ++k) row.push_back(rat_str(m.at(i, k)));
    rows.push_back(row);
  }
  return rows;
}

ratlin::RatMat ratmat_from_json(const json& j) {
  size_t rows = j.size();
  size_t cols = rows ? j.at(0).size() : 0;
  ratlin::RatMat m(rows, cols);
  for (size_t i = 0; i < rows; ++i)
    for (size_t k = 0; k < cols; ++k) m.at(i, k) = rat_parse(j.at(i).at(k).get<std::string>());
  return m;
}

}  // namespace

json certificate_to_json(const CertificateFile& file) {
  const auto& cert = file.cert;
  const auto& vs = cert.phi.vars();
  json j;
  j["kind"] = "certificate";
  j["name"] = file.name;
  j["sense"] = (cert.sense == sosform::Sense::Upper) ? "upper" : "lower";
  json sys;
  sys["beta"] = rat_str(file.params.beta);
  sys["sigma"] = rat_str(file.params.sigma);
  sys["r"] = file.params.r ? rat_str(*file.params.r) : "symbolic";
  sys["scale"] = rat_str(file.scale);
  j["system"] = sys;
  j["state_vars"] = vs.state_vars();
  j["param_vars"] = vs.param_vars();
  j["phi"] = polyalg::to_string(cert.phi);
  j["V"] = polyalg::to_string(cert.V);
  j["bound"] = polyalg::to_string(cert.bound_value);
  json bs = json::array(), ba = json::array();
  for (const auto& b : cert.basis.sym) bs.push_back(polyalg::to_string(b));
  for (const auto& b : cert.basis.anti) ba.push_back(polyalg::to_string(b));
  j["basis_s"] = bs;
  j["basis_a"] = ba;
  j["gram_s"] = ratmat_to_json(cert.gram_s);
  j["gram_a"] = ratmat_to_json(cert.gram_a);
  json aux = json::array();
  for (const auto& c : cert.aux_coeffs) aux.push_back(rat_str(c));
  j["aux_coeffs"] = aux;
  return j;
}

CertificateFile certificate_from_json(const json& j) {
  if (j.value("kind", "") != "certificate")
    throw std::invalid_argument("certificate_from_json: not a certificate file");
  CertificateFile file;
  file.name = j.value("name", "");
  VarSetPtr vars = polyalg::make_varset(j.at("state_vars").get<std::vector<std::string>>(),
                                        j.at("param_vars").get<std::vector<std::string>>());
  auto parse = [&](const std::string& s) { return polyalg::parse_poly(vars, s); };
  file.cert.sense =
      (j.at("sense").get<std::string>() == "upper") ? sosform::Sense::Upper : sosform::Sense::Lower;
  const json& sys = j.at("system");
  file.params.beta = rat_parse(sys.at("beta").get<std::string>());
  file.params.sigma = rat_parse(sys.at("sigma").get<std::string>());
  std::string rs = sys.at("r").get<std::string>();
  if (rs == "symbolic")
    file.params.r.reset();
  else
    file.params.r = rat_parse(rs);
  file.scale = rat_parse(sys.value("scale", "1"));
  file.cert.phi = parse(j.at("phi").get<std::string>());
  file.cert.V = parse(j.at("V").get<std::string>());
  file.cert.bound_value = parse(j.at("bound").get<std::string>());
  file.cert.basis.sym.clear();
  file.cert.basis.anti.clear();
  for (const auto& s : j.at("basis_s")) file.cert.basis.sym.push_back(parse(s.get<std::string>()));
  for (const auto& s : j.at("basis_a")) file.cert.basis.anti.push_back(parse(s.get<std::string>()));
  file.cert.gram_s = ratmat_from_json(j.at("gram_s"));
  file.cert.gram_a = ratmat_from_json(j.at("gram_a"));
  for (const auto& s : j.value("aux_coeffs", json::array()))
    file.cert.aux_coeffs.push_back(rat_parse(s.get<std::string>()));
  return file;
}

std::vector<RPoly> certificate_field(const CertificateFile& file) {
  VarSetPtr vars = file.cert.phi.vars_ptr();
  if (!file.params.r) {
    lorenz::LorenzParams p = file.params;
    return lorenz::vector_field(p, vars);
  }
  if (file.scale == 1) return lorenz::vector_field(file.params, vars);
  // scaled dynamics share the state variable set
  auto f = lorenz::vector_field_scaled(file.params, file.scale);
  if (*f[0].vars_ptr() != *vars)
    throw std::invalid_argument("certificate_field: variable set mismatch");
  return f;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace sosbound::io
