#include <doctest.h>

#include <cstdio>

#include "sosbound/io.hpp"
#include "sosbound/pipeline.hpp"

using namespace sosbound;
using namespace sosbound::certify;
using lorenz::Builtin;
using lorenz::LorenzParams;
using polyalg::RPoly;

TEST_CASE("check_psd_exact witnesses") {
  ratlin::RatMat pd(2, 2);
  pd.at(0, 0) = 2;
  pd.at(0, 1) = pd.at(1, 0) = 1;
  pd.at(1, 1) = 2;
  auto d = check_psd_exact(pd);
  CHECK(d.psd);
  CHECK(d.factorization.has_value());

  ratlin::RatMat ind(2, 2);
  ind.at(0, 0) = 1;
  ind.at(0, 1) = ind.at(1, 0) = 2;
  ind.at(1, 1) = 1;
  auto w = check_psd_exact(ind);
  CHECK(!w.psd);
  CHECK(w.witness.find("alternation") != std::string::npos);

  CHECK(check_psd_exact(ratlin::RatMat(3, 3)).psd);  // zero matrix
}

TEST_CASE("z^2 certificate verifies for several parameter pairs") {
  for (auto [b, s] : {std::pair<Rational, Rational>{Rational(8, 3), 10},
                      {Rational(1), Rational(1)},
                      {Rational(4), Rational(2)}}) {
    LorenzParams p = LorenzParams::symbolic(b, s);
    auto cert = lorenz::builtin_certificate(Builtin::Z2, p);
    auto f = lorenz::builtin_certificate_field(Builtin::Z2, p, cert.phi.vars_ptr());
    auto rep = verify_certificate(cert, cert.phi, f, cert.V);
    CHECK_MESSAGE(rep.ok, rep.detail);

    // S_U is exactly [z-(r-1)]^2 + (2/beta)(x-y)^2
    auto vars = cert.phi.vars_ptr();
    RPoly su = cert.bound_value - cert.phi - polyalg::lie_derivative(cert.V, f);
    auto zr = RPoly::variable(vars, "z") - RPoly::variable(vars, "r") + RPoly::constant(vars, 1);
    auto xy = RPoly::variable(vars, "x") - RPoly::variable(vars, "y");
    CHECK(su == zr * zr + (xy * xy).scaled(2 / b));

    // sharp bound: S_U vanishes exactly on the saturating equilibria
    RPoly at_eq = su.substituted("z", RPoly::variable(vars, "r") - RPoly::constant(vars, 1))
                      .substituted("x", RPoly::variable(vars, "y"));
    CHECK(at_eq.is_zero());
  }
}

TEST_CASE("tampered certificate is rejected with the offending monomial") {
  LorenzParams p = LorenzParams::symbolic(Rational(8, 3), 10);
  auto cert = lorenz::builtin_certificate(Builtin::Z3, p);
  auto f = lorenz::builtin_certificate_field(Builtin::Z3, p, cert.phi.vars_ptr());
  REQUIRE(verify_certificate(cert, cert.phi, f, cert.V).ok);

  auto bad = cert;
  bad.gram_s.at(0, 1) += Rational(1, 1000);
  bad.gram_s.at(1, 0) += Rational(1, 1000);
  auto rep = verify_certificate(bad, bad.phi, f, bad.V);
  CHECK(!rep.ok);
  CHECK(rep.detail.find("mismatch") != std::string::npos);
}

TEST_CASE("sos decomposition of the z^2 certificate") {
  LorenzParams p = LorenzParams::symbolic(Rational(8, 3), 10);
  auto cert = lorenz::builtin_certificate(Builtin::Z2, p);
  auto terms = sos_decompose(cert);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].weight == 1);
  CHECK(polyalg::to_string(terms[0].square) == "z - r + 1");
  CHECK(terms[1].weight == 2 / p.beta);
  CHECK(polyalg::to_string(terms[1].square) == "x - y");

  // idempotence: re-expanding reproduces the Gram expansion exactly
  CHECK(expand_sos(terms) == sosform::expand_gram(cert.basis, cert.gram_s, cert.gram_a));
}

TEST_CASE("sos decomposition of the xy^3 certificate") {
  Rational beta(8, 3);
  LorenzParams p = LorenzParams::symbolic(beta, 10);
  auto cert = lorenz::builtin_certificate(Builtin::XY3, p);
  auto terms = sos_decompose(cert);
  REQUIRE(terms.size() == 3);
  // the y^4 square carries weight -(beta^2 - 12 beta + 4)/(4 beta)
  Rational expected = -(beta * beta - 12 * beta + 4) / (4 * beta);
  bool found = false;
  for (const auto& t : terms)
    if (polyalg::to_string(t.square) == "y^2") {
      found = true;
      CHECK(t.weight == expected);
    }
  CHECK(found);
  CHECK(expand_sos(terms) == sosform::expand_gram(cert.basis, cert.gram_s, cert.gram_a));

  auto f = lorenz::builtin_certificate_field(Builtin::XY3, p, cert.phi.vars_ptr());
  CHECK(verify_certificate(cert, cert.phi, f, cert.V).ok);
}

TEST_CASE("projection recovers the exact z^2 solution at zero padding") {
  // set up the reduced z^2 problem, solve it numerically, project
  LorenzParams p;
  auto vars = lorenz::state_vars_with(lorenz::ParamVar::R);
  LorenzParams symbolic = p;
  symbolic.r.reset();
  auto f = lorenz::vector_field(symbolic, vars);
  auto z = RPoly::variable(vars, "z");
  auto ansatz = sosform::gen_lorenz_V_basis(2, true, vars);
  auto r1 = RPoly::variable(vars, "r") - RPoly::constant(vars, 1);
  sosform::BoundAnsatz bound{r1 * r1, "u0"};
  auto s = sosform::build_bound_poly(z * z, f, ansatz, sosform::Sense::Upper, bound);
  auto red = sosform::reduce_basis(sosform::gen_basis_pair(s),
                                   {{"z", r1}, {"x", RPoly::variable(vars, "y")}});
  auto g = sosform::assemble_gram_constraints(s, red);
  auto conv = sosform::to_sdp(g);
  auto sol = sdpsolve::solve(conv.instance);
  REQUIRE((sol.status == sdpsolve::SolveStatus::Optimal ||
           sol.status == sdpsolve::SolveStatus::Marginal));

  // oracle: the affine system alone has the unique exact solution
  auto exact = ratlin::solve(g.a, g.rhs);
  REQUIRE(exact.has_value());

  auto pr = project_to_rational(sol, conv, g, BigInt(1000000), Rational(0));
  REQUIRE_MESSAGE(pr.ok, pr.note);
  CHECK(pr.certificate.gram_s.at(0, 0) == 1);
  CHECK(pr.certificate.gram_a.at(0, 0) == 2 / p.beta);
  CHECK(pr.scalar_values.at("u0") == 0);
  CHECK(pr.certificate.gram_s.at(0, 0) == (*exact)[g.qs_col(0, 0)]);

  auto rep = verify_certificate(pr.certificate, pr.certificate.phi, f, pr.certificate.V);
  CHECK_MESSAGE(rep.ok, rep.detail);
  // the verified bound polynomial is exactly (r-1)^2
  CHECK(pr.certificate.bound_value == r1 * r1);
}

TEST_CASE("enclosure of the degree-4 y^2 bound") {
  pipeline::BoundOptions opt;
  opt.moment = lorenz::MomentSpec{0, 2, 0};
  opt.degree = 4;
  opt.certify = true;
  auto res = pipeline::bound_moment(opt);
  REQUIRE((res.status == sdpsolve::SolveStatus::Optimal ||
           res.status == sdpsolve::SolveStatus::Marginal));
  CHECK(res.numeric_normalized == doctest::Approx(1.2585).epsilon(2e-3));
  REQUIRE_MESSAGE(res.verified, res.note);
  // never below the numeric optimum (up to the rational snapping slack)
  CHECK(res.verified_normalized >= res.numeric_normalized - 1e-8);
  CHECK(res.verified_normalized <= res.numeric_normalized + 2e-3);

  // certificate round-trips through the file format and re-verifies alone
  REQUIRE(res.certificate.has_value());
  auto j = io::certificate_to_json(*res.certificate);
  std::string path = "test_cert_y2.json";
  io::save_json(j, path);
  auto loaded = io::certificate_from_json(io::load_json(path));
  auto f = io::certificate_field(loaded);
  auto rep = verify_certificate(loaded.cert, loaded.cert.phi, f, loaded.cert.V);
  CHECK_MESSAGE(rep.ok, rep.detail);
  std::remove(path.c_str());
}

TEST_CASE("zero padding fails on a marginal full-basis optimum") {
  // the sharp degree-2 z problem is marginally feasible at its optimum, so
  // rounding at zero padding must land outside the cone
  pipeline::BoundOptions opt;
  opt.moment = lorenz::MomentSpec{0, 0, 1};
  opt.degree = 2;
  opt.certify = false;
  auto res = pipeline::bound_moment(opt);
  REQUIRE((res.status == sdpsolve::SolveStatus::Optimal ||
           res.status == sdpsolve::SolveStatus::Marginal));
  CHECK(res.solution.min_block_eigenvalue < 1e-5);

  auto pr = project_to_rational(res.solution, res.conversion, res.gram, BigInt(1000000),
                                Rational(0));
  CHECK(!pr.ok);

  // and the schedule recovers with a positive padding
  certify::Resolver resolver = [&](const sosform::SDPInstance& inst) {
    return sdpsolve::solve(inst);
  };
  auto enc = enclose_upper(res.gram, res.solution, res.conversion,
                           default_padding_schedule(res.solution.free_scalars.at("U")),
                           resolver);
  REQUIRE_MESSAGE(enc.verified, enc.note);
  CHECK(enc.padding > 0);
  CHECK(enc.verified_bound >= rational_from_double(enc.numeric_optimum) - Rational(1, 100000000));
}
