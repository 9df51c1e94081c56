#include "sosbound/pipeline.hpp"

namespace sosbound::pipeline {

using lorenz::MomentSpec;
using polyalg::RPoly;
using sdpsolve::SolveStatus;

Rational normalized_exact(const Rational& scaled_bound, const Rational& scale,
                          const MomentSpec& moment, const lorenz::LorenzParams& p) {
  Rational original = scaled_bound * rat_pow(scale, moment.degree());
  return original / lorenz::moment_at_nonzero_eq(moment, p);
}

namespace {

BoundResult attempt(const BoundOptions& opt, const Rational& scale) {
  BoundResult res;
  res.moment = opt.moment;
  res.degree = opt.degree;
  res.rescale_used = scale;

  auto vars = lorenz::state_vars();
  std::vector<RPoly> f = lorenz::vector_field_scaled(opt.params, scale);
  RPoly phi = opt.moment.poly(vars);

  sosform::AuxAnsatz ansatz;  // degree 0 = constant V, deliberately empty
  if (opt.degree > 0) ansatz = sosform::gen_lorenz_V_basis(opt.degree, false, vars);

  sosform::SFunction s = sosform::build_bound_poly(
      phi, f, ansatz, sosform::Sense::Upper, sosform::BoundAnsatz::unknown_only(vars, "U"));
  sosform::BasisPair basis = sosform::gen_basis_pair(s);
  res.gram = sosform::assemble_gram_constraints(s, basis);
  res.conversion = sosform::to_sdp(res.gram);
  res.solution = sdpsolve::solve(res.conversion.instance, opt.solver);
  res.status = res.solution.status;
  res.iterations = res.solution.iterations;

  Rational unscale = rat_pow(scale, opt.moment.degree());
  if (res.solution.free_scalars.count("U")) {
    double u_scaled = res.solution.free_scalars.at("U");
    res.numeric_bound = u_scaled * to_double(unscale);
    res.numeric_normalized = lorenz::normalize(res.numeric_bound, opt.moment, opt.params);
  }
  if (res.status != SolveStatus::Optimal && res.status != SolveStatus::Marginal) {
    // best iterate attached; value reported but unconverged and uncertified
    res.note = "solver status " + std::string(sdpsolve::status_name(res.status));
    return res;
  }

  if (opt.certify) {
    certify::Resolver resolver = [&](const sosform::SDPInstance& inst) {
      return sdpsolve::solve(inst, opt.solver);
    };
    double u_scaled = res.solution.free_scalars.at("U");
    certify::EnclosureReport enc =
        certify::enclose_upper(res.gram, res.solution, res.conversion,
                               certify::default_padding_schedule(u_scaled), resolver,
                               opt.denominator_limit);
    res.verified = enc.verified;
    if (enc.verified) {
      res.verified_bound = enc.verified_bound * unscale;
      res.verified_normalized =
          to_double(normalized_exact(enc.verified_bound, scale, opt.moment, opt.params));
      res.padding = enc.padding;
      io::CertificateFile file;
      file.cert = enc.certificate;
      file.params = opt.params;
      file.scale = scale;
      file.name = opt.moment.name() + "-degree" + std::to_string(opt.degree);
      res.certificate = std::move(file);
    }
    res.note = enc.note;
  }
  return res;
}

}  // namespace

BoundResult bound_moment(const BoundOptions& opt) {
  if (!opt.params.r) throw std::invalid_argument("bound_moment: numeric r required");
  BoundResult first = attempt(opt, opt.rescale);
  if (first.status == SolveStatus::Optimal || first.status == SolveStatus::Marginal)
    return first;
  for (const Rational& scale : opt.retry_rescales) {
    if (scale == opt.rescale) continue;
    BoundResult retry = attempt(opt, scale);
    if (retry.status == SolveStatus::Optimal || retry.status == SolveStatus::Marginal) {
      retry.note += " (rescale " + rat_str(scale) + ")";
      return retry;
    }
  }
  return first;
}

}  // namespace sosbound::pipeline
