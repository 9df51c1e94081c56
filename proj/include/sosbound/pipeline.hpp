#pragma once

// formulate -> solve -> certify for one moment bound: scaled Lorenz dynamics
// (exact rational scale), admissible V ansatz of the requested degree, upper
// bound minimized by the interior-point solver, then a rational certificate
// via the padding schedule.  Bounds convert back to original units by the
// exact factor scale^deg(moment).

#include <optional>

#include "sosbound/certify.hpp"
#include "sosbound/dynsim.hpp"
#include "sosbound/io.hpp"
#include "sosbound/lorenz.hpp"
#include "sosbound/sdpsolve.hpp"

namespace sosbound::pipeline {

struct BoundOptions {
  lorenz::LorenzParams params = lorenz::LorenzParams::standard();
  lorenz::MomentSpec moment;
  int degree = 4;
  Rational rescale{20};
  // tried in order when the solve at `rescale` does not converge; conditioning
  // of these SDPs is sensitive to the state scaling
  std::vector<Rational> retry_rescales{Rational(25), Rational(30), Rational(10)};
  sdpsolve::SolverSettings solver;
  BigInt denominator_limit{1000000};
  bool certify = true;
};

struct BoundResult {
  lorenz::MomentSpec moment;
  int degree = 0;
  Rational rescale_used{20};
  double numeric_bound = 0.0;       // original units
  double numeric_normalized = 0.0;  // divided by the value at the nonzero equilibria
  sdpsolve::SolveStatus status = sdpsolve::SolveStatus::NumericalFailure;
  int iterations = 0;
  bool verified = false;
  Rational verified_bound{0};  // original units, exact
  double verified_normalized = 0.0;
  Rational padding{0};
  std::string note;
  std::optional<io::CertificateFile> certificate;  // scaled-system proof object

  sosform::GramProblem gram;
  sosform::SdpConversion conversion;
  sdpsolve::SDPSolution solution;
};

BoundResult bound_moment(const BoundOptions& opt);

// Verified-normalized value as an exact rational (bound * scale^deg / eq).
Rational normalized_exact(const Rational& scaled_bound, const Rational& scale,
                          const lorenz::MomentSpec& moment, const lorenz::LorenzParams& p);

}  // namespace sosbound::pipeline
