#pragma once

// Exact certification of bounds from approximate SDP solutions.
//
// A RationalCertificate is a self-contained proof object: exact-rational Gram
// blocks, a basis pair, the bound value and the auxiliary function V.  It is
// valid when (i) the bound polynomial built from (phi, f, V, bound) equals
// b_s'Qs b_s + b_a'Qa b_a identically in rational arithmetic and (ii) both
// blocks are positive semidefinite, decided exactly.
//
// PSD decisions run two independent exact routes and require agreement:
// Descartes sign alternation on the Faddeev-LeVerrier characteristic
// polynomial, and a pivoted LDL^T elimination.
//
// Approximate solutions become certificates by rounding entries to bounded
// denominators and repairing the affine constraints exactly on a designated
// dependent set (the last entries in constraint-elimination order).  Padding
// the bound creates the slack that keeps the repaired blocks PSD; the
// smallest workable padding in a schedule defines the verified bound.

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sosbound/ratlin.hpp"
#include "sosbound/sdpsolve.hpp"
#include "sosbound/sosform.hpp"

namespace sosbound::certify {

using polyalg::RPoly;
using ratlin::RatMat;
using sosform::BasisPair;
using sosform::GramProblem;
using sosform::SdpConversion;
using sosform::Sense;

struct PsdDecision {
  bool psd = false;
  std::string witness;  // violated coefficient, or "ldlt" when factorized
  std::optional<ratlin::Ldlt> factorization;
};

PsdDecision check_psd_exact(const RatMat& m);

struct RationalCertificate {
  Sense sense = Sense::Upper;
  BasisPair basis;
  RatMat gram_s, gram_a;
  RPoly bound_value;                    // rational polynomial in parameters
  std::vector<Rational> aux_coeffs;    // c_i, aligned with ansatz order
  RPoly V;
  RPoly phi;

  RationalCertificate()
      : bound_value(polyalg::make_varset({"x", "y", "z"})),
        V(bound_value.vars_ptr()),
        phi(bound_value.vars_ptr()) {}
};

struct VerifyReport {
  bool ok = false;
  std::string detail;
};

// true iff S built from (phi, f, V, cert.bound_value, cert.sense) equals the
// expanded Gram form identically and both blocks pass check_psd_exact.
VerifyReport verify_certificate(const RationalCertificate& cert, const RPoly& phi,
                                const std::vector<RPoly>& f, const RPoly& V);

struct ProjectionResult {
  bool ok = false;
  RationalCertificate certificate;
  std::map<std::string, Rational> scalar_values;
  std::string note;
};

// Rounds Gram entries and ansatz coefficients to denominators <= limit, pins
// the bound to `bound_value`, restores the affine system exactly by solving
// for the dependent entries, and decides PSD.  `blocks` follow the basis
// layout (block 0 symmetric, block 1 antisymmetric).
ProjectionResult project_core(const GramProblem& g, const std::vector<Eigen::MatrixXd>& blocks,
                              const std::map<std::string, double>& scalars,
                              const std::optional<Rational>& bound_value,
                              const BigInt& denominator_limit);

// Spec-shaped wrapper: pads the numeric optimum (up for upper bounds, down
// for lower) and projects the given solution.
ProjectionResult project_to_rational(const sdpsolve::SDPSolution& sol, const SdpConversion& conv,
                                     const GramProblem& g, const BigInt& denominator_limit,
                                     const Rational& padding);

struct EnclosureReport {
  bool verified = false;
  Rational verified_bound{0};
  double numeric_optimum = 0.0;
  Rational padding{0};
  RationalCertificate certificate;
  std::string note;
};

using Resolver = std::function<sdpsolve::SDPSolution(const sosform::SDPInstance&)>;

// Walks the padding schedule; each nonzero padding re-solves the fixed-bound
// feasibility problem (max-min-eigenvalue surrogate) for an interior point
// before projecting.  The first success wins.  The lower end of the enclosure
// stays the unverified numeric optimum.
EnclosureReport enclose_upper(const GramProblem& g, const sdpsolve::SDPSolution& sol,
                              const SdpConversion& conv,
                              const std::vector<Rational>& padding_schedule,
                              const Resolver& resolve,
                              const BigInt& denominator_limit = BigInt(1000000));

std::vector<Rational> default_padding_schedule(double numeric_optimum);

struct SosTerm {
  Rational weight;  // > 0
  RPoly square;
};

// Rational-weighted SOS form via natural-order LDL^T on each block: weights
// are the pivots, squares the pivot rows applied to the basis.
std::vector<SosTerm> sos_decompose(const RationalCertificate& cert);

// Re-expands a decomposition (for idempotence checks).
RPoly expand_sos(const std::vector<SosTerm>& terms);

// Gram blocks restored to true values when the conversion ran in feasibility
// mode (X = X' + t I), with the surrogate scalar dropped.
sdpsolve::SDPSolution materialize_feasibility(const SdpConversion& conv,
                                              const sdpsolve::SDPSolution& sol);

}  // namespace sosbound::certify
