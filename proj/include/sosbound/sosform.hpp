#pragma once

// From auxiliary-function ansatz to block-diagonal SDP.
//
// Given a target average phi, dynamics f, an ansatz V = sum_i c_i B_i and a
// bound ansatz, the bound polynomial is
//
//   lower sense:  S = phi - L + f.grad(V)      (S >= 0 proves L <= avg phi)
//   upper sense:  S = -[phi - U + f.grad(V)]   (S >= 0 proves avg phi <= U)
//
// with coefficients affine in the c_i and the bound unknown.  The symmetry
// (x,y) -> (-x,-y) splits any Gram basis into symmetric and antisymmetric
// parts with no cross block, so S = b_s'Qs b_s + b_a'Qa b_a.  Matching
// coefficients monomial-by-monomial yields the affine constraint system over
// {Gram entries, c_i, bound unknowns}; redundant rows are eliminated exactly.

#include <optional>
#include <string>
#include <vector>

#include "sosbound/polyalg.hpp"
#include "sosbound/ratlin.hpp"

namespace sosbound::sosform {

using polyalg::LinExpr;
using polyalg::LPoly;
using polyalg::Monomial;
using polyalg::RPoly;
using polyalg::VarSetPtr;

enum class Sense { Lower, Upper };

struct AuxAnsatz {
  std::vector<RPoly> basis_polys;
  std::vector<std::string> coeff_names;  // one unknown per basis poly
};

struct SFunction {
  LPoly poly;
  Sense sense = Sense::Upper;
  std::optional<std::string> bound_unknown;  // present when the bound is optimized
  RPoly phi;                                 // kept for reporting and certificates
  std::map<std::string, int> unknown_degree; // degree of the poly each unknown multiplies
  std::vector<RPoly> ansatz_polys;           // V basis, for reassembling V from c values
  std::vector<std::string> ansatz_names;
  RPoly bound_fixed_part;                    // fixed part of the bound ansatz

  SFunction()
      : poly(polyalg::make_varset({"x", "y", "z"})),
        phi(poly.vars_ptr()),
        bound_fixed_part(poly.vars_ptr()) {}
  explicit SFunction(LPoly p, Sense sn)
      : poly(std::move(p)), sense(sn), phi(poly.vars_ptr()), bound_fixed_part(poly.vars_ptr()) {}
};

// Bound ansatz U (or L) = fixed_part + unknown, fixed_part a polynomial in
// parameter variables only.
struct BoundAnsatz {
  RPoly fixed_part;
  std::optional<std::string> unknown;

  static BoundAnsatz unknown_only(VarSetPtr vars, std::string name) {
    return BoundAnsatz{RPoly::zero(std::move(vars)), std::move(name)};
  }
  static BoundAnsatz fixed(RPoly p) { return BoundAnsatz{std::move(p), std::nullopt}; }
};

SFunction build_bound_poly(const RPoly& phi, const std::vector<RPoly>& f, const AuxAnsatz& ansatz,
                           Sense sense, const BoundAnsatz& bound);

// Admissible Lorenz V basis of the given even degree: all symmetric monomials
// below the top degree, plus top-degree combinations x^p (y^2+z^2)^q (or
// r^s x^p (y^2+z^2-2rz)^q when r is analytic) so that f.grad(V) stays at
// degree(V).  Constants are excluded.
AuxAnsatz gen_lorenz_V_basis(int degree, bool include_r);
AuxAnsatz gen_lorenz_V_basis(int degree, bool include_r, VarSetPtr vars);

struct BasisPair {
  std::vector<RPoly> sym;
  std::vector<RPoly> anti;
};

BasisPair gen_basis_pair(const SFunction& s);

struct Substitution {
  std::string var;
  RPoly value;
};

enum class Block { Sym, Anti };

struct NullVector {
  Block block;
  std::vector<Rational> v;
};

// Restricts each block to the combinations vanishing on the locus defined by
// applying all substitutions simultaneously, then merges away user-supplied
// Gram null directions.  Outputs are content-normalized with positive leading
// coefficient.
BasisPair reduce_basis(const BasisPair& pair, const std::vector<Substitution>& locus,
                       const std::vector<NullVector>& extra_null_vectors = {});

struct UnrepresentableError : std::runtime_error {
  explicit UnrepresentableError(const std::string& monomial)
      : std::runtime_error("monomial not representable in basis: " + monomial),
        monomial_text(monomial) {}
  std::string monomial_text;
};

// Affine system S - (b_s'Qs b_s + b_a'Qa b_a) = 0, one independent row per
// monomial.  Column layout: upper-triangle Qs entries, upper-triangle Qa
// entries, then scalar unknowns (bound unknown last).
struct GramProblem {
  SFunction s;
  BasisPair basis;
  std::vector<std::string> scalar_names;
  std::optional<std::string> objective;
  bool maximize = false;

  ratlin::RatMat a;
  std::vector<Rational> rhs;
  std::vector<Monomial> row_monomials;
  size_t nqs = 0, nqa = 0;  // upper-triangle entry counts

  size_t n_sym() const { return basis.sym.size(); }
  size_t n_anti() const { return basis.anti.size(); }
  size_t qs_col(size_t i, size_t j) const;  // i <= j
  size_t qa_col(size_t i, size_t j) const;
  size_t scalar_col(const std::string& name) const;
};

GramProblem assemble_gram_constraints(const SFunction& s, const BasisPair& basis);

// Exact expansion of b_s'Qs b_s + b_a'Qa b_a.
RPoly expand_gram(const BasisPair& basis, const ratlin::RatMat& qs, const ratlin::RatMat& qa);

// Fixes the bound unknown to an exact value (column folded into the rhs).
GramProblem fix_scalar(const GramProblem& g, const std::string& name, const Rational& value);

// ---------------------------------------------------------------------------
// Standard-form SDP data (float).  <A_i, X> + B_i y = b_i, X block-PSD,
// y free; objective linear in y.

struct SdpTerm {
  int block;
  int i, j;      // i <= j; coefficient multiplies the (i,j)=(j,i) entry once
  double coeff;
};

struct SdpConstraint {
  std::vector<SdpTerm> terms;
  std::vector<std::pair<int, double>> free_terms;  // (free index, coeff)
  double rhs = 0.0;
  int monomial_degree = 0;  // total degree incl. parameters, for rescaling
  std::string monomial;
};

struct SDPInstance {
  std::vector<int> block_dims;
  std::vector<SdpConstraint> constraints;
  std::vector<std::string> free_names;
  std::vector<double> objective;  // per free scalar
  bool maximize = false;
  std::vector<int> free_degree_weight;         // scaling weight per free scalar
  std::vector<std::vector<int>> basis_degrees; // per block, per element
  int phi_degree = 0;
  bool structurally_infeasible = false;
  std::string note;
};

// Recovers eliminated ansatz coefficients from a solved instance.
struct EliminatedScalar {
  std::string name;
  Rational rhs;
  std::vector<std::pair<size_t, Rational>> q_terms;       // gram-column index, coeff
  std::vector<std::pair<std::string, Rational>> s_terms;  // remaining scalar, coeff
};

struct SdpConversion {
  SDPInstance instance;
  std::vector<EliminatedScalar> eliminated;
  // gram column -> (block, i, j)
  std::vector<std::tuple<int, int, int>> q_layout;
  size_t nqs = 0, nqa = 0;
  bool feasibility_mode = false;  // objective is the added min-eigenvalue scalar
};

// Eliminates non-objective scalars exactly, drops dependent rows (never
// perturbs the rhs), converts to float.  A degenerate bound ansatz (no
// objective unknown) becomes a feasibility problem maximizing t with
// blocks >= t I.  With eliminate_scalars=false the ansatz coefficients stay
// in the instance as free variables and every constraint row keeps its
// single-monomial identity (required by sdpsolve::rescale_problem).
SdpConversion to_sdp(const GramProblem& g, bool eliminate_scalars = true);

}  // namespace sosbound::sosform
