#pragma once

// JSON exchange formats.
//
// problem.json  : {"kind":"sdp-problem", "sdp":{...}, "gram":{...}}: the
//                  float standard-form instance (round-trippable, so solver
//                  backends can be swapped) plus the exact affine system for
//                  reference.
// solution.json : all SDPSolution fields and the iteration trace.
// certificate.json: self-contained proof object: system definition
//                  (beta, sigma, r or symbolic parameter, state rescale),
//                  phi, V, bound, basis pair and rational Gram entries, all
//                  polynomials in the textual form of polyalg.

#include <json.hpp>

#include "sosbound/certify.hpp"
#include "sosbound/lorenz.hpp"

namespace sosbound::io {

using nlohmann::json;

json instance_to_json(const sosform::SDPInstance& inst);
sosform::SDPInstance instance_from_json(const json& j);

json gram_to_json(const sosform::GramProblem& g);

json solution_to_json(const sdpsolve::SDPSolution& sol);

struct CertificateFile {
  certify::RationalCertificate cert;
  lorenz::LorenzParams params;
  Rational scale{1};       // state rescale the certificate's system uses
  std::string name;        // e.g. "z2", "y2-degree4"
};

json certificate_to_json(const CertificateFile& file);
CertificateFile certificate_from_json(const json& j);

// Dynamics the certificate is stated for, reconstructed from its system
// definition alone.
std::vector<polyalg::RPoly> certificate_field(const CertificateFile& file);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

}  // namespace sosbound::io
