#ifndef DISCOP_JSON_IO_HPP
#define DISCOP_JSON_IO_HPP

#include <string>

#include "discop/conformance.hpp"
#include "discop/copula.hpp"
#include "discop/joint.hpp"
#include "discop/marginal.hpp"

namespace discop {

// All emitters produce byte-stable output: fixed field order, numbers
// rendered with up to 17 significant digits ("%.17g"), which round-trips
// doubles exactly. Parse errors throw std::invalid_argument with a
// line/field diagnostic.

std::string format_double(double v);

// Profile <-> JSON array of arrays of numbers, e.g. [[0.5,0.25,0.25],[...]].
Profile parse_profile(const std::string& json);
std::string profile_to_json(const Profile& profile);

// Marginal <-> JSON array of numbers.
Marginal parse_marginal(const std::string& json);
std::string marginal_to_json(const Marginal& marginal);

// CopulaSpec JSON, e.g. {"family":"gaussian","sigma":[[1,0.5],[0.5,1]]},
// {"family":"clayton","theta":2.0,"n":2}, {"family":"independence","n":2}.
// A bare family name is accepted for the parameter-free families. When "n"
// is absent it is taken from sigma (gaussian) or from fallback_dim.
Copula parse_copula_spec(const std::string& json_or_name, int fallback_dim = 0);
std::string copula_to_json(const Copula& copula);

// JointPmf <-> {"shape":[3,4],"mass":[...]} with mass row-major, last
// dimension fastest.
JointPmf parse_joint(const std::string& json);
std::string joint_to_json(const JointPmf& joint);

// CopulaGrid <-> {"n":2,"depth":6,"values":[...]} over the (2^depth+1)^n
// lattice, row-major, last dimension fastest.
CopulaGrid parse_copula_grid(const std::string& json);
std::string copula_grid_to_json(const CopulaGrid& grid);

// ConformanceReport -> {"verdict":...,"trials":...,"worst_violation":...}
// plus a "witness" object on failure that replays deterministically.
std::string report_to_json(const ConformanceReport& report);

// AxiomsReport -> fixed-order JSON object.
std::string axioms_to_json(const AxiomsReport& report);

// Subprocess oracle protocol helpers: {"profile":[[...],...]} requests.
std::string oracle_request_to_json(const Profile& profile);
Profile parse_oracle_request(const std::string& json);

} // namespace discop

#endif
