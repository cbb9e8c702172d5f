#ifndef DISCOP_COUPLING_HPP
#define DISCOP_COUPLING_HPP

#include "discop/joint.hpp"
#include "discop/marginal.hpp"

namespace discop {

/// Maximal coupling of two marginals: the diagonal cell (s,s) receives
/// min(p1(s), p2(s)), which maximizes the total diagonal mass; the leftover
/// row/column masses are matched by the northwest-corner rule (both indices
/// scanned ascending, assigning the smaller remaining residual). The
/// northwest-corner completion is this library's fixed tie-breaking
/// convention; the diagonal is the canonical part.
JointPmf maximal_coupling(const Marginal& p1, const Marginal& p2);

} // namespace discop

#endif
