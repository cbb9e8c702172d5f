#ifndef DISCOP_TABLE_HPP
#define DISCOP_TABLE_HPP

#include <string>

#include "discop/joint.hpp"

namespace discop {

/// Render a value as a reduced fraction p/q (q <= 256) when it is within
/// 1e-12 of one, else as a decimal with 9 significant digits.
std::string fraction_string(double v);

/// Human-readable table of a joint pmf. Two-dimensional joints get the
/// bordered layout (rows = dimension 1, columns = dimension 2, row marginal
/// p1 in the right border, column marginal p2 in the bottom border).
/// One-dimensional joints get a two-column list; higher dimensions are
/// rendered as a sequence of 2-D slices over the trailing dimensions.
std::string render_table(const JointPmf& joint);

} // namespace discop

#endif
