#ifndef DISCOP_JOINT_HPP
#define DISCOP_JOINT_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "discop/copula.hpp"
#include "discop/marginal.hpp"

namespace discop {

/// A dense joint pmf over the product grid [z1] x ... x [zn], stored
/// row-major with the LAST dimension fastest.
class JointPmf {
public:
    JointPmf(std::vector<int> shape, std::vector<double> mass);

    int dims() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    std::size_t cell_count() const { return mass_.size(); }
    std::span<const double> mass() const { return mass_; }

    /// Mass of cell s (1-based multi-index).
    double mass_at(std::span<const int> cell) const;
    /// Cumulative mass of the lower-orthant box {t : t_i <= s_i}; coordinates
    /// may be 0 (empty in that dimension) up to z_i.
    double cdf(std::span<const int> cell) const;
    /// Marginal pmf of dimension dim (1-based), by summing out the others.
    Marginal marginal_of(int dim) const;

    std::size_t linear_index(std::span<const int> cell) const;

private:
    std::vector<int> shape_;
    std::vector<double> mass_;
    std::vector<std::size_t> strides_;
};

/// Joint distribution of a copula and a profile of marginals: each cell gets
/// the copula measure of its marginal-cdf box, computed cell-wise by
/// inclusion-exclusion over copula values memoized on the cdf lattice.
/// The marginals of the result reproduce the profile.
JointPmf build_joint(const Copula& copula, const Profile& profile);

} // namespace discop

#endif
