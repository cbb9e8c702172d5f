#ifndef DISCOP_NORMAL_HPP
#define DISCOP_NORMAL_HPP

#include <cstdint>
#include <span>

namespace discop::normal {

/// Standard normal density.
double pdf(double x);

/// Standard normal distribution function, accurate to ~1 ulp via erfc.
double cdf(double x);

/// Inverse of cdf. Returns -inf at 0 and +inf at 1. Acklam's rational
/// approximation polished with one Halley step; absolute error well below
/// 1e-13 on (0,1).
double quantile(double p);

/// Bivariate normal P(X <= a, Y <= b) with correlation rho.
/// Drezner & Wesolowsky single-integral method with the high-correlation
/// asymptotic branch of Genz's BVND; fixed-order Gauss-Legendre nodes.
double bvn_cdf(double a, double b, double rho);

/// Trivariate normal P(X1 <= a1, X2 <= a2, X3 <= a3) for correlations
/// r12, r13, r23. Genz (2004): the two smallest correlations are deformed
/// from zero along an arcsine path and the derivative is integrated with an
/// adaptive Gauss-Kronrod rule. Handles semidefinite matrices.
double tvn_cdf(double a1, double a2, double a3, double r12, double r13, double r23);

struct QmcEstimate {
    double value;
    double error; // ~3 sigma across lattice shifts
};

/// P(X <= upper) for an n-variate normal with correlation matrix sigma
/// (row-major n x n), by separation-of-variables over a shifted Kronecker
/// lattice. Deterministic for a fixed seed. Semidefinite matrices are
/// handled by treating zero-variance conditionals as indicators.
QmcEstimate mvn_cdf_qmc(std::span<const double> upper, std::span<const double> sigma, int n,
                        std::uint64_t seed);

/// Eigenvalues of a symmetric n x n matrix (row-major), ascending, by cyclic
/// Jacobi rotations. Intended for the small matrices used here (n <= 8).
void symmetric_eigenvalues(std::span<const double> matrix, int n, std::span<double> eigs_out);

} // namespace discop::normal

#endif
