#ifndef DISCOP_COPULA_HPP
#define DISCOP_COPULA_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace discop {

enum class CopulaFamily {
    independence,
    frechet_upper,
    gaussian,
    clayton,
    gumbel,
    custom,
};

std::string family_name(CopulaFamily f);

struct AxiomsReport {
    int grid_depth = 0;
    bool grounded = false;
    bool uniform_marginals = false;
    bool n_increasing = false;
    double worst_grounded = 0;   // max |C(x)| over grid points with a zero coordinate
    double worst_marginal = 0;   // max |C(1,..,t,..,1) - t|
    double min_box_mass = 0;     // most negative elementary box mass
    double partition_sum = 0;    // sum of all elementary box masses
    bool pass() const { return grounded && uniform_marginals && n_increasing; }
};

/// A copula C : [0,1]^n -> [0,1].
///
/// Catalogue families are evaluated in closed form except the Gaussian one,
/// which dispatches on dimension: exact erfc-based cdf for n=1, the
/// Drezner-Wesolowsky/Genz integral for n=2, the Genz (2004) single-integral
/// reduction for n=3, and a seeded quasi-Monte Carlo rule for n=4
/// (target accuracy 1e-4). Gaussian with n >= 5 is rejected.
/// Arbitrary externally supplied evaluators can be wrapped with custom().
class Copula {
public:
    static Copula independence(int dim);
    static Copula frechet_upper(int dim);
    /// sigma: row-major n x n correlation matrix, symmetric, unit diagonal,
    /// eigenvalues >= -1e-10.
    static Copula gaussian(std::vector<double> sigma, int dim, std::uint64_t qmc_seed = 0);
    static Copula clayton(int dim, double theta); // theta > 0
    static Copula gumbel(int dim, double theta);  // theta >= 1
    static Copula custom(int dim, std::function<double(std::span<const double>)> fn,
                         std::string name = "custom");

    CopulaFamily family() const { return family_; }
    int dim() const { return dim_; }
    double theta() const { return theta_; }
    std::span<const double> sigma() const { return sigma_; }
    std::string name() const;

    /// True for families that make sense in any dimension (everything except
    /// gaussian, whose dimension is pinned by sigma, and custom).
    bool dimension_generic() const;
    /// Same family and parameters instantiated at another dimension.
    Copula with_dim(int dim) const;

    /// C(x). Requires x.size() == dim() and every coordinate in [0,1].
    double value(std::span<const double> x) const;

    /// Raw inclusion-exclusion mass of the box [lower, upper]; may be
    /// slightly negative from round-off (or genuinely negative for a
    /// non-copula custom evaluator).
    double box_mass_signed(std::span<const double> lower, std::span<const double> upper) const;

    /// Box mass clamped to [0,1]. Round-off down to -round_off_budget() is
    /// clamped to zero; anything more negative is an internal error for
    /// catalogue families and an invalid-copula error for custom evaluators.
    double rectangle_probability(std::span<const double> lower, std::span<const double> upper) const;

    /// Grid check of the three copula axioms (grounded, uniform marginals,
    /// n-increasing) on the dyadic lattice {j/2^k}.
    AxiomsReport check_axioms(int grid_depth) const;

    /// Accuracy the family can be held to: 1e-9 for closed-form families,
    /// 1e-5 for gaussian.
    double default_tolerance() const;
    /// Tolerated negative round-off in box masses.
    double round_off_budget() const;

private:
    Copula() = default;
    double value_unchecked(std::span<const double> x) const;
    double gaussian_value(std::span<const double> x) const;

    CopulaFamily family_ = CopulaFamily::independence;
    int dim_ = 0;
    double theta_ = 0;
    std::vector<double> sigma_;
    std::uint64_t qmc_seed_ = 0;
    std::function<double(std::span<const double>)> custom_;
    std::string custom_name_;
};

} // namespace discop

#endif
