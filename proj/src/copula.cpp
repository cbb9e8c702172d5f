#include "discop/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "discop/normal.hpp"

namespace discop {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::size_t checked_lattice_size(int points_per_axis, int dim) {
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) {
        total *= static_cast<std::size_t>(points_per_axis);
        if (total > (1u << 21)) fail("axiom grid too large; lower the depth");
    }
    return total;
}

} // namespace

std::string family_name(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::independence: return "independence";
        case CopulaFamily::frechet_upper: return "frechet-upper";
        case CopulaFamily::gaussian: return "gaussian";
        case CopulaFamily::clayton: return "clayton";
        case CopulaFamily::gumbel: return "gumbel";
        case CopulaFamily::custom: return "custom";
    }
    return "?";
}

Copula Copula::independence(int dim) {
    if (dim < 1) fail("copula dimension must be >= 1");
    Copula c;
    c.family_ = CopulaFamily::independence;
    c.dim_ = dim;
    return c;
}

Copula Copula::frechet_upper(int dim) {
    if (dim < 1) fail("copula dimension must be >= 1");
    Copula c;
    c.family_ = CopulaFamily::frechet_upper;
    c.dim_ = dim;
    return c;
}

Copula Copula::gaussian(std::vector<double> sigma, int dim, std::uint64_t qmc_seed) {
    if (dim < 1) fail("copula dimension must be >= 1");
    if (dim > 4)
        throw std::domain_error("gaussian copula supports dimensions 1..4; got " + std::to_string(dim));
    if (static_cast<int>(sigma.size()) != dim * dim) fail("sigma must be a flat n x n matrix");
    for (int i = 0; i < dim; ++i) {
        if (std::fabs(sigma[static_cast<std::size_t>(i) * dim + i] - 1.0) > 1e-12)
            fail("sigma must have unit diagonal");
        for (int j = 0; j < i; ++j) {
            const double a = sigma[static_cast<std::size_t>(i) * dim + j];
            const double b = sigma[static_cast<std::size_t>(j) * dim + i];
            if (std::fabs(a - b) > 1e-12) fail("sigma must be symmetric");
            if (!(a >= -1.0 && a <= 1.0)) fail("correlations must lie in [-1,1]");
        }
    }
    std::vector<double> eigs(static_cast<std::size_t>(dim));
    normal::symmetric_eigenvalues(sigma, dim, eigs);
    if (eigs.front() < -1e-10)
        fail("sigma is not positive semidefinite (min eigenvalue " + std::to_string(eigs.front()) + ")");
    Copula c;
    c.family_ = CopulaFamily::gaussian;
    c.dim_ = dim;
    c.sigma_ = std::move(sigma);
    c.qmc_seed_ = qmc_seed;
    return c;
}

Copula Copula::clayton(int dim, double theta) {
    if (dim < 1) fail("copula dimension must be >= 1");
    if (!(theta > 0) || !std::isfinite(theta)) fail("clayton requires theta > 0");
    Copula c;
    c.family_ = CopulaFamily::clayton;
    c.dim_ = dim;
    c.theta_ = theta;
    return c;
}

Copula Copula::gumbel(int dim, double theta) {
    if (dim < 1) fail("copula dimension must be >= 1");
    if (!(theta >= 1) || !std::isfinite(theta)) fail("gumbel requires theta >= 1");
    Copula c;
    c.family_ = CopulaFamily::gumbel;
    c.dim_ = dim;
    c.theta_ = theta;
    return c;
}

Copula Copula::custom(int dim, std::function<double(std::span<const double>)> fn, std::string name) {
    if (dim < 1) fail("copula dimension must be >= 1");
    if (!fn) fail("custom copula requires an evaluator");
    Copula c;
    c.family_ = CopulaFamily::custom;
    c.dim_ = dim;
    c.custom_ = std::move(fn);
    c.custom_name_ = std::move(name);
    return c;
}

std::string Copula::name() const {
    return family_ == CopulaFamily::custom ? custom_name_ : family_name(family_);
}

bool Copula::dimension_generic() const {
    switch (family_) {
        case CopulaFamily::independence:
        case CopulaFamily::frechet_upper:
        case CopulaFamily::clayton:
        case CopulaFamily::gumbel: return true;
        default: return false;
    }
}

Copula Copula::with_dim(int dim) const {
    switch (family_) {
        case CopulaFamily::independence: return independence(dim);
        case CopulaFamily::frechet_upper: return frechet_upper(dim);
        case CopulaFamily::clayton: return clayton(dim, theta_);
        case CopulaFamily::gumbel: return gumbel(dim, theta_);
        case CopulaFamily::gaussian:
            if (dim == dim_) return *this;
            throw std::domain_error("gaussian copula dimension is fixed by sigma (" +
                                    std::to_string(dim_) + "), cannot use dimension " +
                                    std::to_string(dim));
        case CopulaFamily::custom:
            if (dim == dim_) return *this;
            throw std::domain_error("custom copula cannot change dimension");
    }
    fail("unreachable");
}

double Copula::default_tolerance() const {
    return family_ == CopulaFamily::gaussian ? 1e-5 : 1e-9;
}

double Copula::round_off_budget() const {
    // The 4-dimensional gaussian evaluator is quasi-Monte Carlo with target
    // accuracy 1e-4; everything else is deterministic to ~1e-12.
    if (family_ == CopulaFamily::gaussian && dim_ == 4) return 1e-4;
    return 1e-10;
}

double Copula::value(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        fail("copula argument has length " + std::to_string(x.size()) + ", expected " +
             std::to_string(dim_));
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) fail("copula arguments must lie in [0,1]");
    }
    return value_unchecked(x);
}

double Copula::value_unchecked(std::span<const double> x) const {
    switch (family_) {
        case CopulaFamily::independence: {
            double p = 1.0;
            for (double v : x) p *= v;
            return p;
        }
        case CopulaFamily::frechet_upper: {
            double m = 1.0;
            for (double v : x) m = std::min(m, v);
            return m;
        }
        case CopulaFamily::clayton: {
            // sum of (x^-theta - 1) via expm1 keeps the theta -> 0 limit exact.
            double t = 0.0;
            for (double v : x) {
                if (v == 0.0) return 0.0;
                if (v < 1.0) t += std::expm1(-theta_ * std::log(v));
            }
            if (!std::isfinite(t)) return 0.0;
            return std::exp(-std::log1p(std::max(t, 0.0)) / theta_);
        }
        case CopulaFamily::gumbel: {
            double lmax = 0.0;
            for (double v : x) {
                if (v == 0.0) return 0.0;
                lmax = std::max(lmax, -std::log(v));
            }
            if (lmax == 0.0) return 1.0;
            double t = 0.0;
            for (double v : x) {
                if (v < 1.0) t += std::pow(-std::log(v) / lmax, theta_);
            }
            return std::exp(-lmax * std::pow(t, 1.0 / theta_));
        }
        case CopulaFamily::gaussian: return gaussian_value(x);
        case CopulaFamily::custom: return custom_(x);
    }
    fail("unreachable");
}

double Copula::gaussian_value(std::span<const double> x) const {
    // Coordinates at 0 ground the value; coordinates at 1 drop out and the
    // remaining block of sigma is used.
    std::vector<int> active;
    active.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) return 0.0;
        if (x[i] < 1.0) active.push_back(static_cast<int>(i));
    }
    const int m = static_cast<int>(active.size());
    if (m == 0) return 1.0;
    if (m == 1) return x[static_cast<std::size_t>(active[0])];
    auto rho = [&](int a, int b) {
        return sigma_[static_cast<std::size_t>(active[static_cast<std::size_t>(a)]) * dim_ +
                      active[static_cast<std::size_t>(b)]];
    };
    std::vector<double> q(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) q[static_cast<std::size_t>(i)] = normal::quantile(x[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])]);
    if (m == 2) return normal::bvn_cdf(q[0], q[1], rho(0, 1));
    if (m == 3) return normal::tvn_cdf(q[0], q[1], q[2], rho(0, 1), rho(0, 2), rho(1, 2));
    // m == 4: seeded quasi-Monte Carlo with a common lattice, so nearby
    // evaluations share their error and differences stay meaningful.
    std::vector<double> sub(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub[static_cast<std::size_t>(i) * m + j] = rho(i, j);
    return normal::mvn_cdf_qmc(q, sub, m, qmc_seed_).value;
}

double Copula::box_mass_signed(std::span<const double> lower, std::span<const double> upper) const {
    if (static_cast<int>(lower.size()) != dim_ || static_cast<int>(upper.size()) != dim_)
        fail("box has wrong dimension");
    for (int i = 0; i < dim_; ++i) {
        const double lo = lower[static_cast<std::size_t>(i)];
        const double hi = upper[static_cast<std::size_t>(i)];
        if (!(lo >= 0.0 && lo <= 1.0) || !(hi >= 0.0 && hi <= 1.0)) fail("box corners must lie in [0,1]");
        if (lo > hi) fail("box lower corner exceeds upper corner in dimension " + std::to_string(i + 1));
        if (lo == hi) return 0.0;
    }
    std::vector<double> corner(static_cast<std::size_t>(dim_));
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
        int ones = 0;
        for (int i = 0; i < dim_; ++i) {
            const bool up = (mask >> i) & 1u;
            ones += up;
            corner[static_cast<std::size_t>(i)] = up ? upper[static_cast<std::size_t>(i)] : lower[static_cast<std::size_t>(i)];
        }
        const double sign = ((dim_ - ones) % 2 == 0) ? 1.0 : -1.0;
        total += sign * value_unchecked(corner);
    }
    return total;
}

double Copula::rectangle_probability(std::span<const double> lower, std::span<const double> upper) const {
    const double raw = box_mass_signed(lower, upper);
    if (raw < -round_off_budget()) {
        if (family_ == CopulaFamily::custom)
            fail("custom copula is not n-increasing: box mass " + std::to_string(raw));
        throw std::logic_error("catalogue copula produced box mass " + std::to_string(raw) +
                               "; this is a bug");
    }
    return std::min(std::max(raw, 0.0), 1.0);
}

AxiomsReport Copula::check_axioms(int grid_depth) const {
    if (grid_depth < 1 || grid_depth > 12) fail("grid depth must lie in 1..12");
    const int side = (1 << grid_depth) + 1; // lattice 0, 1/2^k, ..., 1
    const std::size_t total = checked_lattice_size(side, dim_);

    // Evaluate once on the full lattice; everything below reads this table.
    std::vector<double> lattice(total);
    std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
    std::vector<double> point(static_cast<std::size_t>(dim_));
    const double step = std::ldexp(1.0, -grid_depth);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (int i = 0; i < dim_; ++i) point[static_cast<std::size_t>(i)] = std::min(idx[static_cast<std::size_t>(i)] * step, 1.0);
        lattice[flat] = value_unchecked(point);
        for (int i = dim_ - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < side) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    auto flat_at = [&](std::span<const int> ix) {
        std::size_t f = 0;
        for (int i = 0; i < dim_; ++i) f = f * static_cast<std::size_t>(side) + static_cast<std::size_t>(ix[static_cast<std::size_t>(i)]);
        return f;
    };

    AxiomsReport rep;
    rep.grid_depth = grid_depth;

    // (a) grounded: C = 0 whenever a coordinate is 0.
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        bool has_zero = false;
        for (int i = 0; i < dim_; ++i) has_zero |= idx[static_cast<std::size_t>(i)] == 0;
        if (has_zero) rep.worst_grounded = std::max(rep.worst_grounded, std::fabs(lattice[flat]));
        for (int i = dim_ - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < side) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    rep.grounded = rep.worst_grounded <= 1e-10;

    // (b) uniform marginals: C(1,..,t,..,1) = t on the grid.
    const double marginal_tol = family_ == CopulaFamily::gaussian ? 1e-6 : 1e-10;
    std::vector<int> mix(static_cast<std::size_t>(dim_), side - 1);
    for (int i = 0; i < dim_; ++i) {
        for (int t = 0; t < side; ++t) {
            mix[static_cast<std::size_t>(i)] = t;
            const double dev = std::fabs(lattice[flat_at(mix)] - t * step);
            rep.worst_marginal = std::max(rep.worst_marginal, dev);
        }
        mix[static_cast<std::size_t>(i)] = side - 1;
    }
    rep.uniform_marginals = rep.worst_marginal <= marginal_tol;

    // (c) n-increasing: every elementary grid box has nonnegative mass, up to
    // the family's round-off budget; also accumulate the partition of unity.
    rep.min_box_mass = 0.0;
    double partition = 0.0;
    const int boxes_per_axis = side - 1;
    std::size_t box_total = 1;
    for (int i = 0; i < dim_; ++i) box_total *= static_cast<std::size_t>(boxes_per_axis);
    std::vector<int> bix(static_cast<std::size_t>(dim_), 0);
    std::vector<int> corner(static_cast<std::size_t>(dim_));
    for (std::size_t b = 0; b < box_total; ++b) {
        double mass = 0.0;
        for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
            int ones = 0;
            for (int i = 0; i < dim_; ++i) {
                const int up = static_cast<int>((mask >> i) & 1u);
                ones += up;
                corner[static_cast<std::size_t>(i)] = bix[static_cast<std::size_t>(i)] + up;
            }
            const double sign = ((dim_ - ones) % 2 == 0) ? 1.0 : -1.0;
            mass += sign * lattice[flat_at(corner)];
        }
        rep.min_box_mass = std::min(rep.min_box_mass, mass);
        partition += mass;
        for (int i = dim_ - 1; i >= 0; --i) {
            if (++bix[static_cast<std::size_t>(i)] < boxes_per_axis) break;
            bix[static_cast<std::size_t>(i)] = 0;
        }
    }
    rep.partition_sum = partition;
    rep.n_increasing = rep.min_box_mass >= -round_off_budget();
    return rep;
}

} // namespace discop
