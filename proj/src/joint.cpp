#include "discop/joint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace discop {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr std::size_t kMaxCells = 10'000'000;

} // namespace

JointPmf::JointPmf(std::vector<int> shape, std::vector<double> mass)
    : shape_(std::move(shape)), mass_(std::move(mass)) {
    if (shape_.empty()) fail("joint pmf needs at least one dimension");
    std::size_t cells = 1;
    for (int z : shape_) {
        if (z < 1) fail("joint pmf shape entries must be >= 1");
        cells *= static_cast<std::size_t>(z);
        if (cells > kMaxCells) fail("joint pmf exceeds the 1e7 cell cap");
    }
    if (mass_.size() != cells)
        fail("joint pmf has " + std::to_string(mass_.size()) + " masses, expected " + std::to_string(cells));
    double sum = 0.0;
    for (double& v : mass_) {
        if (!std::isfinite(v)) fail("joint pmf mass is not finite");
        if (v < 0) {
            if (v < -1e-10) fail("joint pmf mass is negative: " + std::to_string(v));
            v = 0.0;
        }
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        fail("joint pmf masses sum to " + std::to_string(sum) + ", not 1 (tolerance 1e-9)");
    strides_.assign(shape_.size(), 1);
    for (int i = static_cast<int>(shape_.size()) - 2; i >= 0; --i)
        strides_[static_cast<std::size_t>(i)] =
            strides_[static_cast<std::size_t>(i + 1)] * static_cast<std::size_t>(shape_[static_cast<std::size_t>(i + 1)]);
}

std::size_t JointPmf::linear_index(std::span<const int> cell) const {
    if (static_cast<int>(cell.size()) != dims()) fail("cell index has wrong dimension");
    std::size_t f = 0;
    for (int i = 0; i < dims(); ++i) {
        const int s = cell[static_cast<std::size_t>(i)];
        if (s < 1 || s > shape_[static_cast<std::size_t>(i)])
            fail("cell coordinate " + std::to_string(s) + " outside 1.." + std::to_string(shape_[static_cast<std::size_t>(i)]));
        f += static_cast<std::size_t>(s - 1) * strides_[static_cast<std::size_t>(i)];
    }
    return f;
}

double JointPmf::mass_at(std::span<const int> cell) const { return mass_[linear_index(cell)]; }

double JointPmf::cdf(std::span<const int> cell) const {
    if (static_cast<int>(cell.size()) != dims()) fail("cdf index has wrong dimension");
    for (int i = 0; i < dims(); ++i) {
        const int s = cell[static_cast<std::size_t>(i)];
        if (s < 0 || s > shape_[static_cast<std::size_t>(i)])
            fail("cdf coordinate " + std::to_string(s) + " outside 0.." + std::to_string(shape_[static_cast<std::size_t>(i)]));
        if (s == 0) return 0.0;
    }
    // Dense sweep over the lower-orthant box.
    std::vector<int> idx(cell.size(), 1);
    double total = 0.0;
    for (;;) {
        total += mass_[linear_index(idx)];
        int i = dims() - 1;
        for (; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] <= cell[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 1;
        }
        if (i < 0) break;
    }
    return total;
}

Marginal JointPmf::marginal_of(int dim) const {
    if (dim < 1 || dim > dims()) fail("dimension " + std::to_string(dim) + " outside 1.." + std::to_string(dims()));
    const int z = shape_[static_cast<std::size_t>(dim - 1)];
    std::vector<double> probs(static_cast<std::size_t>(z), 0.0);
    const std::size_t stride = strides_[static_cast<std::size_t>(dim - 1)];
    for (std::size_t f = 0; f < mass_.size(); ++f) {
        const int s = static_cast<int>((f / stride) % static_cast<std::size_t>(z));
        probs[static_cast<std::size_t>(s)] += mass_[f];
    }
    return Marginal(std::move(probs));
}

JointPmf build_joint(const Copula& copula, const Profile& profile) {
    const int n = profile.dims();
    if (copula.dim() != n)
        fail("copula dimension " + std::to_string(copula.dim()) + " != profile dimension " + std::to_string(n));
    const std::vector<int> shape = profile.shape();
    std::size_t cells = 1, lattice_size = 1;
    for (int z : shape) {
        cells *= static_cast<std::size_t>(z);
        lattice_size *= static_cast<std::size_t>(z) + 1;
        if (cells > kMaxCells) fail("joint grid exceeds the 1e7 cell cap");
    }

    // Memoize the copula on the cdf lattice, then assemble each cell from its
    // 2^n corners. Round-off stays local to a cell and interior corners cancel
    // exactly in totals because every cell reads the same memoized values.
    std::vector<double> lattice(lattice_size);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> point(static_cast<std::size_t>(n));
    for (std::size_t f = 0; f < lattice_size; ++f) {
        for (int i = 0; i < n; ++i) point[static_cast<std::size_t>(i)] = profile.at(i + 1).cdf(idx[static_cast<std::size_t>(i)]);
        lattice[f] = copula.value(point);
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] <= shape[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    auto flat_at = [&](std::span<const int> ix) {
        std::size_t f = 0;
        for (int i = 0; i < n; ++i)
            f = f * (static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]) + 1) + static_cast<std::size_t>(ix[static_cast<std::size_t>(i)]);
        return f;
    };

    const double budget = copula.round_off_budget();
    std::vector<double> mass(cells);
    std::vector<int> cell(static_cast<std::size_t>(n), 1);
    std::vector<int> corner(static_cast<std::size_t>(n));
    for (std::size_t f = 0; f < cells; ++f) {
        double m = 0.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            int ones = 0;
            for (int i = 0; i < n; ++i) {
                const int up = static_cast<int>((mask >> i) & 1u);
                ones += up;
                corner[static_cast<std::size_t>(i)] = cell[static_cast<std::size_t>(i)] - 1 + up;
            }
            const double sign = ((n - ones) % 2 == 0) ? 1.0 : -1.0;
            m += sign * lattice[flat_at(corner)];
        }
        if (m < 0) {
            if (m < -budget) {
                if (copula.family() == CopulaFamily::custom)
                    fail("copula is not n-increasing: cell mass " + std::to_string(m));
                throw std::logic_error("catalogue copula produced cell mass " + std::to_string(m) +
                                       "; this is a bug");
            }
            m = 0.0;
        }
        mass[f] = m;
        for (int i = n - 1; i >= 0; --i) {
            if (++cell[static_cast<std::size_t>(i)] <= shape[static_cast<std::size_t>(i)]) break;
            cell[static_cast<std::size_t>(i)] = 1;
        }
    }
    return JointPmf(shape, std::move(mass));
}

} // namespace discop
