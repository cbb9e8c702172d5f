#include "discop/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace discop {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

} // namespace

// ---- Permutation -----------------------------------------------------------

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    const int w = static_cast<int>(mapping_.size());
    if (w < 1) fail("permutation must have length >= 1");
    std::vector<char> seen(static_cast<std::size_t>(w), 0);
    for (int v : mapping_) {
        if (v < 1 || v > w) fail("permutation entry " + std::to_string(v) + " outside 1.." + std::to_string(w));
        if (seen[static_cast<std::size_t>(v - 1)]) fail("permutation repeats entry " + std::to_string(v));
        seen[static_cast<std::size_t>(v - 1)] = 1;
    }
}

Permutation Permutation::identity(int w) {
    if (w < 1) fail("permutation must have length >= 1");
    std::vector<int> m(static_cast<std::size_t>(w));
    for (int s = 1; s <= w; ++s) m[static_cast<std::size_t>(s - 1)] = s;
    return Permutation(std::move(m));
}

int Permutation::map(int s) const {
    if (s < 1 || s > size()) fail("permutation argument " + std::to_string(s) + " outside 1.." + std::to_string(size()));
    return mapping_[static_cast<std::size_t>(s - 1)];
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(mapping_.size());
    for (int s = 1; s <= size(); ++s) inv[static_cast<std::size_t>(mapping_[static_cast<std::size_t>(s - 1)] - 1)] = s;
    return Permutation(std::move(inv));
}

// ---- Marginal ---------------------------------------------------------------

Marginal::Marginal(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) fail("marginal must have at least one bin");
    double sum = 0;
    for (std::size_t t = 0; t < probs_.size(); ++t) {
        const double v = probs_[t];
        if (!std::isfinite(v)) fail("marginal entry " + std::to_string(t + 1) + " is not finite");
        if (v < 0) {
            if (v < -1e-15) fail("marginal entry " + std::to_string(t + 1) + " is negative: " + std::to_string(v));
            probs_[t] = 0;
        }
        sum += probs_[t];
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        fail("marginal masses sum to " + std::to_string(sum) + ", not 1 (tolerance 1e-9)");
    // Rescale only when actually needed; untouched inputs keep their exact
    // bit patterns, which the dyadic table fixtures rely on.
    if (sum != 1.0 && std::fabs(sum - 1.0) > 1e-13) {
        for (double& v : probs_) v /= sum;
    }
    cdf_.resize(probs_.size() + 1);
    cdf_[0] = 0.0;
    double run = 0;
    for (std::size_t t = 0; t < probs_.size(); ++t) {
        run += probs_[t];
        cdf_[t + 1] = std::min(std::max(run, cdf_[t]), 1.0);
    }
    cdf_.back() = 1.0;
}

double Marginal::prob(int bin) const {
    if (bin < 1 || bin > size()) fail("bin " + std::to_string(bin) + " outside 1.." + std::to_string(size()));
    return probs_[static_cast<std::size_t>(bin - 1)];
}

double Marginal::cdf(int upto) const {
    if (upto < 0 || upto > size()) fail("cdf index " + std::to_string(upto) + " outside 0.." + std::to_string(size()));
    return cdf_[static_cast<std::size_t>(upto)];
}

Marginal Marginal::collapsed(int bin) const {
    const int w = size();
    if (w < 2) fail("cannot collapse a single-bin marginal");
    if (bin < 1 || bin > w - 1) fail("collapse index " + std::to_string(bin) + " outside 1.." + std::to_string(w - 1));
    std::vector<double> out(static_cast<std::size_t>(w - 1));
    for (int t = 1; t <= w - 1; ++t) {
        if (t < bin) out[static_cast<std::size_t>(t - 1)] = probs_[static_cast<std::size_t>(t - 1)];
        else if (t == bin) out[static_cast<std::size_t>(t - 1)] = probs_[static_cast<std::size_t>(t - 1)] + probs_[static_cast<std::size_t>(t)];
        else out[static_cast<std::size_t>(t - 1)] = probs_[static_cast<std::size_t>(t)];
    }
    return Marginal(std::move(out));
}

Marginal Marginal::permuted(const Permutation& sigma) const {
    if (sigma.size() != size()) fail("permutation length " + std::to_string(sigma.size()) + " != marginal length " + std::to_string(size()));
    std::vector<double> out(probs_.size());
    for (int s = 1; s <= size(); ++s) out[static_cast<std::size_t>(s - 1)] = probs_[static_cast<std::size_t>(sigma.map(s) - 1)];
    return Marginal(std::move(out));
}

Marginal Marginal::split(int bin, double frac) const {
    const int w = size();
    if (bin < 1 || bin > w) fail("split index " + std::to_string(bin) + " outside 1.." + std::to_string(w));
    if (!(frac >= 0.0 && frac <= 1.0)) fail("split fraction must lie in [0,1]");
    const double mass = probs_[static_cast<std::size_t>(bin - 1)];
    // Split on the integer significand so the two children sum back to the
    // parent mass exactly, making collapse() an exact inverse.
    double lo = 0.0, hi = 0.0;
    if (mass > 0) {
        int exp2 = 0;
        const double frac_part = std::frexp(mass, &exp2); // mass = frac_part * 2^exp2
        const double m = std::ldexp(frac_part, 53);       // integer significand
        double child = std::nearbyint(frac * m);
        child = std::min(std::max(child, 0.0), m);
        lo = std::ldexp(child, exp2 - 53);
        hi = std::ldexp(m - child, exp2 - 53);
    }
    std::vector<double> out;
    out.reserve(probs_.size() + 1);
    for (int t = 1; t <= w; ++t) {
        if (t == bin) {
            out.push_back(lo);
            out.push_back(hi);
        } else {
            out.push_back(probs_[static_cast<std::size_t>(t - 1)]);
        }
    }
    return Marginal(std::move(out));
}

// ---- Profile ----------------------------------------------------------------

Profile::Profile(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
    if (marginals_.empty()) fail("profile must have at least one marginal");
}

const Marginal& Profile::at(int dim) const {
    if (dim < 1 || dim > dims()) fail("dimension " + std::to_string(dim) + " outside 1.." + std::to_string(dims()));
    return marginals_[static_cast<std::size_t>(dim - 1)];
}

std::vector<int> Profile::shape() const {
    std::vector<int> z;
    z.reserve(marginals_.size());
    for (const Marginal& m : marginals_) z.push_back(m.size());
    return z;
}

std::size_t Profile::cell_count() const {
    std::size_t n = 1;
    for (const Marginal& m : marginals_) n *= static_cast<std::size_t>(m.size());
    return n;
}

Profile Profile::collapsed(int dim, int bin) const {
    std::vector<Marginal> out = marginals_;
    out[static_cast<std::size_t>(dim - 1)] = at(dim).collapsed(bin);
    return Profile(std::move(out));
}

Profile Profile::permuted(int dim, const Permutation& sigma) const {
    std::vector<Marginal> out = marginals_;
    out[static_cast<std::size_t>(dim - 1)] = at(dim).permuted(sigma);
    return Profile(std::move(out));
}

} // namespace discop
