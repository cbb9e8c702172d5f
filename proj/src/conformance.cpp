#include "discop/conformance.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "discop/coupling.hpp"
#include "discop/json_io.hpp"
#include "discop/rng.hpp"

namespace discop {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr double kMarginalConstraintTol = 1e-7;

// Odometer over 1-based cells of a shape; returns false when exhausted.
bool advance_cell(std::vector<int>& cell, const std::vector<int>& shape) {
    for (int i = static_cast<int>(cell.size()) - 1; i >= 0; --i) {
        if (++cell[static_cast<std::size_t>(i)] <= shape[static_cast<std::size_t>(i)]) return true;
        cell[static_cast<std::size_t>(i)] = 1;
    }
    return false;
}

} // namespace

std::string verdict_name(ConformanceReport::Verdict v) {
    switch (v) {
        case ConformanceReport::Verdict::pass: return "pass";
        case ConformanceReport::Verdict::fail: return "fail";
        case ConformanceReport::Verdict::not_a_model: return "not-a-model";
    }
    return "?";
}

const JointPmf& CheckedOracle::query(const Profile& profile) const {
    const std::string key = profile_to_json(profile);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    JointPmf joint = oracle_.raw_query(profile);
    const std::vector<int> want_shape = profile.shape();
    if (joint.shape() != want_shape) {
        int bad_dim = 1;
        for (int i = 0; i < profile.dims(); ++i) {
            if (i >= joint.dims() ||
                joint.shape()[static_cast<std::size_t>(i)] != want_shape[static_cast<std::size_t>(i)]) {
                bad_dim = i + 1;
                break;
            }
        }
        throw NotAModelError("oracle '" + oracle_.name() + "' returned a joint of the wrong shape",
                             profile, bad_dim, 0, 0, 0);
    }
    for (int i = 1; i <= profile.dims(); ++i) {
        Marginal got = joint.marginal_of(i);
        for (int b = 1; b <= got.size(); ++b) {
            const double g = got.prob(b);
            const double w = profile.at(i).prob(b);
            if (std::fabs(g - w) > kMarginalConstraintTol) {
                throw NotAModelError("oracle '" + oracle_.name() +
                                         "' violates the marginal constraint in dimension " +
                                         std::to_string(i) + ", bin " + std::to_string(b),
                                     profile, i, b, g, w);
            }
        }
    }
    auto [it, ok] = cache_.emplace(key, std::move(joint));
    (void)ok;
    return it->second;
}

namespace {

ConformanceReport not_a_model_report(const NotAModelError& e, long trials) {
    ConformanceReport rep;
    rep.verdict = ConformanceReport::Verdict::not_a_model;
    rep.trials = trials;
    rep.worst_violation = std::fabs(e.got - e.want);
    Witness w;
    w.profile = e.profile;
    w.dim = e.dim;
    if (e.bin > 0) w.cell = {e.bin};
    w.lhs = e.got;
    w.rhs = e.want;
    rep.witness = std::move(w);
    return rep;
}

// Core of check_ia_at against an existing (cached) oracle front end.
ConformanceReport ia_at(const CheckedOracle& oracle, const Profile& profile, int dim, int bin,
                        double tol) {
    const int n = profile.dims();
    if (dim < 1 || dim > n) fail("dimension " + std::to_string(dim) + " outside 1.." + std::to_string(n));
    const int zi = profile.at(dim).size();
    if (zi < 2) fail("dimension " + std::to_string(dim) + " has a single bin; nothing to merge");
    if (bin < 1 || bin > zi - 1)
        fail("merge index " + std::to_string(bin) + " outside 1.." + std::to_string(zi - 1));

    const JointPmf& full = oracle.query(profile);
    const Profile merged_profile = profile.collapsed(dim, bin);
    const JointPmf& merged = oracle.query(merged_profile);

    ConformanceReport rep;
    rep.trials = 1;
    const std::vector<int> shape = merged_profile.shape();
    std::vector<int> cell(static_cast<std::size_t>(n), 1);
    std::vector<int> shifted(static_cast<std::size_t>(n));
    std::vector<int> worst_cell;
    double worst_lhs = 0, worst_rhs = 0;
    do {
        const int si = cell[static_cast<std::size_t>(dim - 1)];
        for (int i = 0; i < n; ++i) shifted[static_cast<std::size_t>(i)] = cell[static_cast<std::size_t>(i)];
        shifted[static_cast<std::size_t>(dim - 1)] = si + 1;
        // Both indicator conditions hold at si == bin, so the terms add.
        double rhs = 0.0;
        if (si <= bin) rhs += full.mass_at(cell);
        if (si >= bin) rhs += full.mass_at(shifted);
        const double lhs = merged.mass_at(cell);
        const double dev = std::fabs(lhs - rhs);
        if (dev > rep.worst_violation) {
            rep.worst_violation = dev;
            worst_cell = cell;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
    } while (advance_cell(cell, shape));

    if (rep.worst_violation > tol) {
        rep.verdict = ConformanceReport::Verdict::fail;
        Witness w;
        w.profile = profile;
        w.dim = dim;
        w.merge_bin = bin;
        w.cell = std::move(worst_cell);
        w.lhs = worst_lhs;
        w.rhs = worst_rhs;
        rep.witness = std::move(w);
    }
    return rep;
}

} // namespace

Profile canonical_fixture_profile() {
    return Profile({Marginal({0.5, 0.25, 0.125, 0.125}), Marginal({0.25, 0.25, 0.25, 0.25})});
}

Profile random_profile(std::uint64_t seed, std::uint64_t trial, int dims, int zmax, int force_dim) {
    if (dims < 1) fail("dims must be >= 1");
    if (zmax < 1) fail("zmax must be >= 1");
    if (force_dim != 0 && zmax < 2) fail("zmax must be >= 2 to force a mergeable dimension");
    SeededStream rng({0xd161c4e7ULL, seed, trial});
    std::vector<Marginal> ms;
    ms.reserve(static_cast<std::size_t>(dims));
    for (int d = 1; d <= dims; ++d) {
        const int z = d == force_dim ? rng.next_int(2, zmax) : rng.next_int(1, zmax);
        std::vector<double> e(static_cast<std::size_t>(z));
        double sum = 0.0;
        for (double& v : e) {
            v = -std::log(rng.next_u01());
            sum += v;
        }
        for (double& v : e) v /= sum;
        ms.emplace_back(std::move(e));
    }
    return Profile(std::move(ms));
}

ConformanceReport check_ia_at(const ModelOracle& model, const Profile& profile, int dim, int bin,
                              double tol) {
    CheckedOracle oracle(model);
    try {
        return ia_at(oracle, profile, dim, bin, tol);
    } catch (const NotAModelError& e) {
        return not_a_model_report(e, 1);
    }
}

ConformanceReport check_ia_randomized(const ModelOracle& model, long trials, std::uint64_t seed,
                                      int dims, int zmax, double tol) {
    if (trials < 1) fail("trials must be >= 1");
    if (zmax < 2) fail("zmax must be >= 2");
    CheckedOracle oracle(model);
    ConformanceReport agg;
    for (long t = 0; t < trials; ++t) {
        Profile p = canonical_fixture_profile();
        int dim = 1, bin = 3;
        if (!(t == 0 && dims == 2)) {
            SeededStream rng({0x1aULL, seed, static_cast<std::uint64_t>(t)});
            dim = rng.next_int(1, dims);
            p = random_profile(seed, static_cast<std::uint64_t>(t), dims, zmax, dim);
            bin = rng.next_int(1, p.at(dim).size() - 1);
        }
        ConformanceReport rep;
        try {
            rep = ia_at(oracle, p, dim, bin, tol);
        } catch (const NotAModelError& e) {
            return not_a_model_report(e, t + 1);
        }
        agg.worst_violation = std::max(agg.worst_violation, rep.worst_violation);
        if (!rep.passed()) {
            rep.trials = t + 1;
            rep.worst_violation = agg.worst_violation;
            return rep;
        }
    }
    agg.trials = trials;
    return agg;
}

namespace {

double extract_with(const CheckedOracle& oracle, std::span<const double> x) {
    if (x.empty()) fail("extraction point must have dimension >= 1");
    std::vector<Marginal> ms;
    ms.reserve(x.size());
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) fail("extraction point must lie in [0,1]^n");
        ms.emplace_back(std::vector<double>{v, 1.0 - v});
    }
    const JointPmf& j = oracle.query(Profile(std::move(ms)));
    const std::vector<int> ones(x.size(), 1);
    return j.mass_at(ones);
}

} // namespace

double extract_copula(const ModelOracle& model, std::span<const double> x) {
    CheckedOracle oracle(model);
    return extract_with(oracle, x);
}

CopulaGrid::CopulaGrid(int dim, int depth, std::vector<double> values)
    : dim_(dim), depth_(depth), side_((1 << depth) + 1), values_(std::move(values)) {
    if (dim < 1) fail("grid dimension must be >= 1");
    if (depth < 1 || depth > 16) fail("grid depth must lie in 1..16");
    std::size_t want = 1;
    for (int i = 0; i < dim; ++i) {
        want *= static_cast<std::size_t>(side_);
        if (want > (1u << 24)) fail("copula grid too large");
    }
    if (values_.size() != want)
        fail("copula grid has " + std::to_string(values_.size()) + " values, expected " + std::to_string(want));
}

CopulaGrid CopulaGrid::extract(const ModelOracle& model, int dims, int depth) {
    if (dims < 1) fail("dims must be >= 1");
    if (depth < 1) fail("depth must be >= 1");
    const int side = (1 << depth) + 1;
    std::size_t total = 1;
    for (int i = 0; i < dims; ++i) {
        total *= static_cast<std::size_t>(side);
        if (total > (1u << 24)) fail("extraction grid too large; lower the depth");
    }
    CheckedOracle oracle(model);
    std::vector<double> values(total);
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<double> x(static_cast<std::size_t>(dims));
    const double step = std::ldexp(1.0, -depth);
    for (std::size_t f = 0; f < total; ++f) {
        for (int i = 0; i < dims; ++i) x[static_cast<std::size_t>(i)] = std::min(idx[static_cast<std::size_t>(i)] * step, 1.0);
        values[f] = extract_with(oracle, x);
        for (int i = dims - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < side) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    return CopulaGrid(dims, depth, std::move(values));
}

double CopulaGrid::at(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != dim_) fail("grid index has wrong dimension");
    std::size_t f = 0;
    for (int i = 0; i < dim_; ++i) {
        const int v = idx[static_cast<std::size_t>(i)];
        if (v < 0 || v >= side_) fail("grid index outside the lattice");
        f = f * static_cast<std::size_t>(side_) + static_cast<std::size_t>(v);
    }
    return values_[f];
}

double CopulaGrid::value(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) fail("grid argument has wrong dimension");
    std::vector<int> base(static_cast<std::size_t>(dim_));
    std::vector<double> frac(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
        double v = x[static_cast<std::size_t>(i)];
        if (!(v >= 0.0 && v <= 1.0)) fail("grid argument must lie in [0,1]");
        const double pos = v * (side_ - 1);
        int lo = static_cast<int>(std::floor(pos));
        lo = std::min(std::max(lo, 0), side_ - 2);
        base[static_cast<std::size_t>(i)] = lo;
        frac[static_cast<std::size_t>(i)] = pos - lo;
    }
    double total = 0.0;
    std::vector<int> corner(static_cast<std::size_t>(dim_));
    for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
        double weight = 1.0;
        for (int i = 0; i < dim_; ++i) {
            const bool up = (mask >> i) & 1u;
            corner[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + (up ? 1 : 0);
            weight *= up ? frac[static_cast<std::size_t>(i)] : 1.0 - frac[static_cast<std::size_t>(i)];
        }
        if (weight > 0) total += weight * at(corner);
    }
    return total;
}

double CopulaGrid::lipschitz_slack() const { return dim_ * std::ldexp(1.0, -depth_); }

namespace {

// Shared loop for both extraction-consistency variants.
template <typename EvalCdf>
ConformanceReport extraction_consistency(const ModelOracle& model, int n, long trials,
                                         std::uint64_t seed, int zmax, double tol,
                                         EvalCdf&& hypothesis_cdf) {
    if (trials < 1) fail("trials must be >= 1");
    if (zmax < 1) fail("zmax must be >= 1");
    CheckedOracle oracle(model);
    ConformanceReport agg;
    std::vector<double> fx(static_cast<std::size_t>(n));
    for (long t = 0; t < trials; ++t) {
        const Profile p = (t == 0 && n == 2)
                              ? canonical_fixture_profile()
                              : random_profile(seed, static_cast<std::uint64_t>(t), n, zmax, 0);
        ConformanceReport rep;
        rep.trials = 1;
        std::vector<int> worst_cell;
        double worst_lhs = 0, worst_rhs = 0;
        try {
            const JointPmf& j = oracle.query(p);
            const std::vector<int> shape = p.shape();
            std::vector<int> cell(static_cast<std::size_t>(n), 1);
            do {
                for (int i = 0; i < n; ++i)
                    fx[static_cast<std::size_t>(i)] = p.at(i + 1).cdf(cell[static_cast<std::size_t>(i)]);
                const double lhs = j.cdf(cell);
                const double rhs = hypothesis_cdf(fx);
                const double dev = std::fabs(lhs - rhs);
                if (dev > rep.worst_violation) {
                    rep.worst_violation = dev;
                    worst_cell = cell;
                    worst_lhs = lhs;
                    worst_rhs = rhs;
                }
            } while (advance_cell(cell, shape));
        } catch (const NotAModelError& e) {
            return not_a_model_report(e, t + 1);
        }
        agg.worst_violation = std::max(agg.worst_violation, rep.worst_violation);
        if (rep.worst_violation > tol) {
            ConformanceReport out;
            out.verdict = ConformanceReport::Verdict::fail;
            out.trials = t + 1;
            out.worst_violation = agg.worst_violation;
            Witness w;
            w.profile = p;
            w.cell = std::move(worst_cell);
            w.lhs = worst_lhs;
            w.rhs = worst_rhs;
            out.witness = std::move(w);
            return out;
        }
    }
    agg.trials = trials;
    return agg;
}

} // namespace

ConformanceReport verify_extraction_consistency(const ModelOracle& model, const Copula& hypothesis,
                                                long trials, std::uint64_t seed, int zmax,
                                                double tol) {
    return extraction_consistency(model, hypothesis.dim(), trials, seed, zmax, tol,
                                  [&](std::span<const double> fx) { return hypothesis.value(fx); });
}

ConformanceReport verify_extraction_consistency(const ModelOracle& model,
                                                const CopulaGrid& hypothesis, long trials,
                                                std::uint64_t seed, int zmax, double tol) {
    // The grid only pins the copula at lattice points; between them a true
    // copula can drift by at most the Lipschitz slack.
    const double eff_tol = tol + hypothesis.lipschitz_slack();
    return extraction_consistency(model, hypothesis.dim(), trials, seed, zmax, eff_tol,
                                  [&](std::span<const double> fx) { return hypothesis.value(fx); });
}

namespace {

ConformanceReport m_neutrality_at(const CheckedOracle& oracle, const Profile& profile, int dim,
                                  const Permutation& sigma, double tol) {
    const int n = profile.dims();
    if (dim < 1 || dim > n) fail("dimension " + std::to_string(dim) + " outside 1.." + std::to_string(n));
    if (sigma.size() != profile.at(dim).size())
        fail("permutation length " + std::to_string(sigma.size()) + " != bin count " +
             std::to_string(profile.at(dim).size()));

    const JointPmf& base = oracle.query(profile);
    const JointPmf& relabeled = oracle.query(profile.permuted(dim, sigma));

    ConformanceReport rep;
    rep.trials = 1;
    const std::vector<int> shape = profile.shape();
    std::vector<int> cell(static_cast<std::size_t>(n), 1);
    std::vector<int> mapped(static_cast<std::size_t>(n));
    std::vector<int> worst_cell;
    double worst_lhs = 0, worst_rhs = 0;
    do {
        for (int i = 0; i < n; ++i) mapped[static_cast<std::size_t>(i)] = cell[static_cast<std::size_t>(i)];
        mapped[static_cast<std::size_t>(dim - 1)] = sigma.map(cell[static_cast<std::size_t>(dim - 1)]);
        const double lhs = relabeled.mass_at(cell);
        const double rhs = base.mass_at(mapped);
        const double dev = std::fabs(lhs - rhs);
        if (dev > rep.worst_violation) {
            rep.worst_violation = dev;
            worst_cell = cell;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
    } while (advance_cell(cell, shape));

    if (rep.worst_violation > tol) {
        rep.verdict = ConformanceReport::Verdict::fail;
        Witness w;
        w.profile = profile;
        w.dim = dim;
        w.sigma.assign(sigma.mapping().begin(), sigma.mapping().end());
        w.cell = std::move(worst_cell);
        w.lhs = worst_lhs;
        w.rhs = worst_rhs;
        rep.witness = std::move(w);
    }
    return rep;
}

} // namespace

ConformanceReport check_m_neutrality(const ModelOracle& model, const Profile& profile, int dim,
                                     const Permutation& sigma, double tol) {
    CheckedOracle oracle(model);
    try {
        return m_neutrality_at(oracle, profile, dim, sigma, tol);
    } catch (const NotAModelError& e) {
        return not_a_model_report(e, 1);
    }
}

ConformanceReport check_m_neutrality_randomized(const ModelOracle& model, long trials,
                                                std::uint64_t seed, int dims, int zmax,
                                                double tol) {
    if (trials < 1) fail("trials must be >= 1");
    if (zmax < 1) fail("zmax must be >= 1");
    CheckedOracle oracle(model);
    ConformanceReport agg;
    for (long t = 0; t < trials; ++t) {
        Profile p = Profile({Marginal({0.5, 0.25, 0.25}), Marginal({0.25, 0.25, 0.25, 0.25})});
        int dim = 1;
        std::vector<int> mapping = {2, 1, 3};
        if (!(t == 0 && dims == 2)) {
            SeededStream rng({0x3e07ULL, seed, static_cast<std::uint64_t>(t)});
            dim = rng.next_int(1, dims);
            p = random_profile(seed, static_cast<std::uint64_t>(t), dims, zmax, 0);
            const int z = p.at(dim).size();
            mapping.resize(static_cast<std::size_t>(z));
            for (int s = 1; s <= z; ++s) mapping[static_cast<std::size_t>(s - 1)] = s;
            for (int s = z - 1; s >= 1; --s)
                std::swap(mapping[static_cast<std::size_t>(s)], mapping[static_cast<std::size_t>(rng.next_int(0, s))]);
        }
        ConformanceReport rep;
        try {
            rep = m_neutrality_at(oracle, p, dim, Permutation(mapping), tol);
        } catch (const NotAModelError& e) {
            return not_a_model_report(e, t + 1);
        }
        agg.worst_violation = std::max(agg.worst_violation, rep.worst_violation);
        if (!rep.passed()) {
            rep.trials = t + 1;
            rep.worst_violation = agg.worst_violation;
            return rep;
        }
    }
    agg.trials = trials;
    return agg;
}

ConformanceReport verify_factorization(const Copula& copula, std::span<const int> m_dims,
                                       int grid_depth, double tol) {
    const int n = copula.dim();
    if (grid_depth < 1 || grid_depth > 12) fail("grid depth must lie in 1..12");
    std::vector<bool> in_m(static_cast<std::size_t>(n), false);
    for (int d : m_dims) {
        if (d < 1 || d > n) fail("M contains dimension " + std::to_string(d) + " outside 1.." + std::to_string(n));
        in_m[static_cast<std::size_t>(d - 1)] = true;
    }
    const int side = (1 << grid_depth) + 1;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        total *= static_cast<std::size_t>(side);
        if (total > (1u << 24)) fail("factorization grid too large; lower the depth");
    }
    const double step = std::ldexp(1.0, -grid_depth);

    ConformanceReport rep;
    rep.trials = static_cast<long>(total);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> x_m1(static_cast<std::size_t>(n));
    std::vector<double> worst_x;
    double worst_lhs = 0, worst_rhs = 0;
    for (std::size_t f = 0; f < total; ++f) {
        double m_product = 1.0;
        for (int i = 0; i < n; ++i) {
            const double v = std::min(idx[static_cast<std::size_t>(i)] * step, 1.0);
            x[static_cast<std::size_t>(i)] = v;
            if (in_m[static_cast<std::size_t>(i)]) {
                m_product *= v;
                x_m1[static_cast<std::size_t>(i)] = 1.0;
            } else {
                x_m1[static_cast<std::size_t>(i)] = v;
            }
        }
        const double lhs = copula.value(x);
        const double rhs = m_product * copula.value(x_m1);
        const double dev = std::fabs(lhs - rhs);
        if (dev > rep.worst_violation) {
            rep.worst_violation = dev;
            worst_x = x;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < side) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    if (rep.worst_violation > tol) {
        rep.verdict = ConformanceReport::Verdict::fail;
        Witness w;
        w.x = std::move(worst_x);
        w.lhs = worst_lhs;
        w.rhs = worst_rhs;
        rep.witness = std::move(w);
    }
    return rep;
}

// ---- oracle implementations ------------------------------------------------

CopulaModel::CopulaModel(Copula copula) : copula_(std::move(copula)) {}

std::string CopulaModel::name() const { return copula_.name(); }

double CopulaModel::default_tolerance() const { return copula_.default_tolerance(); }

JointPmf CopulaModel::raw_query(const Profile& profile) const {
    const Copula& c = copula_;
    if (c.dim() == profile.dims()) return build_joint(c, profile);
    return build_joint(c.with_dim(profile.dims()), profile);
}

JointPmf MaximalCouplingModel::raw_query(const Profile& profile) const {
    if (profile.dims() != 2)
        fail("maximal-coupling model is defined for 2 dimensions, got " + std::to_string(profile.dims()));
    return maximal_coupling(profile.at(1), profile.at(2));
}

// ---- subprocess oracle ------------------------------------------------------

struct SubprocessModel::Impl {
    std::string command;
    int timeout_ms;
    pid_t pid = -1;
    int to_child = -1;
    int from_child = -1;
    std::string buffer;

    ~Impl() { shutdown(); }

    void shutdown() {
        if (to_child >= 0) close(to_child);
        if (from_child >= 0) close(from_child);
        to_child = from_child = -1;
        if (pid > 0) {
            int status = 0;
            if (waitpid(pid, &status, WNOHANG) == 0) {
                kill(pid, SIGTERM);
                waitpid(pid, &status, 0);
            }
            pid = -1;
        }
    }

    void spawn() {
        std::vector<std::string> tokens;
        std::istringstream iss(command);
        for (std::string tok; iss >> tok;) tokens.push_back(tok);
        if (tokens.empty()) throw OracleError("empty oracle command");

        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw OracleError("cannot create pipes for oracle process");
        pid = fork();
        if (pid < 0) throw OracleError("cannot fork oracle process");
        if (pid == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            std::vector<char*> argv;
            argv.reserve(tokens.size() + 1);
            for (std::string& t : tokens) argv.push_back(t.data());
            argv.push_back(nullptr);
            execvp(argv[0], argv.data());
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        to_child = in_pipe[1];
        from_child = out_pipe[0];
        signal(SIGPIPE, SIG_IGN);
    }

    std::string roundtrip(const std::string& request) {
        if (pid < 0) spawn();
        std::string line = request;
        line.push_back('\n');
        std::size_t off = 0;
        while (off < line.size()) {
            const ssize_t w = write(to_child, line.data() + off, line.size() - off);
            if (w < 0) {
                if (errno == EINTR) continue;
                throw OracleError("oracle process closed its input: " + std::string(strerror(errno)));
            }
            off += static_cast<std::size_t>(w);
        }
        for (;;) {
            if (const std::size_t nl = buffer.find('\n'); nl != std::string::npos) {
                std::string out = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                return out;
            }
            struct pollfd pfd {from_child, POLLIN, 0};
            const int pr = poll(&pfd, 1, timeout_ms);
            if (pr == 0) throw OracleError("oracle query timed out after " + std::to_string(timeout_ms) + " ms");
            if (pr < 0) {
                if (errno == EINTR) continue;
                throw OracleError("poll on oracle process failed");
            }
            char chunk[4096];
            const ssize_t r = read(from_child, chunk, sizeof chunk);
            if (r < 0) {
                if (errno == EINTR) continue;
                throw OracleError("read from oracle process failed");
            }
            if (r == 0) throw OracleError("oracle process exited before answering");
            buffer.append(chunk, static_cast<std::size_t>(r));
        }
    }
};

SubprocessModel::SubprocessModel(std::string command, int timeout_ms) : impl_(new Impl) {
    impl_->command = std::move(command);
    impl_->timeout_ms = timeout_ms;
}

SubprocessModel::~SubprocessModel() = default;

std::string SubprocessModel::name() const { return "exec:" + impl_->command; }

JointPmf SubprocessModel::raw_query(const Profile& profile) const {
    const std::string answer = impl_->roundtrip(oracle_request_to_json(profile));
    try {
        return parse_joint(answer);
    } catch (const std::exception& e) {
        throw OracleError("oracle answer is not a valid joint: " + std::string(e.what()));
    }
}

std::unique_ptr<ModelOracle> make_model(const std::string& spec) {
    if (spec == "independence") return std::make_unique<CopulaModel>(Copula::independence(2));
    if (spec == "frechet-upper" || spec == "frechet_upper")
        return std::make_unique<CopulaModel>(Copula::frechet_upper(2));
    if (spec == "maximal-coupling" || spec == "maximal_coupling")
        return std::make_unique<MaximalCouplingModel>();
    if (spec.rfind("exec:", 0) == 0) return std::make_unique<SubprocessModel>(spec.substr(5));
    if (spec.rfind("copula:", 0) == 0) {
        std::string body = spec.substr(7);
        if (!body.empty() && body[0] != '{') {
            // Could be a family name or a path to a spec file.
            if (std::ifstream in(body); in.good()) {
                std::ostringstream ss;
                ss << in.rdbuf();
                body = ss.str();
            }
        }
        return std::make_unique<CopulaModel>(parse_copula_spec(body, 2));
    }
    fail("unknown model '" + spec + "' (expected independence, frechet-upper, maximal-coupling, "
         "copula:<spec>, or exec:<command>)");
}

} // namespace discop
