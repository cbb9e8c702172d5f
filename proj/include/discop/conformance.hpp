#ifndef DISCOP_CONFORMANCE_HPP
#define DISCOP_CONFORMANCE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "discop/copula.hpp"
#include "discop/joint.hpp"
#include "discop/marginal.hpp"

namespace discop {

/// A marginals-to-joint map under test. Implementations may be arbitrary
/// (in-process or external); the conformance layer asserts, rather than
/// assumes, that every answer has the right shape and reproduces the queried
/// marginals.
class ModelOracle {
public:
    virtual ~ModelOracle() = default;
    virtual std::string name() const = 0;
    /// Unvalidated map Profile -> JointPmf.
    virtual JointPmf raw_query(const Profile& profile) const = 0;
    /// Comparison tolerance this oracle can be held to (1e-9 unless the
    /// model is backed by quadrature, e.g. gaussian -> 1e-5).
    virtual double default_tolerance() const { return 1e-9; }
};

/// Thrown when an oracle's answer fails the marginal constraint or has the
/// wrong shape: the map is not a model at all.
class NotAModelError : public std::runtime_error {
public:
    NotAModelError(std::string msg, Profile profile, int dim, int bin, double got, double want)
        : std::runtime_error(std::move(msg)), profile(std::move(profile)), dim(dim), bin(bin),
          got(got), want(want) {}
    Profile profile;
    int dim;
    int bin;
    double got;
    double want;
};

/// Thrown when an external oracle cannot be queried (process died, timeout,
/// malformed answer).
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Witness {
    std::optional<Profile> profile;
    int dim = 0;             // i, 1-based; 0 when absent
    int merge_bin = 0;       // j, 1-based; 0 when absent
    std::vector<int> sigma;  // permutation, for neutrality checks
    std::vector<int> cell;   // grid cell s
    std::vector<double> x;   // copula argument, for factorization checks
    double lhs = 0;
    double rhs = 0;
};

struct ConformanceReport {
    enum class Verdict { pass, fail, not_a_model };
    Verdict verdict = Verdict::pass;
    long trials = 0;
    double worst_violation = 0;
    std::optional<Witness> witness;
    bool passed() const { return verdict == Verdict::pass; }
};

std::string verdict_name(ConformanceReport::Verdict v);

/// Caching, validating front end to a ModelOracle. Queries are memoized per
/// instance (one instance per conformance run); every answer is checked for
/// shape and for the marginal constraint at 1e-7.
class CheckedOracle {
public:
    explicit CheckedOracle(const ModelOracle& oracle) : oracle_(oracle) {}
    const JointPmf& query(const Profile& profile) const;
    const ModelOracle& oracle() const { return oracle_; }

private:
    const ModelOracle& oracle_;
    mutable std::map<std::string, JointPmf> cache_;
};

// ---- aggregation invariance (IA) ----------------------------------------

/// Check the aggregation identity for one profile and one merge (dim, bin):
/// the model of the merged profile must equal the original model with the two
/// affected slices summed at bin and all other slices shifted past it.
ConformanceReport check_ia_at(const ModelOracle& model, const Profile& profile, int dim, int bin,
                              double tol);

/// Randomized IA suite over seeded Dirichlet-uniform profiles and uniformly
/// drawn merges. Trial 0 of every 2-dimensional run is the canonical
/// ((1/2,1/4,1/8,1/8),(1/4,1/4,1/4,1/4)) fixture with merge (1,3), so the
/// known counterexample cell is always exercised. Stops at the first failing
/// trial; deterministic for a fixed seed.
ConformanceReport check_ia_randomized(const ModelOracle& model, long trials, std::uint64_t seed,
                                      int dims, int zmax, double tol);

// ---- copula extraction ----------------------------------------------------

/// Value of the model's induced copula at x, read off a single query on the
/// profile of binary marginals (x_i, 1-x_i): the mass of the all-ones cell.
double extract_copula(const ModelOracle& model, std::span<const double> x);

/// Copula values tabulated on the dyadic lattice {j/2^depth}^dim with
/// multilinear interpolation in between. Interpolation error for a true
/// copula is at most dim * 2^-depth (copulas are 1-Lipschitz per coordinate).
class CopulaGrid {
public:
    CopulaGrid(int dim, int depth, std::vector<double> values);
    static CopulaGrid extract(const ModelOracle& model, int dims, int depth);

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    const std::vector<double>& values() const { return values_; }
    int points_per_axis() const { return side_; }

    double value(std::span<const double> x) const;
    /// Grid value at lattice multi-index (each coordinate 0..2^depth).
    double at(std::span<const int> idx) const;
    /// Worst-case interpolation slack dim * 2^-depth.
    double lipschitz_slack() const;

private:
    int dim_;
    int depth_;
    int side_;
    std::vector<double> values_;
};

/// Compare the model's joint cdfs against a hypothesized copula on seeded
/// random profiles: cdf(f(p), s) must equal C(F_1(s_1),...,F_n(s_n)) at every
/// cell. Trial 0 of 2-dimensional runs is the canonical fixture.
ConformanceReport verify_extraction_consistency(const ModelOracle& model, const Copula& hypothesis,
                                                long trials, std::uint64_t seed, int zmax,
                                                double tol);
/// Grid variant; the grid's Lipschitz interpolation slack is added to tol.
ConformanceReport verify_extraction_consistency(const ModelOracle& model,
                                                const CopulaGrid& hypothesis, long trials,
                                                std::uint64_t seed, int zmax, double tol);

// ---- neutrality -----------------------------------------------------------

/// Check label neutrality in dimension dim for one profile and permutation:
/// relabeling the marginal's bins must relabel the joint the same way.
ConformanceReport check_m_neutrality(const ModelOracle& model, const Profile& profile, int dim,
                                     const Permutation& sigma, double tol);

/// Randomized neutrality suite over seeded profiles, dimensions and
/// permutations. Trial 0 of 2-dimensional runs uses the
/// ((1/2,1/4,1/4), uniform-4) profile with sigma=(2,1,3), a known
/// discriminating case for order-sensitive models.
ConformanceReport check_m_neutrality_randomized(const ModelOracle& model, long trials,
                                                std::uint64_t seed, int dims, int zmax, double tol);

/// Check the product factorization over the coordinate set M on the dyadic
/// grid: C(x) = (prod_{i in M} x_i) * C(x with M-coordinates set to 1).
/// Models neutral in M are exactly those whose copula factors this way.
ConformanceReport verify_factorization(const Copula& copula, std::span<const int> m_dims,
                                       int grid_depth, double tol);

// ---- oracle implementations ----------------------------------------------

/// Model induced by a copula family. Dimension-generic families are
/// re-instantiated to match each queried profile; gaussian requires the
/// profile dimension to match sigma.
class CopulaModel : public ModelOracle {
public:
    explicit CopulaModel(Copula copula);
    std::string name() const override;
    JointPmf raw_query(const Profile& profile) const override;
    double default_tolerance() const override;
    const Copula& copula() const { return copula_; }

private:
    Copula copula_;
};

/// The maximal-coupling model (2 dimensions only); the standard example of a
/// marginals-to-joint map that is NOT aggregation invariant.
class MaximalCouplingModel : public ModelOracle {
public:
    std::string name() const override { return "maximal-coupling"; }
    JointPmf raw_query(const Profile& profile) const override;
};

/// Oracle implemented by an external process speaking one JSON request
/// ({"profile":[[...],...]}) per line on stdin and one JSON joint
/// ({"shape":[...],"mass":[...]}) per line on stdout.
class SubprocessModel : public ModelOracle {
public:
    /// command is tokenized on whitespace; timeout applies per query.
    explicit SubprocessModel(std::string command, int timeout_ms = 30000);
    ~SubprocessModel() override;
    SubprocessModel(const SubprocessModel&) = delete;
    SubprocessModel& operator=(const SubprocessModel&) = delete;

    std::string name() const override;
    JointPmf raw_query(const Profile& profile) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Named model registry used by the CLI and the C API:
///   "independence" | "frechet-upper" | "maximal-coupling"
///   "copula:<name-or-json-or-path>"  (file contents must be CopulaSpec JSON)
///   "exec:<command line>"            (subprocess protocol above)
std::unique_ptr<ModelOracle> make_model(const std::string& spec);

/// Canonical 2-dimensional fixture profile ((1/2,1/4,1/8,1/8), uniform-4).
Profile canonical_fixture_profile();

/// Seeded random profile: z_i uniform in {1,...,zmax} (the dimension
/// force_dim, if >= 1, draws from {2,...,zmax}), masses Dirichlet(1,...,1).
Profile random_profile(std::uint64_t seed, std::uint64_t trial, int dims, int zmax,
                       int force_dim = 0);

} // namespace discop

#endif
