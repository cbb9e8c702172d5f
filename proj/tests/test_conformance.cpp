#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "discop/conformance.hpp"
#include "discop/coupling.hpp"
#include "discop/json_io.hpp"
#include "discop/rng.hpp"

using namespace discop;

namespace {

Profile fixture() { return canonical_fixture_profile(); }

CopulaModel independence_model() { return CopulaModel(Copula::independence(2)); }

CopulaModel frechet_model() { return CopulaModel(Copula::frechet_upper(2)); }

CopulaModel gaussian_model(double rho) {
    return CopulaModel(Copula::gaussian({1, rho, rho, 1}, 2));
}

// Deliberately broken oracle: right shape, wrong marginals.
class SkewedModel : public ModelOracle {
public:
    std::string name() const override { return "skewed"; }
    JointPmf raw_query(const Profile& p) const override {
        JointPmf j = build_joint(Copula::independence(p.dims()), p);
        std::vector<double> mass(j.mass().begin(), j.mass().end());
        if (mass.size() >= 2) {
            mass.front() += 1e-3;
            mass.back() -= 1e-3;
        }
        return JointPmf(j.shape(), std::move(mass));
    }
};

// Oracle with a wrong shape.
class WrongShapeModel : public ModelOracle {
public:
    std::string name() const override { return "wrong-shape"; }
    JointPmf raw_query(const Profile& p) const override {
        std::vector<int> shape = p.shape();
        shape[0] += 1;
        std::size_t cells = 1;
        for (int z : shape) cells *= static_cast<std::size_t>(z);
        std::vector<double> mass(cells, 1.0 / static_cast<double>(cells));
        return JointPmf(shape, std::move(mass));
    }
};

} // namespace

TEST_CASE("ia holds cell-by-cell for the independence model on the reference merge") {
    const ConformanceReport rep = check_ia_at(independence_model(), fixture(), 1, 3, 1e-9);
    CHECK(rep.passed());
    CHECK(rep.worst_violation <= 1e-15);
    // the unaffected cell keeps its value on both sides of the merge
    const JointPmf fine = build_joint(Copula::independence(2), fixture());
    const JointPmf coarse = build_joint(Copula::independence(2), fixture().collapsed(1, 3));
    const int c12[2] = {1, 2};
    CHECK(fine.mass_at(c12) == 0.125);
    CHECK(coarse.mass_at(c12) == 0.125);
}

TEST_CASE("ia fails for the maximal coupling with the documented witness") {
    const MaximalCouplingModel model;
    const ConformanceReport rep = check_ia_at(model, fixture(), 1, 3, 1e-9);
    CHECK(rep.verdict == ConformanceReport::Verdict::fail);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->dim == 1);
    CHECK(rep.witness->merge_bin == 3);
    CHECK(rep.witness->cell == std::vector<int>{1, 4});
    CHECK(rep.witness->lhs == 0.25);
    CHECK(rep.witness->rhs == 0.125);
    CHECK(rep.worst_violation == 0.125);
}

TEST_CASE("boundary merge on a two-bin dimension") {
    const Profile p({Marginal({0.3, 0.7}), Marginal({0.25, 0.25, 0.25, 0.25})});
    const ConformanceReport rep = check_ia_at(independence_model(), p, 1, 1, 1e-9);
    CHECK(rep.passed());
}

TEST_CASE("check_ia_at validates indices") {
    CHECK_THROWS_AS(check_ia_at(independence_model(), fixture(), 0, 1, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(check_ia_at(independence_model(), fixture(), 3, 1, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(check_ia_at(independence_model(), fixture(), 1, 4, 1e-9), std::invalid_argument);
    const Profile single({Marginal({1.0}), Marginal({0.5, 0.5})});
    CHECK_THROWS_AS(check_ia_at(independence_model(), single, 1, 1, 1e-9), std::invalid_argument);
}

TEST_CASE("randomized ia suite passes copula models and nails the coupling") {
    const ConformanceReport ok = check_ia_randomized(independence_model(), 200, 42, 2, 6, 1e-9);
    CHECK(ok.passed());
    CHECK(ok.trials == 200);
    CHECK(ok.worst_violation <= 1e-12);

    const ConformanceReport ok3 = check_ia_randomized(frechet_model(), 100, 42, 3, 6, 1e-9);
    CHECK(ok3.passed());

    const MaximalCouplingModel mc;
    const ConformanceReport bad = check_ia_randomized(mc, 1000, 42, 2, 6, 1e-9);
    CHECK(bad.verdict == ConformanceReport::Verdict::fail);
    CHECK(bad.trials == 1); // trial 0 is the canonical fixture
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->cell == std::vector<int>{1, 4});

    const ConformanceReport g = check_ia_randomized(gaussian_model(0.5), 60, 42, 2, 5, 1e-5);
    CHECK(g.passed());
}

TEST_CASE("non-models are reported as such") {
    const SkewedModel skew;
    const ConformanceReport rep = check_ia_randomized(skew, 10, 1, 2, 4, 1e-9);
    CHECK(rep.verdict == ConformanceReport::Verdict::not_a_model);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.worst_violation > 1e-7);

    const WrongShapeModel ws;
    const ConformanceReport rep2 = check_ia_at(ws, fixture(), 1, 3, 1e-9);
    CHECK(rep2.verdict == ConformanceReport::Verdict::not_a_model);
}

TEST_CASE("copula extraction reads off single queries") {
    CHECK(extract_copula(independence_model(), std::vector<double>{0.5, 0.25}) == 0.125);
    CHECK(extract_copula(frechet_model(), std::vector<double>{0.3, 0.7}) == doctest::Approx(0.3).epsilon(1e-15));
    const MaximalCouplingModel mc;
    CHECK(extract_copula(mc, std::vector<double>{0.5, 0.5}) == 0.5);
    CHECK_THROWS_AS(extract_copula(independence_model(), std::vector<double>{0.5, 1.5}),
                    std::invalid_argument);
}

TEST_CASE("extraction of a copula model recovers its copula on the dyadic grid") {
    struct Case {
        CopulaModel model;
        Copula reference;
        double tol;
    };
    std::vector<Case> cases;
    cases.push_back({independence_model(), Copula::independence(2), 1e-9});
    cases.push_back({frechet_model(), Copula::frechet_upper(2), 1e-9});
    cases.push_back({CopulaModel(Copula::clayton(2, 2.0)), Copula::clayton(2, 2.0), 1e-9});
    cases.push_back({CopulaModel(Copula::gumbel(2, 1.5)), Copula::gumbel(2, 1.5), 1e-9});
    cases.push_back({gaussian_model(0.5), Copula::gaussian({1, 0.5, 0.5, 1}, 2), 1e-5});
    for (const auto& c : cases) {
        const CopulaGrid grid = CopulaGrid::extract(c.model, 2, 4);
        const int side = grid.points_per_axis();
        for (int i = 0; i < side; ++i) {
            for (int j = 0; j < side; ++j) {
                const std::vector<double> x = {i / double(side - 1), j / double(side - 1)};
                const int idx[2] = {i, j};
                CHECK(std::fabs(grid.at(idx) - c.reference.value(x)) <= c.tol);
            }
        }
    }
}

TEST_CASE("extraction is monotone for models satisfying aggregation invariance") {
    const CopulaGrid grid = CopulaGrid::extract(CopulaModel(Copula::gumbel(2, 2.0)), 2, 4);
    const int side = grid.points_per_axis();
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j + 1 < side; ++j) {
            const int a[2] = {i, j}, b[2] = {i, j + 1}, c[2] = {j, i}, d[2] = {j + 1, i};
            CHECK(grid.at(b) >= grid.at(a) - 1e-12);
            CHECK(grid.at(d) >= grid.at(c) - 1e-12);
        }
    }
}

TEST_CASE("grid interpolation stays within the Lipschitz slack") {
    const CopulaGrid grid = CopulaGrid::extract(independence_model(), 2, 4);
    const Copula indep = Copula::independence(2);
    SeededStream rng({21, 12});
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x = {rng.next_u01(), rng.next_u01()};
        CHECK(std::fabs(grid.value(x) - indep.value(x)) <= grid.lipschitz_slack());
    }
}

TEST_CASE("extraction consistency: hypothesis checks") {
    const ConformanceReport ok = verify_extraction_consistency(
        independence_model(), Copula::independence(2), 50, 7, 6, 1e-12);
    CHECK(ok.passed());

    // comonotone model against its own extracted grid
    const CopulaGrid grid = CopulaGrid::extract(frechet_model(), 2, 6);
    const ConformanceReport ok2 =
        verify_extraction_consistency(frechet_model(), grid, 50, 7, 6, 1e-9);
    CHECK(ok2.passed());

    // the coupling's extracted grid is the comonotone copula, but the model
    // is not the comonotone model: consistency must fail with a witness
    const MaximalCouplingModel mc;
    const CopulaGrid mc_grid = CopulaGrid::extract(mc, 2, 6);
    const ConformanceReport bad = verify_extraction_consistency(mc, mc_grid, 50, 7, 6, 1e-9);
    CHECK(bad.verdict == ConformanceReport::Verdict::fail);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->profile.has_value());

    // mismatch against a wrong catalogue hypothesis is also caught
    const ConformanceReport bad2 = verify_extraction_consistency(
        frechet_model(), Copula::independence(2), 50, 7, 6, 1e-9);
    CHECK(bad2.verdict == ConformanceReport::Verdict::fail);
}

TEST_CASE("label neutrality holds for the independence model") {
    const ConformanceReport rep =
        check_m_neutrality_randomized(independence_model(), 100, 42, 2, 6, 1e-12);
    CHECK(rep.passed());
    CHECK(rep.trials == 100);

    const ConformanceReport rep3 =
        check_m_neutrality_randomized(independence_model(), 50, 42, 3, 5, 1e-12);
    CHECK(rep3.passed());
}

TEST_CASE("label neutrality fails for the comonotone model on the derived witness") {
    const Profile p({Marginal({0.5, 0.25, 0.25}), Marginal({0.25, 0.25, 0.25, 0.25})});
    const ConformanceReport rep = check_m_neutrality(frechet_model(), p, 1, Permutation({2, 1, 3}), 1e-9);
    CHECK(rep.verdict == ConformanceReport::Verdict::fail);
    CHECK(rep.worst_violation == 0.25);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->sigma == std::vector<int>{2, 1, 3});

    // randomized run catches it via the built-in discriminating trial 0
    const ConformanceReport rnd = check_m_neutrality_randomized(frechet_model(), 100, 42, 2, 6, 1e-9);
    CHECK(rnd.verdict == ConformanceReport::Verdict::fail);
    CHECK(rnd.trials == 1);
}

TEST_CASE("gaussian with an independent coordinate is neutral in it") {
    // dimension 1 independent of the correlated (2,3) block
    const CopulaModel model(Copula::gaussian({1, 0, 0, 0, 1, 0.5, 0, 0.5, 1}, 3));
    const Profile p({Marginal({0.25, 0.5, 0.25}), Marginal({0.5, 0.5}), Marginal({0.1, 0.4, 0.5})});
    const ConformanceReport rep = check_m_neutrality(model, p, 1, Permutation({3, 1, 2}), 1e-5);
    CHECK(rep.passed());
}

TEST_CASE("factorization over M on the dyadic grid") {
    const ConformanceReport ok =
        verify_factorization(Copula::independence(2), std::vector<int>{1}, 5, 1e-12);
    CHECK(ok.passed());
    CHECK(ok.worst_violation == 0.0);

    const ConformanceReport bad =
        verify_factorization(Copula::frechet_upper(2), std::vector<int>{1}, 5, 1e-9);
    CHECK(bad.verdict == ConformanceReport::Verdict::fail);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.worst_violation == 0.25);
    CHECK(bad.witness->x == std::vector<double>{0.5, 0.5});
    // deviation at the documented spot check
    const Copula fu = Copula::frechet_upper(2);
    const double lhs = fu.value(std::vector<double>{0.5, 0.25});
    const double rhs = 0.5 * fu.value(std::vector<double>{1.0, 0.25});
    CHECK(std::fabs(lhs - rhs) == 0.125);

    const ConformanceReport g = verify_factorization(
        Copula::gaussian({1, 0, 0, 0, 1, 0.5, 0, 0.5, 1}, 3), std::vector<int>{1}, 4, 1e-5);
    CHECK(g.passed());

    CHECK_THROWS_AS(verify_factorization(Copula::independence(2), std::vector<int>{3}, 4, 1e-9),
                    std::invalid_argument);
}

TEST_CASE("fail witnesses replay bit for bit") {
    const MaximalCouplingModel mc;
    const ConformanceReport rep = check_ia_randomized(mc, 100, 42, 2, 6, 1e-9);
    REQUIRE(rep.witness.has_value());
    // serialize, parse back, replay
    const std::string json = report_to_json(rep);
    const std::string profile_json = profile_to_json(*rep.witness->profile);
    const Profile replayed = parse_profile(profile_json);
    const ConformanceReport again =
        check_ia_at(mc, replayed, rep.witness->dim, rep.witness->merge_bin, 1e-9);
    CHECK(again.worst_violation == rep.worst_violation); // bitwise
    CHECK(again.witness->cell == rep.witness->cell);
    CHECK(json.find("\"verdict\":\"fail\"") != std::string::npos);
}

TEST_CASE("model registry") {
    auto m1 = make_model("independence");
    CHECK(m1->raw_query(fixture()).dims() == 2);
    auto m2 = make_model("maximal-coupling");
    CHECK(m2->name() == "maximal-coupling");
    auto m3 = make_model("copula:{\"family\":\"clayton\",\"theta\":2.0,\"n\":2}");
    CHECK(m3->raw_query(fixture()).dims() == 2);
    CHECK_THROWS_AS(make_model("no-such-model"), std::invalid_argument);
    // dimension-generic adaptation
    const Profile p3({Marginal({0.5, 0.5}), Marginal({0.5, 0.5}), Marginal({1.0})});
    CHECK(m1->raw_query(p3).dims() == 3);
    // maximal coupling rejects n != 2
    CHECK_THROWS_AS(m2->raw_query(p3), std::invalid_argument);
}

TEST_CASE("subprocess oracle speaks the line protocol") {
    const std::string oracle_path = DISCOP_ORACLE_PATH;
    SubprocessModel model(oracle_path + " --model independence");
    const ConformanceReport rep = check_ia_at(model, fixture(), 1, 3, 1e-9);
    CHECK(rep.passed());

    // same answers as the in-process model
    CheckedOracle sub(model);
    const JointPmf& j = sub.query(fixture());
    const int c12[2] = {1, 2};
    CHECK(j.mass_at(c12) == 0.125);
}

TEST_CASE("subprocess oracle failures are classified") {
    const std::string oracle_path = DISCOP_ORACLE_PATH;
    // marginal-violating oracle -> not-a-model
    SubprocessModel corrupt(oracle_path + " --model independence --corrupt");
    const ConformanceReport rep = check_ia_at(corrupt, fixture(), 1, 3, 1e-9);
    CHECK(rep.verdict == ConformanceReport::Verdict::not_a_model);

    // dead command -> oracle error
    SubprocessModel dead("/nonexistent-oracle-binary");
    CHECK_THROWS_AS(dead.raw_query(fixture()), OracleError);

    // unresponsive command -> timeout
    SubprocessModel slow("sleep 30", 300);
    CHECK_THROWS_AS(slow.raw_query(fixture()), OracleError);
}
