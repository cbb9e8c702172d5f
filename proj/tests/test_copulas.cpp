#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "discop/copula.hpp"
#include "discop/rng.hpp"
#include "oracles.hpp"

using discop::Copula;
using discop::SeededStream;

namespace {

Copula gaussian2(double rho) { return Copula::gaussian({1, rho, rho, 1}, 2); }

Copula gaussian_ar3(double rho) {
    return Copula::gaussian({1, rho, rho * rho, rho, 1, rho, rho * rho, rho, 1}, 3);
}

std::vector<Copula> catalogue_n2() {
    return {Copula::independence(2), Copula::frechet_upper(2), gaussian2(0.5), gaussian2(-0.5),
            gaussian2(0.0),          Copula::clayton(2, 0.5),  Copula::clayton(2, 2.0),
            Copula::gumbel(2, 1.5),  Copula::gumbel(2, 3.0)};
}

} // namespace

TEST_CASE("construction validates parameters") {
    CHECK_THROWS_AS(Copula::clayton(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Copula::clayton(2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(Copula::gumbel(2, 0.99), std::invalid_argument);
    CHECK_THROWS_AS(Copula::independence(0), std::invalid_argument);
    // gaussian: dimension cap, shape, symmetry, psd
    CHECK_THROWS_AS(Copula::gaussian(std::vector<double>(25, 0.0), 5), std::domain_error);
    CHECK_THROWS_AS(Copula::gaussian({1, 0.5, 0.4, 1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Copula::gaussian({1, 0.5, 0.5, 0.9}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Copula::gaussian({1, -0.9, -0.9, -0.9, 1, -0.9, -0.9, -0.9, 1}, 3),
                    std::invalid_argument); // min eigenvalue -0.8
    // singular but PSD is fine
    CHECK_NOTHROW(Copula::gaussian({1, -0.5, -0.5, -0.5, 1, -0.5, -0.5, -0.5, 1}, 3));
    CHECK_NOTHROW(Copula::gaussian({1, 1, 1, 1}, 2));
}

TEST_CASE("evaluate validates arguments") {
    const Copula c = Copula::independence(2);
    CHECK_THROWS_AS(c.value(std::vector<double>{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(c.value(std::vector<double>{0.5, 1.2}), std::invalid_argument);
    CHECK_THROWS_AS(c.value(std::vector<double>{-0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("closed-form families at anchor points") {
    CHECK(Copula::independence(2).value(std::vector<double>{0.5, 0.5}) == 0.25);
    CHECK(Copula::frechet_upper(3).value(std::vector<double>{0.2, 0.9, 0.4}) == 0.2);
    // identity-correlation gaussian is the independence copula
    CHECK(gaussian2(0.0).value(std::vector<double>{0.3, 0.6}) == doctest::Approx(0.18).epsilon(1e-13));
    for (const auto& t : oracles::clayton_table()) {
        const Copula c = Copula::clayton(static_cast<int>(t.x.size()), t.theta);
        CHECK(c.value(t.x) == doctest::Approx(t.value).epsilon(1e-13));
    }
    for (const auto& t : oracles::gumbel_table()) {
        const Copula c = Copula::gumbel(static_cast<int>(t.x.size()), t.theta);
        CHECK(c.value(t.x) == doctest::Approx(t.value).epsilon(1e-13));
    }
}

TEST_CASE("gaussian copula against frozen quadrature values") {
    for (const auto& t : oracles::gauss2_table()) {
        CHECK(gaussian2(t.rho).value(std::vector<double>{t.x1, t.x2}) ==
              doctest::Approx(t.value).epsilon(1e-11));
    }
    for (const auto& t : oracles::gauss3_table()) {
        const Copula c = Copula::gaussian(
            {1, t.r12, t.r13, t.r12, 1, t.r23, t.r13, t.r23, 1}, 3);
        CHECK(c.value(std::vector<double>{t.x1, t.x2, t.x3}) ==
              doctest::Approx(t.value).epsilon(1e-7));
    }
    // derived anchor: C(0.5,0.5) at rho=0.5 equals 1/4 + asin(1/2)/(2 pi) = 1/3
    CHECK(gaussian2(0.5).value(std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    // 4-dimensional AR(0.5) anchor from the independent QMC oracle
    const Copula g4 = Copula::gaussian({1, 0.5, 0.25, 0.125, 0.5, 1, 0.5, 0.25, 0.25, 0.5, 1, 0.5,
                                        0.125, 0.25, 0.5, 1},
                                       4);
    CHECK(g4.value(std::vector<double>{0.4, 0.6, 0.5, 0.7}) ==
          doctest::Approx(oracles::kGauss4Anchor).epsilon(3e-4));
}

TEST_CASE("boundary behaviour") {
    for (const Copula& c : catalogue_n2()) {
        CHECK(c.value(std::vector<double>{0.0, 0.7}) == 0.0);
        CHECK(c.value(std::vector<double>{0.7, 0.0}) == 0.0);
        CHECK(c.value(std::vector<double>{1.0, 1.0}) == 1.0);
        for (double t : {0.0, 0.25, 0.5, 0.8, 1.0}) {
            CHECK(c.value(std::vector<double>{t, 1.0}) == doctest::Approx(t).epsilon(1e-12));
            CHECK(c.value(std::vector<double>{1.0, t}) == doctest::Approx(t).epsilon(1e-12));
        }
    }
}

TEST_CASE("uniform marginals on a fine grid") {
    for (const Copula& c : catalogue_n2()) {
        for (int k = 0; k <= 100; ++k) {
            const double t = k / 100.0;
            CHECK(c.value(std::vector<double>{t, 1.0}) == doctest::Approx(t).epsilon(1e-10));
        }
    }
}

TEST_CASE("coordinatewise monotonicity (spot checks)") {
    SeededStream rng({314, 15});
    for (const Copula& c : catalogue_n2()) {
        const double tol = c.family() == discop::CopulaFamily::gaussian ? 1e-6 : 1e-10;
        for (int i = 0; i < 120; ++i) {
            double x1 = rng.next_u01(), x2 = rng.next_u01();
            const int coord = rng.next_int(0, 1);
            std::vector<double> lo = {x1, x2};
            std::vector<double> hi = lo;
            hi[static_cast<std::size_t>(coord)] =
                lo[static_cast<std::size_t>(coord)] +
                (1.0 - lo[static_cast<std::size_t>(coord)]) * rng.next_u01();
            CHECK(c.value(hi) >= c.value(lo) - tol);
        }
    }
}

TEST_CASE("clayton approaches independence as theta -> 0") {
    const Copula clayton = Copula::clayton(2, 1e-4);
    const Copula indep = Copula::independence(2);
    double worst = 0;
    for (int i = 1; i <= 8; ++i) {
        for (int j = 1; j <= 8; ++j) {
            const std::vector<double> x = {i / 8.0, j / 8.0};
            worst = std::max(worst, std::fabs(clayton.value(x) - indep.value(x)));
        }
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("gumbel theta=1 is independence") {
    const Copula g = Copula::gumbel(2, 1.0);
    SeededStream rng({99, 1});
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x = {rng.next_u01(), rng.next_u01()};
        CHECK(g.value(x) == doctest::Approx(x[0] * x[1]).epsilon(1e-12));
    }
}

TEST_CASE("gaussian with identity sigma matches independence everywhere") {
    const Copula g = gaussian2(0.0);
    const Copula g3 = gaussian_ar3(0.0);
    SeededStream rng({55, 2});
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x2 = {rng.next_u01(), rng.next_u01()};
        CHECK(g.value(x2) == doctest::Approx(x2[0] * x2[1]).epsilon(1e-6));
        const std::vector<double> x3 = {rng.next_u01(), rng.next_u01(), rng.next_u01()};
        CHECK(g3.value(x3) == doctest::Approx(x3[0] * x3[1] * x3[2]).epsilon(1e-6));
    }
}

TEST_CASE("rectangle probability") {
    const Copula indep = Copula::independence(2);
    CHECK(indep.rectangle_probability(std::vector<double>{0.0, 0.25}, std::vector<double>{0.5, 0.5}) ==
          0.125);
    const Copula frechet = Copula::frechet_upper(2);
    CHECK(frechet.rectangle_probability(std::vector<double>{0.5, 0.5}, std::vector<double>{0.75, 0.75}) ==
          0.25);
    // degenerate box
    for (const Copula& c : catalogue_n2()) {
        CHECK(c.rectangle_probability(std::vector<double>{0.3, 0.2}, std::vector<double>{0.3, 0.9}) ==
              0.0);
    }
    CHECK_THROWS_AS(indep.rectangle_probability(std::vector<double>{0.5, 0.5},
                                                std::vector<double>{0.4, 0.6}),
                    std::invalid_argument);
}

TEST_CASE("partition of unity over grid boxes") {
    for (const Copula& c : catalogue_n2()) {
        const int k = 4;
        const int side = 1 << k;
        double total = 0;
        for (int i = 0; i < side; ++i) {
            for (int j = 0; j < side; ++j) {
                const std::vector<double> lo = {i / double(side), j / double(side)};
                const std::vector<double> hi = {(i + 1) / double(side), (j + 1) / double(side)};
                total += c.rectangle_probability(lo, hi);
            }
        }
        const double tol = c.family() == discop::CopulaFamily::gaussian ? 1e-8 : 2.0 * side * side * 1e-12;
        CHECK(total == doctest::Approx(1.0).epsilon(tol));
    }
}

TEST_CASE("axiom check passes for the catalogue") {
    for (const Copula& c : catalogue_n2()) {
        const auto rep = c.check_axioms(4);
        CHECK(rep.grounded);
        CHECK(rep.uniform_marginals);
        CHECK(rep.n_increasing);
        CHECK(rep.pass());
        CHECK(rep.partition_sum == doctest::Approx(1.0).epsilon(1e-8));
    }
    // independence at the spec's depth: violations are exactly zero
    const auto rep = Copula::independence(2).check_axioms(4);
    CHECK(rep.worst_grounded == 0.0);
    CHECK(rep.worst_marginal == 0.0);
    CHECK(rep.min_box_mass >= 0.0);
}

TEST_CASE("axiom check flags non-copulas supplied as plugins") {
    // valid copula: countermonotone bound max(x+y-1, 0); all axioms hold
    const Copula w = Copula::custom(2, [](std::span<const double> x) {
        return std::max(x[0] + x[1] - 1.0, 0.0);
    }, "frechet-lower");
    CHECK(w.check_axioms(5).pass());

    // ungrounded: x+y-1 without clamping
    const Copula linear = Copula::custom(2, [](std::span<const double> x) {
        return x[0] + x[1] - 1.0;
    }, "linear");
    const auto rep1 = linear.check_axioms(4);
    CHECK_FALSE(rep1.grounded);

    // wrong marginals: sqrt(xy) has C(1,t) = sqrt(t)
    const Copula sq = Copula::custom(2, [](std::span<const double> x) {
        return std::sqrt(x[0] * x[1]);
    }, "sqrt");
    const auto rep2 = sq.check_axioms(4);
    CHECK_FALSE(rep2.uniform_marginals);

    // not 2-increasing: FGM with alpha = 3 (valid only for |alpha| <= 1)
    const Copula fgm = Copula::custom(2, [](std::span<const double> x) {
        return x[0] * x[1] * (1.0 + 3.0 * (1.0 - x[0]) * (1.0 - x[1]));
    }, "fgm3");
    const auto rep3 = fgm.check_axioms(4);
    CHECK(rep3.grounded);
    CHECK(rep3.uniform_marginals);
    CHECK_FALSE(rep3.n_increasing);
    CHECK(rep3.min_box_mass < -1e-4);
}

TEST_CASE("gaussian n=3 axiom check at depth 4") {
    for (double rho : {0.5, -0.5}) {
        const auto rep = gaussian_ar3(rho).check_axioms(4);
        CHECK(rep.pass());
        CHECK(rep.partition_sum == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("singular gaussian evaluates") {
    const Copula eq = Copula::gaussian({1, -0.5, -0.5, -0.5, 1, -0.5, -0.5, -0.5, 1}, 3);
    CHECK(eq.value(std::vector<double>{0.5, 0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(eq.value(std::vector<double>{0.3, 0.7, 0.6}) ==
          doctest::Approx(0.0048269822433456167).epsilon(1e-6));
}

TEST_CASE("dimension-generic re-instantiation") {
    CHECK(Copula::clayton(2, 2.0).with_dim(3).dim() == 3);
    CHECK(Copula::independence(2).with_dim(4).dim() == 4);
    CHECK_THROWS_AS(gaussian2(0.5).with_dim(3), std::domain_error);
}
