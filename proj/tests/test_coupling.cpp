#include <doctest.h>

#include <cmath>
#include <vector>

#include "discop/coupling.hpp"
#include "discop/rng.hpp"
#include "oracles.hpp"

using discop::JointPmf;
using discop::Marginal;
using discop::maximal_coupling;
using discop::SeededStream;

namespace {

double cell(const JointPmf& j, int s1, int s2) {
    const int idx[2] = {s1, s2};
    return j.mass_at(idx);
}

} // namespace

TEST_CASE("maximal coupling reproduces the 3x4 reference table") {
    const JointPmf j = maximal_coupling(Marginal({0.5, 0.25, 0.25}), Marginal({0.25, 0.25, 0.25, 0.25}));
    CHECK(cell(j, 1, 1) == 0.25);
    CHECK(cell(j, 2, 2) == 0.25);
    CHECK(cell(j, 3, 3) == 0.25);
    CHECK(cell(j, 1, 4) == 0.25);
    double rest = 0;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 4; ++b)
            if (!(a == b || (a == 1 && b == 4))) rest += cell(j, a, b);
    CHECK(rest == 0.0);
}

TEST_CASE("maximal coupling reproduces the refined 4x4 reference table") {
    const JointPmf j =
        maximal_coupling(Marginal({0.5, 0.25, 0.125, 0.125}), Marginal({0.25, 0.25, 0.25, 0.25}));
    CHECK(cell(j, 1, 1) == 0.25);
    CHECK(cell(j, 2, 2) == 0.25);
    CHECK(cell(j, 3, 3) == 0.125);
    CHECK(cell(j, 4, 4) == 0.125);
    CHECK(cell(j, 1, 3) == 0.125);
    CHECK(cell(j, 1, 4) == 0.125);
    double rest = 0;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            if (!(a == b || (a == 1 && (b == 3 || b == 4)))) rest += cell(j, a, b);
    CHECK(rest == 0.0);
}

TEST_CASE("the refinement changes a cell that aggregation invariance would pin") {
    const JointPmf coarse =
        maximal_coupling(Marginal({0.5, 0.25, 0.25}), Marginal({0.25, 0.25, 0.25, 0.25}));
    const JointPmf fine =
        maximal_coupling(Marginal({0.5, 0.25, 0.125, 0.125}), Marginal({0.25, 0.25, 0.25, 0.25}));
    CHECK(cell(coarse, 1, 4) == 0.25);
    CHECK(cell(fine, 1, 4) == 0.125);
}

TEST_CASE("identical marginals couple on the diagonal") {
    const Marginal p({0.2, 0.3, 0.5});
    const JointPmf j = maximal_coupling(p, p);
    for (int s = 1; s <= 3; ++s) CHECK(cell(j, s, s) == p.prob(s));
    const Marginal m1 = j.marginal_of(1);
    for (int s = 1; s <= 3; ++s) CHECK(m1.prob(s) == p.prob(s));
}

TEST_CASE("marginals are preserved and diagonal mass equals the overlap") {
    SeededStream rng({3, 33});
    for (int trial = 0; trial < 200; ++trial) {
        const int z1 = rng.next_int(1, 6);
        const int z2 = rng.next_int(1, 6);
        auto gen = [&](int z) {
            std::vector<double> e(static_cast<std::size_t>(z));
            double sum = 0;
            for (double& v : e) {
                v = -std::log(rng.next_u01());
                sum += v;
            }
            for (double& v : e) v /= sum;
            return Marginal(e);
        };
        const Marginal p1 = gen(z1), p2 = gen(z2);
        const JointPmf j = maximal_coupling(p1, p2);
        for (int s = 1; s <= z1; ++s) CHECK(std::fabs(j.marginal_of(1).prob(s) - p1.prob(s)) <= 1e-12);
        for (int s = 1; s <= z2; ++s) CHECK(std::fabs(j.marginal_of(2).prob(s) - p2.prob(s)) <= 1e-12);
        double diag = 0, overlap = 0;
        for (int s = 1; s <= std::min(z1, z2); ++s) {
            diag += cell(j, s, s);
            overlap += std::min(p1.prob(s), p2.prob(s));
        }
        CHECK(diag == doctest::Approx(overlap).epsilon(1e-14));
    }
}

TEST_CASE("diagonal mass is maximal (exhaustive search on 1/24 grids)") {
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> cases = {
        {{12, 6, 6}, {8, 8, 8}},
        {{24}, {10, 14}},
        {{8, 8, 8}, {6, 12, 6}},
        {{20, 3, 1}, {1, 3, 20}},
        {{9, 7, 8}, {12, 6, 6}},
    };
    for (const auto& [r, c] : cases) {
        std::vector<double> p1, p2;
        for (int v : r) p1.push_back(v / 24.0);
        for (int v : c) p2.push_back(v / 24.0);
        const JointPmf j = maximal_coupling(Marginal(p1), Marginal(p2));
        double diag = 0;
        for (int s = 1; s <= static_cast<int>(std::min(r.size(), c.size())); ++s) diag += cell(j, s, s);
        const int best_units = oracles::max_diagonal_search(r, c);
        CHECK(diag == doctest::Approx(best_units / 24.0).epsilon(1e-14));
    }
}
