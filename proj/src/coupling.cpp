#include "discop/coupling.hpp"

#include <algorithm>
#include <vector>

namespace discop {

JointPmf maximal_coupling(const Marginal& p1, const Marginal& p2) {
    const int z1 = p1.size();
    const int z2 = p2.size();
    const int zmin = std::min(z1, z2);
    std::vector<double> mass(static_cast<std::size_t>(z1) * z2, 0.0);
    auto at = [&](int s1, int s2) -> double& {
        return mass[static_cast<std::size_t>(s1 - 1) * z2 + (s2 - 1)];
    };

    // Diagonal first: (s,s) takes min(p1(s), p2(s)), the largest diagonal
    // mass any coupling can achieve.
    std::vector<double> r1(static_cast<std::size_t>(z1));
    std::vector<double> r2(static_cast<std::size_t>(z2));
    for (int s = 1; s <= z1; ++s) r1[static_cast<std::size_t>(s - 1)] = p1.prob(s);
    for (int s = 1; s <= z2; ++s) r2[static_cast<std::size_t>(s - 1)] = p2.prob(s);
    for (int s = 1; s <= zmin; ++s) {
        const double d = std::min(p1.prob(s), p2.prob(s));
        at(s, s) = d;
        r1[static_cast<std::size_t>(s - 1)] -= d;
        r2[static_cast<std::size_t>(s - 1)] -= d;
    }

    // Residuals matched by the northwest-corner rule.
    int i = 0, j = 0;
    while (i < z1 && j < z2) {
        if (r1[static_cast<std::size_t>(i)] <= 0.0) {
            ++i;
            continue;
        }
        if (r2[static_cast<std::size_t>(j)] <= 0.0) {
            ++j;
            continue;
        }
        const double a = std::min(r1[static_cast<std::size_t>(i)], r2[static_cast<std::size_t>(j)]);
        at(i + 1, j + 1) += a;
        r1[static_cast<std::size_t>(i)] -= a;
        r2[static_cast<std::size_t>(j)] -= a;
    }
    return JointPmf({z1, z2}, std::move(mass));
}

} // namespace discop
