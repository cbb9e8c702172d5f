// Test-side oracles, independent of the library's evaluation paths, plus
// reference values frozen from high-precision quadrature computed before the
// implementation existed.
#ifndef DISCOP_TESTS_ORACLES_HPP
#define DISCOP_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double bvn_density(double x, double y, double rho) {
    const double det = 1.0 - rho * rho;
    return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * det)) /
           (6.283185307179586 * std::sqrt(det));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 24);
}

// 2-D adaptive quadrature of the bivariate normal density over
// (-inf,a] x (-inf,b], truncated at -10 (mass beyond is < 1e-23).
inline double bvn_cdf_quadrature(double a, double b, double rho) {
    auto outer = [&](double x) {
        auto inner = [&](double y) { return bvn_density(x, y, rho); };
        return integrate(inner, -10.0, b, 1e-13);
    };
    return integrate(outer, -10.0, a, 1e-11);
}

struct Bvn {
    double a, b, rho, value;
};
// mpmath, 2-D quadrature of the density, ~1e-17.
inline const std::vector<Bvn>& bvn_table() {
    static const std::vector<Bvn> t = {
        {0.0, 0.0, 0.5, 0.33333333333333333},
        {0.5, -0.3, 0.7, 0.35678363479685472},
        {-1.0, 1.0, 0.3, 0.14833820905742245},
        {1.5, 1.5, 0.95, 0.91693980225792852},
        {-0.5, -0.5, -0.95, 2.7161656372142613e-5},
        {0.3, -0.2, 0.99, 0.42073742486027629},
        {1.0, -1.0, -0.99, 0.013651719083462699},
        {2.0, 0.5, 0.925, 0.69146158920002487},
        {0.1, 0.1, 0.93, 0.48022688312412315},
    };
    return t;
}

struct Copula2 {
    double x1, x2, rho, value;
};
// Gaussian copula values C(x1,x2) = Phi2(PhiInv(x1),PhiInv(x2); rho), mpmath.
inline const std::vector<Copula2>& gauss2_table() {
    static const std::vector<Copula2> t = {
        {0.5, 0.5, 0.5, 0.33333333333333333},
        {0.3, 0.6, 0.5, 0.24651547093638558},
        {0.3, 0.6, -0.5, 0.10810931317508182},
        {0.1, 0.2, 0.9, 0.091293788859798731},
        {0.7, 0.8, -0.9, 0.50005667593272882},
        {0.25, 0.75, 0.5, 0.23197429819584094},
        {0.5, 0.5, 0.95, 0.44945868794787004},
        {0.5, 0.5, -0.95, 0.050541312052129957},
        {0.9, 0.9, 0.99, 0.89010389308419654},
        {0.05, 0.95, -0.99, 0.005810513669888284},
    };
    return t;
}

struct Tvn {
    double a1, a2, a3;
    double r12, r13, r23;
    double value;
};
// Trivariate normal cdf values, mpmath nested quadrature (conditional form).
inline const std::vector<Tvn>& tvn_table() {
    static const std::vector<Tvn> t = {
        {0.0, 0.0, 0.0, 0.5, 0.25, 0.5, 0.22844098914712489},        // AR(0.5)
        {0.5, -0.2, 1.0, 0.5, 0.25, 0.5, 0.34152701540298425},       // AR(0.5)
        {0.0, 0.0, 0.0, -0.5, 0.25, -0.5, 0.061774322480458228},     // AR(-0.5)
        {0.6, 0.1, -0.3, -0.5, -0.5, -0.5, 0.012741585564364008},    // singular
        {0.2, -0.4, 0.9, 0.0, 0.0, 0.5, 0.18844781859590747},        // block diag
        {-0.3, 0.6, 0.1, 0.3, -0.2, 0.4, 0.16264713318853036},       // general
    };
    return t;
}

struct Gauss3 {
    double x1, x2, x3;
    double r12, r13, r23;
    double value;
};
inline const std::vector<Gauss3>& gauss3_table() {
    static const std::vector<Gauss3> t = {
        {0.5, 0.5, 0.5, 0.5, 0.25, 0.5, 0.22844098914712489},
        {0.25, 0.5, 0.75, 0.5, 0.25, 0.5, 0.17053139916976573},
        {0.3, 0.7, 0.6, -0.5, -0.5, -0.5, 0.0048269822433456167},   // singular
        {0.3, 0.6, 0.7, 0.0, 0.0, 0.5, 0.14756720604747544},        // block diag
    };
    return t;
}

// 4-D anchors from an independent quasi-Monte Carlo implementation
// (accuracy ~5e-6); sigma is AR(0.5): rho_ij = 0.5^|i-j|.
struct Four {
    double a1, a2, a3, a4, value;
};
inline const std::vector<Four>& mvn4_table() {
    static const std::vector<Four> t = {
        {0.0, 0.0, 0.0, 0.0, 0.157662},
        {0.5, -0.2, 1.0, 0.3, 0.249468},
    };
    return t;
}
// Gaussian copula AR(0.5), n=4, x=(0.4,0.6,0.5,0.7).
inline constexpr double kGauss4Anchor = 0.180495;

struct Archimedean {
    std::vector<double> x;
    double theta, value;
};
inline const std::vector<Archimedean>& clayton_table() {
    static const std::vector<Archimedean> t = {
        {{0.3, 0.6}, 2.0, 0.27854300726557778},
        {{0.3, 0.6}, 0.5, 0.22318576009630529},
        {{0.2, 0.5, 0.8}, 2.0, 0.1871121078899952},
        {{0.5, 0.5}, 2.0, 0.37796447300922723},
        {{0.9, 0.1}, 0.5, 0.096664706574113858},
    };
    return t;
}
inline const std::vector<Archimedean>& gumbel_table() {
    static const std::vector<Archimedean> t = {
        {{0.3, 0.6}, 1.5, 0.24252181521175677},
        {{0.3, 0.6}, 3.0, 0.29116176927653344},
        {{0.2, 0.5, 0.8}, 2.0, 0.17092951166984333},
        {{0.5, 0.5}, 1.5, 0.33277038426286512},
        {{0.9, 0.1}, 3.0, 0.099992647226380933},
    };
    return t;
}

// Exhaustive search over all couplings of two pmfs whose masses are integer
// multiples of 1/unit, maximizing total diagonal mass. Supports z <= 3 per
// side at unit 24 comfortably.
inline int max_diagonal_search(const std::vector<int>& row_units,
                               const std::vector<int>& col_units) {
    const int z1 = static_cast<int>(row_units.size());
    const int z2 = static_cast<int>(col_units.size());
    std::vector<int> row_left = row_units, col_left = col_units;
    int best = -1;
    std::function<void(int, int)> place = [&](int cell, int diag) {
        if (cell == z1 * z2) {
            bool done = true;
            for (int v : row_left) done &= v == 0;
            for (int v : col_left) done &= v == 0;
            if (done) best = std::max(best, diag);
            return;
        }
        const int r = cell / z2, c = cell % z2;
        const int cap = std::min(row_left[r], col_left[c]);
        // prune: remaining row mass must still be placeable
        for (int put = 0; put <= cap; ++put) {
            row_left[r] -= put;
            col_left[c] -= put;
            if (!(c == z2 - 1 && row_left[r] != 0)) // row must be exhausted at its end
                place(cell + 1, diag + (r == c ? put : 0));
            row_left[r] += put;
            col_left[c] += put;
        }
    };
    place(0, 0);
    return best;
}

} // namespace oracles

#endif
