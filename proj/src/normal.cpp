#include "discop/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "discop/rng.hpp"

namespace discop::normal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;
constexpr double kInvSqrtTwoPi = 0.39894228040143267793994605993438;
constexpr double kSqrtHalf = 0.70710678118654752440084436210485;

// Gauss-Legendre half-tables on [-1,1] (nodes are +-x with equal weights).
constexpr double kGL6x[] = {0.9324695142031521, 0.6612093864662645, 0.2386191860831969};
constexpr double kGL6w[] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
constexpr double kGL12x[] = {0.9815606342467192, 0.9041172563704749, 0.7699026741943047,
                             0.5873179542866175, 0.3678314989981802, 0.1252334085114689};
constexpr double kGL12w[] = {0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
                             0.2031674267230659, 0.2334925365383548, 0.2491470458134028};
constexpr double kGL20x[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                             0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                             0.5108670019508271, 0.3737060887154195, 0.2277858511416451,
                             0.0765265211334973};
constexpr double kGL20w[] = {0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
                             0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
                             0.1316886384491766, 0.1420961093183820, 0.1491729864726037,
                             0.1527533871307258};

// 23-point Kronrod rule with embedded 11-point Gauss rule (TVPACK's KRNRDT).
constexpr double kKrX[] = {0.9963696138895427, 0.9782286581460570, 0.9416771085780681,
                           0.8870625997680953, 0.8160574566562211, 0.7301520055740492,
                           0.6305995201619651, 0.5190961292068118, 0.3979441409523776,
                           0.2695431559523450, 0.1361130007993617};
constexpr double kKrWK[] = {0.9765441045961290e-02, 0.2715655468210443e-01, 0.4582937856442671e-01,
                            0.6309742475037484e-01, 0.7866457193222764e-01, 0.9295309859690074e-01,
                            0.1058720744813894, 0.1167395024610472, 0.1251587991003195,
                            0.1312806842298057, 0.1351935727998845};
constexpr double kKrWK0 = 0.1365777947111183;
constexpr double kKrWG[] = {0.5566856711617449e-01, 0.1255803694649048, 0.1862902109277352,
                            0.2331937645919914, 0.2628045445102478};
constexpr double kKrWG0 = 0.2729250867779007;

} // namespace

double pdf(double x) { return kInvSqrtTwoPi * std::exp(-0.5 * x * x); }

double cdf(double x) { return 0.5 * std::erfc(-x * kSqrtHalf); }

double quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile argument outside [0,1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    // Acklam's rational approximation (relative error ~1.15e-9).
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p > 1 - plow) {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    // One Halley step against the erfc-based cdf.
    const double e = cdf(x) - p;
    const double u = e * kSqrtTwoPi * std::exp(0.5 * x * x);
    x = x - u / (1 + 0.5 * x * u);
    return x;
}

namespace {

// P(X > h, Y > k) for standard bivariate normal with correlation r.
// Drezner & Wesolowsky (1990) as refined by Genz: Gauss-Legendre on the
// arcsine-transformed integral for moderate r, and the |r| -> 1 asymptotic
// expansion with a correction integral otherwise.
double bvn_upper(double h, double k, double r) {
    const double* gx;
    const double* gw;
    int ng;
    const double ar = std::fabs(r);
    if (ar < 0.3) {
        gx = kGL6x, gw = kGL6w, ng = 3;
    } else if (ar < 0.75) {
        gx = kGL12x, gw = kGL12w, ng = 6;
    } else {
        gx = kGL20x, gw = kGL20w, ng = 10;
    }

    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        if (ar > 0) {
            const double hs = 0.5 * (h * h + k * k);
            const double asr = std::asin(r);
            for (int i = 0; i < ng; ++i) {
                for (int pm = -1; pm <= 1; pm += 2) {
                    const double sn = std::sin(0.5 * asr * (1.0 + pm * gx[i]));
                    bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            }
            bvn *= asr / (2.0 * kTwoPi);
        }
        bvn += cdf(-h) * cdf(-k);
    } else {
        if (r < 0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1) {
            const double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double cc = 0.5 - 0.125 * hk;
            const double dd = 0.75 - 0.0625 * hk;
            double asr = -0.5 * (bs / as + hk);
            if (asr > -100.0)
                bvn = a * std::exp(asr) *
                      (1.0 - cc * (bs - as) * (1.0 - dd * bs / 5.0) / 3.0 + cc * dd * as * as / 5.0);
            if (-hk < 100.0) {
                const double bb = std::sqrt(bs);
                bvn -= std::exp(-0.5 * hk) * kSqrtTwoPi * cdf(-bb / a) * bb *
                       (1.0 - cc * bs * (1.0 - dd * bs / 5.0) / 3.0);
            }
            a *= 0.5;
            for (int i = 0; i < 10; ++i) {
                for (int pm = -1; pm <= 1; pm += 2) {
                    const double t = a * (1.0 + pm * kGL20x[i]);
                    const double xs = t * t;
                    const double rs = std::sqrt(1.0 - xs);
                    asr = -0.5 * (bs / xs + hk);
                    if (asr > -100.0) {
                        bvn += a * kGL20w[i] * std::exp(asr) *
                               (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs -
                                (1.0 + cc * xs * (1.0 + dd * xs)));
                    }
                }
            }
            bvn = -bvn / kTwoPi;
        }
        if (r > 0) {
            bvn += cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) {
                if (h < 0)
                    bvn += cdf(k) - cdf(h);
                else
                    bvn += cdf(-h) - cdf(-k);
            }
        }
    }
    return std::min(std::max(bvn, 0.0), 1.0);
}

} // namespace

double bvn_cdf(double a, double b, double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("correlation outside [-1,1]");
    if (std::isinf(a) || std::isinf(b)) {
        if (a < 0 || b < 0) return 0.0; // some limit at -inf
        if (std::isinf(a) && a > 0) return std::isinf(b) && b > 0 ? 1.0 : cdf(b);
        return cdf(a);
    }
    return bvn_upper(-a, -b, rho);
}

namespace {

// One Plackett-path term: derivative of the trivariate probability with
// respect to the correlation of the (ba, bb) pair, at current correlation r,
// with ra, rb the correlations of ba, bb with the remaining limit bc.
double plackett_term(double ba, double bb, double bc, double ra, double rb, double r) {
    const double rr = 1.0 - r * r;
    const double dt = rr * (rr - (ra - rb) * (ra - rb) - 2.0 * ra * rb * (1.0 - r));
    if (dt <= 0) return 0.0;
    const double bt = (bc * rr + ba * (r * rb - ra) + bb * (r * ra - rb)) / std::sqrt(dt);
    const double tmp = ba - r * bb;
    const double ft = tmp * tmp / rr + bb * bb;
    if (bt <= -10.0 || ft >= 100.0) return 0.0;
    double v = std::exp(-0.5 * ft);
    if (bt < 10.0) v *= cdf(bt);
    return v;
}

struct TvnIntegrand {
    double a1, a2, a3, r23, rua, rub;

    double operator()(double t) const {
        const double rho12 = std::sin(rua * t);
        const double rho13 = std::sin(rub * t);
        double out = 0.0;
        if (rua != 0.0) out += rua * plackett_term(a1, a2, a3, rho13, r23, rho12);
        if (rub != 0.0) out += rub * plackett_term(a1, a3, a2, rho12, r23, rho13);
        return out;
    }
};

// 23-point Kronrod estimate with embedded Gauss error estimate.
double kronrod23(const TvnIntegrand& f, double a, double b, double& err) {
    const double wid = 0.5 * (b - a);
    const double cen = 0.5 * (a + b);
    double fc = f(cen);
    double resg = fc * kKrWG0;
    double resk = fc * kKrWK0;
    for (int i = 0; i < 11; ++i) {
        fc = f(cen - wid * kKrX[i]) + f(cen + wid * kKrX[i]);
        resk += kKrWK[i] * fc;
        if (i % 2 == 1) resg += kKrWG[(i + 1) / 2 - 1] * fc;
    }
    err = std::fabs(wid * (resk - resg));
    return wid * resk;
}

// Adaptive bisection on [0,1] until the summed Kronrod error estimate is
// negligible at double precision.
double adaptive_kronrod(const TvnIntegrand& f) {
    constexpr int kMaxSegments = 64;
    double lo[kMaxSegments], hi[kMaxSegments], val[kMaxSegments], err[kMaxSegments];
    lo[0] = 0.0;
    hi[0] = 1.0;
    val[0] = kronrod23(f, 0.0, 1.0, err[0]);
    int count = 1;
    while (count < kMaxSegments) {
        double total_err = 0.0;
        int worst = 0;
        for (int i = 0; i < count; ++i) {
            total_err += err[i];
            if (err[i] > err[worst]) worst = i;
        }
        if (total_err < 1e-14) break;
        const double mid = 0.5 * (lo[worst] + hi[worst]);
        lo[count] = mid;
        hi[count] = hi[worst];
        hi[worst] = mid;
        val[worst] = kronrod23(f, lo[worst], hi[worst], err[worst]);
        val[count] = kronrod23(f, lo[count], hi[count], err[count]);
        ++count;
    }
    double total = 0.0;
    for (int i = 0; i < count; ++i) total += val[i];
    return total;
}

} // namespace

double tvn_cdf(double a1, double a2, double a3, double r12, double r13, double r23) {
    // Deform the two smallest correlations; keep the largest in the base term.
    if (std::fabs(r12) > std::fabs(r13)) {
        std::swap(a2, a3);
        std::swap(r12, r13);
    }
    if (std::fabs(r13) > std::fabs(r23)) {
        std::swap(a1, a2);
        std::swap(r13, r23);
    }
    constexpr double eps = 1e-14;
    if (std::fabs(a1) + std::fabs(a2) + std::fabs(a3) < eps) {
        return 0.125 * (1.0 + 4.0 * (std::asin(r12) + std::asin(r13) + std::asin(r23)) / kTwoPi);
    }
    if (std::fabs(r12) + std::fabs(r13) < eps) return cdf(a1) * bvn_cdf(a2, a3, r23);
    if (std::fabs(r13) + std::fabs(r23) < eps) return cdf(a3) * bvn_cdf(a1, a2, r12);
    if (std::fabs(r12) + std::fabs(r23) < eps) return cdf(a2) * bvn_cdf(a1, a3, r13);
    if (1.0 - r23 < eps) return bvn_cdf(a1, std::min(a2, a3), r12);
    if (r23 + 1.0 < eps) {
        if (a2 > -a3) return std::max(0.0, bvn_cdf(a1, a2, r12) - bvn_cdf(a1, -a3, r12));
        return 0.0;
    }
    TvnIntegrand f{a1, a2, a3, r23, std::asin(r12), std::asin(r13)};
    double v = bvn_cdf(a2, a3, r23) * cdf(a1) + adaptive_kronrod(f) / kTwoPi;
    return std::min(std::max(v, 0.0), 1.0);
}

QmcEstimate mvn_cdf_qmc(std::span<const double> upper, std::span<const double> sigma, int n,
                        std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (static_cast<int>(upper.size()) != n || static_cast<int>(sigma.size()) != n * n)
        throw std::invalid_argument("mvn_cdf_qmc: size mismatch");

    // Cholesky with a semidefinite tolerance: a vanishing pivot zeroes its
    // column and the corresponding conditional becomes an indicator.
    std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = sigma[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= L[static_cast<std::size_t>(i) * n + k] * L[static_cast<std::size_t>(j) * n + k];
            if (i == j) {
                L[static_cast<std::size_t>(i) * n + i] = s > 1e-12 ? std::sqrt(s) : 0.0;
            } else {
                const double d = L[static_cast<std::size_t>(j) * n + j];
                L[static_cast<std::size_t>(i) * n + j] = d > 0 ? s / d : 0.0;
            }
        }
    }

    static const double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<double> alpha(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = std::sqrt(kPrimes[i % 12]);
        alpha[static_cast<std::size_t>(i)] = r - std::floor(r);
    }

    constexpr int kBatches = 12;
    constexpr int kPoints = 4096;
    double batch_mean[kBatches];
    std::vector<double> shift(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (int b = 0; b < kBatches; ++b) {
        SeededStream rng({seed, static_cast<std::uint64_t>(b), 0x51cedULL});
        for (int i = 0; i < n; ++i) shift[static_cast<std::size_t>(i)] = rng.next_u01();
        double acc = 0.0;
        for (int k = 0; k < kPoints; ++k) {
            double f = 1.0;
            for (int i = 0; i < n && f > 0.0; ++i) {
                double mu = 0.0;
                for (int j = 0; j < i; ++j)
                    mu += L[static_cast<std::size_t>(i) * n + j] * y[static_cast<std::size_t>(j)];
                const double lii = L[static_cast<std::size_t>(i) * n + i];
                double e;
                if (std::isinf(upper[i]) && upper[i] > 0) {
                    e = 1.0;
                } else if (lii > 0) {
                    e = cdf((upper[i] - mu) / lii);
                } else {
                    e = upper[i] - mu >= 0 ? 1.0 : 0.0;
                }
                if (i < n - 1) {
                    const double u =
                        std::fmod(k * alpha[static_cast<std::size_t>(i)] + shift[static_cast<std::size_t>(i)], 1.0);
                    const double ue = std::min(std::max(u * e, 1e-300), 1.0 - 1e-16);
                    y[static_cast<std::size_t>(i)] = lii > 0 ? quantile(ue) : 0.0;
                }
                f *= e;
            }
            acc += f;
        }
        batch_mean[b] = acc / kPoints;
    }
    double mean = 0.0;
    for (double v : batch_mean) mean += v;
    mean /= kBatches;
    double var = 0.0;
    for (double v : batch_mean) var += (v - mean) * (v - mean);
    var /= (kBatches - 1);
    const double err = 3.0 * std::sqrt(var / kBatches);
    return {std::min(std::max(mean, 0.0), 1.0), err};
}

void symmetric_eigenvalues(std::span<const double> matrix, int n, std::span<double> eigs_out) {
    if (static_cast<int>(matrix.size()) != n * n || static_cast<int>(eigs_out.size()) != n)
        throw std::invalid_argument("symmetric_eigenvalues: size mismatch");
    std::vector<double> a(matrix.begin(), matrix.end());
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) eigs_out[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eigs_out.begin(), eigs_out.end());
}

} // namespace discop::normal
