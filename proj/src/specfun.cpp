#include "minrep/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace minrep {

namespace {

bool is_nonpos_int(double x) {
    return x <= 0.0 && std::abs(x - std::round(x)) < 1e-12;
}

// Plain series sum_{k} (a)_k (b)_k / ((c)_k k!) x^k.  Caller guarantees
// convergence (|x| < 1) or termination (a or b a non-positive integer).
double series_2f1(double a, double b, double c, double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if (term == 0.0) return sum;  // terminated polynomial
        // Ratio-test tail bound with safety factor 10: once the term ratio
        // r has settled near |x|, tail <= |term| r/(1-r).
        double r = std::abs(x) * (1.0 + std::abs(a + b) / (k + 2.0));
        if (r < 1.0 && 10.0 * std::abs(term) * r / (1.0 - r) <
                           1e-16 * std::abs(sum) + 1e-300)
            return sum;
    }
    if (std::abs(x) > 0.999)
        throw std::domain_error("gauss_2f1: series did not converge");
    return sum;
}

}  // namespace

double gamma_fn(double x) {
    if (is_nonpos_int(x)) throw std::domain_error("gamma_fn: pole");
    return std::tgamma(x);
}

double bessel_j(double nu, double x) {
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw std::domain_error("bessel_j: x = 0 with negative order");
    }
    if (x < 0.0) throw std::domain_error("bessel_j: require x >= 0");
    if (nu >= 0.0) return std::cyl_bessel_j(nu, x);
    const double m = -nu;
    if (std::abs(m - std::round(m)) < 1e-14) {
        int mi = static_cast<int>(std::round(m));
        return (mi % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(m, x);
    }
    return std::cos(m * M_PI) * std::cyl_bessel_j(m, x) -
           std::sin(m * M_PI) * std::cyl_neumann(m, x);
}

double bessel_i(double nu, double x) {
    if (x <= 0.0) throw std::domain_error("bessel_i: require x > 0");
    if (nu >= 0.0) return std::cyl_bessel_i(nu, x);
    // I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu.
    const double m = -nu;
    if (std::abs(m - std::round(m)) < 1e-14) return std::cyl_bessel_i(m, x);
    return std::cyl_bessel_i(m, x) +
           2.0 / M_PI * std::sin(m * M_PI) * std::cyl_bessel_k(m, x);
}

double bessel_k(double nu, double x) {
    if (x <= 0.0) throw std::domain_error("bessel_k: require x > 0");
    return std::cyl_bessel_k(std::abs(nu), x);  // K is even in nu
}

double gauss_2f1(double a, double b, double c, double x, std::string* method) {
    auto set = [&](const char* m) {
        if (method) *method = m;
    };
    // Terminating cases work for any x and any c beyond the truncation point.
    if (is_nonpos_int(a) || is_nonpos_int(b)) {
        double deg = is_nonpos_int(a) ? -a : -b;
        if (is_nonpos_int(c) && -c < deg)
            throw std::domain_error("gauss_2f1: c hits a pole before termination");
        set("polynomial");
        return series_2f1(a, b, c, x);
    }
    if (is_nonpos_int(c))
        throw std::domain_error("gauss_2f1: c is a non-positive integer");
    if (x >= 1.0) throw std::domain_error("gauss_2f1: x >= 1 not supported");
    if (x < 0.0) {
        // Pfaff: (1-x)^{-a} 2F1(a, c-b; c; x/(x-1)); argument in [0,1).
        set("pfaff");
        return std::pow(1.0 - x, -a) * series_2f1(a, c - b, c, x / (x - 1.0));
    }
    if (x <= 0.85) {
        set("series");
        return series_2f1(a, b, c, x);
    }
    const double s = c - a - b;
    if (std::abs(s - std::round(s)) > 1e-10) {
        // Connection formula at 1-x (valid for non-integer c-a-b).
        set("connection");
        // 1/Gamma vanishes at non-positive integers, killing that branch.
        auto rgamma = [](double v) {
            return is_nonpos_int(v) ? 0.0 : 1.0 / gamma_fn(v);
        };
        const double y = 1.0 - x;
        double k1 = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b);
        double k2 = gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b);
        double t1 = (k1 == 0.0) ? 0.0 : k1 * series_2f1(a, b, 1.0 - s, y);
        double t2 = (k2 == 0.0)
                        ? 0.0
                        : k2 * std::pow(y, s) * series_2f1(c - a, c - b, 1.0 + s, y);
        return t1 + t2;
    }
    if (s > 0.0) {
        set("series");
        return series_2f1(a, b, c, x);  // convergent, slowly, at x -> 1^-
    }
    throw std::domain_error("gauss_2f1: x near 1 with integer c-a-b <= 0");
}

double appell_f4(double a, double b, double c, double d, double x, double y) {
    if (is_nonpos_int(c) || is_nonpos_int(d))
        throw std::domain_error("appell_f4: c or d is a non-positive integer");
    const double rho = std::sqrt(std::abs(x)) + std::sqrt(std::abs(y));
    if (rho >= 1.0)
        throw std::domain_error("appell_f4: outside series domain sqrt|x|+sqrt|y| < 1");
    // Row-by-row: row i holds x^i sum_j (a)_{i+j}(b)_{i+j}/(i! j! (c)_i (d)_j) y^j.
    double sum = 0.0;
    double rowhead = 1.0;  // (a)_i (b)_i / (i! (c)_i) x^i at j=0
    int quiet_rows = 0;
    for (int i = 0; i < 4000; ++i) {
        double term = rowhead, rowsum = rowhead,
               rowmax = std::abs(rowhead);
        for (int j = 0; j < 4000; ++j) {
            term *= (a + i + j) * (b + i + j) / ((d + j) * (j + 1.0)) * y;
            rowsum += term;
            rowmax = std::max(rowmax, std::abs(term));
            if (std::abs(term) < 1e-18 * (rowmax + 1.0) || term == 0.0) break;
        }
        sum += rowsum;
        // Tail bound via ratio test with safety factor 10: row magnitudes
        // decay roughly like rho^2 per row once i is large.  Require two
        // consecutive negligible rows (alternating-sign cancellation can make
        // a single rowsum accidentally small).
        if (i > 4 &&
            10.0 * rowmax / (1.0 - rho) < 1e-14 * (std::abs(sum) + 1.0)) {
            if (++quiet_rows >= 2) break;
        } else {
            quiet_rows = 0;
        }
        rowhead *= (a + i) * (b + i) / ((c + i) * (i + 1.0)) * x;
        if (rowhead == 0.0) break;
    }
    return sum;
}

Constants constants(const Signature& sig) {
    Constants k{};
    const int n = sig.n;
    const int pm = ((sig.p - sig.q) % 8 + 8) % 8;
    k.eps_sign = (pm == 0 || pm == 4) ? 1.0 : -1.0;
    k.delta = (pm == 0 || pm == 2) ? 1.0 : -1.0;
    const double e = k.eps_sign;
    k.c1 = gamma_fn((n - 1.0 - e) / 4.0) /
           (std::pow(2.0, n / 2.0) * std::pow(M_PI, (n + 1.0) / 2.0));
    k.c3 = std::pow(M_PI, n / 2.0) * gamma_fn((n - 1.0 + e) / 4.0) /
           gamma_fn(n / 2.0 - 1.0);
    k.c2 = 4.0 * k.delta * k.c3;
    k.thm55_const = std::pow(2.0 * M_PI, (sig.p + sig.q - 2.0) / 2.0) *
                    std::pow(2.0, -(sig.p - 5.0) / 2.0) *
                    gamma_fn((sig.q - 1.0) / 2.0) /
                    gamma_fn((sig.p + sig.q - 4.0) / 2.0);
    k.prop56_const = gamma_fn((sig.p + sig.q - 4.0) / 2.0) /
                     (std::pow(2.0, (sig.q + 3.0) / 2.0) *
                      std::pow(M_PI, (sig.p + sig.q - 2.0) / 2.0) *
                      gamma_fn((sig.q - 1.0) / 2.0));
    return k;
}

static void require_p_ge_q(const Signature& sig, const char* who) {
    if (sig.p < sig.q)
        throw std::domain_error(std::string(who) +
                                ": stated for p >= q; swap the roles of the "
                                "two blocks (and of p,q) first");
}

double generating_F0(const Signature& sig, const Vec& u) {
    require_p_ge_q(sig, "generating_F0");
    if (u.size() != sig.n + 2)
        throw std::invalid_argument("generating_F0: expected ambient point of M");
    const double last = u[sig.n + 1];
    double t = 1.0 - last * last;  // = u_p^2 + ... + u_n^2 on S^{q-1}
    t = std::min(std::max(t, 0.0), 1.0);
    const double a = (sig.q - sig.p) / 4.0, b = (sig.p + sig.q - 4.0) / 4.0,
                 c = (sig.q - 1.0) / 2.0;
    if (t == 1.0) {
        // Gauss value at 1 (c - a - b = 1/2 > 0).
        return gamma_fn(c) * gamma_fn(0.5) / (gamma_fn(c - a) * gamma_fn(c - b));
    }
    return gauss_2f1(a, b, c, t);
}

double generating_f0(const Signature& sig, const Vec& z) {
    require_p_ge_q(sig, "generating_f0");
    const double t = tau(sig, z);
    const double zpp = z.tail(sig.q - 1).norm();
    double arg = (zpp / t) * (zpp / t);
    arg = std::min(arg, 1.0 - 1e-14);
    return std::pow(t, -(sig.p + sig.q - 4.0) / 2.0) *
           gauss_2f1((sig.q - sig.p) / 4.0, (sig.p + sig.q - 4.0) / 4.0,
                     (sig.q - 1.0) / 2.0, arg);
}

std::optional<double> f4_reduction_residual(const Signature& sig, const Vec& z) {
    require_p_ge_q(sig, "f4_reduction_residual");
    const double xp = z.head(sig.p - 1).squaredNorm() / 4.0;
    const double yp = z.tail(sig.q - 1).squaredNorm() / 4.0;
    if (std::sqrt(xp) + std::sqrt(yp) >= 1.0) return std::nullopt;
    const double lhs =
        appell_f4((sig.p - 1.0) / 2.0, (sig.p + sig.q - 4.0) / 2.0,
                  (sig.p - 1.0) / 2.0, (sig.q - 1.0) / 2.0, -xp, -yp);
    const double rhs = generating_f0(sig, z);
    return std::abs(lhs - rhs);
}

double bailey_rhs(double lambda, double mu, double nu, double rho, double a,
                  double b, double c) {
    const double s = lambda + mu + nu;
    const double f4 = appell_f4(0.5 * (s - rho), 0.5 * (s + rho), mu + 1.0,
                                nu + 1.0, -a * a / (c * c), -b * b / (c * c));
    return std::pow(2.0, lambda - 2.0) * std::pow(a, mu) * std::pow(b, nu) *
           gamma_fn(0.5 * (s - rho)) * gamma_fn(0.5 * (s + rho)) /
           (std::pow(c, s) * gamma_fn(mu + 1.0) * gamma_fn(nu + 1.0)) * f4;
}

double bailey_lhs_quadrature(double lambda, double mu, double nu, double rho,
                             double a, double b, double c) {
    // Envelope: K_rho(ct) ~ sqrt(pi/(2ct)) e^{-ct}; truncate where the
    // envelope is far below 1e-14 of the integral scale.
    const double tmax = 45.0 / c;
    auto f = [&](double t) {
        return std::pow(t, lambda - 1.0) * bessel_j(mu, a * t) *
               bessel_j(nu, b * t) * bessel_k(rho, c * t);
    };
    // Geometrically graded panels near 0 (algebraic/log endpoint), then
    // uniform panels no longer than half the fastest Bessel period.
    static const double gl_x[12] = {
        -0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
        -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
        0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
        0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
    static const double gl_w[12] = {
        0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
        0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
        0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
        0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
    auto panel = [&](double lo, double hi) {
        double acc = 0.0, h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
        for (int i = 0; i < 12; ++i) acc += gl_w[i] * f(m + h * gl_x[i]);
        return acc * h;
    };
    double total = 0.0;
    double t0 = std::min(1e-7, tmax);
    // graded start: [t0 * 2^k, t0 * 2^{k+1}] up to t1
    const double t1 = std::min(0.5 / c, tmax);
    double lo = 0.0, hi = t0;
    while (lo < t1) {
        total += panel(lo, hi);
        lo = hi;
        hi = std::min(2.0 * hi, t1);
        if (hi <= lo) break;
    }
    const double osc = std::max({a, b, 1e-3});
    const double hmax = std::min(0.5 * M_PI / osc, (tmax - t1) / 16.0);
    for (double x = t1; x < tmax; x += hmax)
        total += panel(x, std::min(x + hmax, tmax));
    return total;
}

double bailey_hankel_residual(double lambda, double mu, double nu, double rho,
                              double a, double b, double c) {
    if (c <= 0.0) throw std::domain_error("bailey: require c > 0");
    if (lambda + mu + nu - std::abs(rho) <= 0.0)
        throw std::domain_error("bailey: integral not absolutely convergent at 0");
    if (a / c + b / c >= 1.0)
        throw std::domain_error("bailey: F4 arguments outside series domain");
    return std::abs(bailey_lhs_quadrature(lambda, mu, nu, rho, a, b, c) -
                    bailey_rhs(lambda, mu, nu, rho, a, b, c));
}

}  // namespace minrep
