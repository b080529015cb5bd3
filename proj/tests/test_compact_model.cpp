#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "minrep/compact_model.hpp"

#include <cmath>
#include <random>

using namespace minrep;

namespace {

// random point of M: independent uniform unit vectors in the two blocks
Vec random_m_point(const Signature& sig, std::mt19937& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Vec u(sig.n + 2);
    for (int i = 0; i < sig.n + 2; ++i) u[i] = N(rng);
    u.head(sig.p).normalize();
    u.tail(sig.q).normalize();
    return u;
}

Cplx box_fd(const std::function<Cplx(const Vec&)>& f, const Signature& sig,
            const Vec& z, double h) {
    Cplx out = 0.0;
    const Cplx fz = f(z);
    for (int j = 0; j < sig.n; ++j) {
        Vec zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        out += sig.sign(j) * (f(zp) + f(zm) - 2.0 * fz) / (h * h);
    }
    return out;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& map, const Vec& z,
                int rows, double h) {
    Mat J(rows, z.size());
    for (int j = 0; j < z.size(); ++j) {
        Vec zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        J.col(j) = (map(zp) - map(zm)) / (2.0 * h);
    }
    return J;
}

BiRadial gaussian_pair(double a, double b) {
    BiRadial phi;
    phi.plus_profile = [a](double r) { return std::exp(-a * r * r); };
    phi.minus_profile = [b](double r) { return std::exp(-b * r * r); };
    return phi;
}

}  // namespace

TEST_CASE("harmonic dimensions and zonal reproducing kernel") {
    CHECK(harmonic_dim(2, 0) == doctest::Approx(1.0));
    CHECK(harmonic_dim(2, 3) == doctest::Approx(2.0));
    for (int a = 0; a <= 6; ++a)
        CHECK(harmonic_dim(3, a) == doctest::Approx(2.0 * a + 1.0));
    for (int a = 0; a <= 6; ++a)
        CHECK(harmonic_dim(4, a) == doctest::Approx((a + 1.0) * (a + 1.0)));
    CHECK(harmonic_dim(5, 2) == doctest::Approx(14.0));

    // integrating Z_a(<x, .>) against a degree-b harmonic reproduces it for
    // a = b and kills it for a != b
    SphereRule rule = SphereRule::create(2, 8);
    auto H2 = [](const Vec& y) { return y[0] * y[1]; };
    auto H1 = [](const Vec& y) { return y[2]; };
    std::mt19937 rng(11);
    for (int t = 0; t < 3; ++t) {
        Vec x(3);
        std::normal_distribution<double> N(0.0, 1.0);
        for (int i = 0; i < 3; ++i) x[i] = N(rng);
        x.normalize();
        double proj2 = 0.0, cross = 0.0;
        for (long j = 0; j < rule.nodes.rows(); ++j) {
            Vec y = rule.nodes.row(j).transpose();
            const double dot = x.dot(y);
            proj2 += rule.weights[j] * zonal_kernel(3, 2, dot) * H2(y);
            cross += rule.weights[j] * zonal_kernel(3, 1, dot) * H2(y);
        }
        CHECK(proj2 == doctest::Approx(H2(x)).epsilon(1e-10));
        CHECK(std::abs(cross) < 1e-12);
        double proj1 = 0.0;
        for (long j = 0; j < rule.nodes.rows(); ++j) {
            Vec y = rule.nodes.row(j).transpose();
            proj1 += rule.weights[j] * zonal_kernel(3, 1, x.dot(y)) * H1(y);
        }
        CHECK(proj1 == doctest::Approx(H1(x)).epsilon(1e-10));
    }

    // Chebyshev sector: Z_a on S^1 reproduces cos(a theta)
    const int nt = 64;
    double proj = 0.0;
    const double x0 = 0.37;
    for (int j = 0; j < nt; ++j) {
        const double th = 2.0 * M_PI * j / nt;
        proj += (2.0 * M_PI / nt) * zonal_kernel(2, 3, std::cos(th - x0)) *
                std::cos(3.0 * th);
    }
    CHECK(proj == doctest::Approx(std::cos(3.0 * x0)).epsilon(1e-12));
}

TEST_CASE("eigenvalue arithmetic") {
    for (auto [p, q] : {std::pair{3, 3}, {4, 2}, {4, 4}, {5, 3}, {2, 4}}) {
        Signature sig = Signature::create(p, q);
        for (int a = 0; a <= 6; ++a) {
            const double w = ktype_weight(sig, a);
            CHECK(w * w ==
                  doctest::Approx(0.25 - yamabe_sphere_eigen(p, a)));
            for (int b = 0; b <= 6; ++b) {
                const bool admissible = 2 * a + p == 2 * b + q;
                if (admissible)
                    CHECK(std::abs(yamabe_eigen(sig, a, b)) < 1e-12);
                else
                    CHECK(std::abs(yamabe_eigen(sig, a, b)) > 0.5);
            }
        }
    }
}

TEST_CASE("compact sampling enforces parity") {
    Signature sig = Signature::create(3, 3);
    auto even = [](const Vec& u) { return Cplx(u[0] * u[3], 0.0); };
    CompactFunction F = compact_sample(sig, 1, 6, 6, even);
    CHECK(F.samples.rows() > 0);
    CHECK_THROWS_AS(compact_sample(sig, -1, 6, 6, even), std::domain_error);
    auto odd = [](const Vec& u) { return Cplx(u[0], 0.0); };
    CHECK_NOTHROW(compact_sample(sig, -1, 6, 6, odd));
    CHECK_THROWS_AS(compact_sample(sig, 1, 6, 6, odd), std::domain_error);
}

TEST_CASE("spectral Yamabe operator on product-sphere grids") {
    Signature sig = Signature::create(3, 3);
    std::mt19937 rng(5);

    // admissible component (1,1): in the kernel
    CompactFunction F1 = compact_sample(
        sig, 1, 6, 6, [](const Vec& u) { return Cplx(u[0] * u[3], 0.0); });
    CompactFunction Y1 = yamabe_M(F1);
    CHECK(l2m_norm(Y1) < 1e-10 * l2m_norm(F1));

    // non-admissible x0: eigenvalue (1/2)^2 - (3/2)^2 = -2
    CompactFunction F2 = compact_sample(
        sig, -1, 6, 6, [](const Vec& u) { return Cplx(u[0], 0.0); });
    CompactFunction Y2 = yamabe_M(F2);
    for (int t = 0; t < 5; ++t) {
        Vec u = random_m_point(sig, rng);
        CHECK(Y2.eval(u).real() ==
              doctest::Approx(-2.0 * F2.eval(u).real()).epsilon(1e-9));
    }

    // constants are in the kernel when p = q
    CompactFunction F3 = compact_sample(
        sig, 1, 6, 6, [](const Vec&) { return Cplx(1.0, 0.0); });
    CHECK(l2m_norm(yamabe_M(F3)) < 1e-10);

    // far from band-limited on a coarse rule: the completeness check throws
    CompactFunction F4 = compact_sample(sig, -1, 4, 4, [](const Vec& u) {
        return Cplx(std::pow(u[0], 9), 0.0);
    });
    CHECK_THROWS_AS(yamabe_M(F4), std::domain_error);
}

TEST_CASE("generating vector is annihilated by the Yamabe operator") {
    // grid route at (4,2), where the corrected closed form is u_5 itself
    {
        Signature sig = Signature::create(4, 2);
        CompactFunction F = compact_sample(
            sig, -1, 6, 6, [](const Vec& u) { return Cplx(u[5], 0.0); });
        CHECK(l2m_norm(yamabe_M(F)) < 1e-8 * l2m_norm(F));
        BiZonalFunction G = generating_bizonal(sig);
        // the bi-zonal representative agrees with u_5 = t
        CHECK(G.eval(0.3, 0.8).real() == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(G.eval(-0.5, -0.4).real() ==
              doctest::Approx(-0.4).epsilon(1e-12));
    }
    // bi-zonal route everywhere
    for (auto [p, q] : {std::pair{3, 3}, {4, 2}, {4, 4}, {5, 3}, {2, 4}}) {
        CAPTURE(p);
        CAPTURE(q);
        Signature sig = Signature::create(p, q);
        BiZonalFunction G = generating_bizonal(sig);
        BiZonalFunction Y = yamabe_M(G, 24, 64);
        const double gnorm =
            std::sqrt(zonal_expand(G, 12, 12, 64).norm2);
        const double ynorm =
            std::sqrt(zonal_expand(Y, 24, 24, 64).norm2);
        CHECK(ynorm < 1e-8 * std::max(gnorm, 1e-30));
    }
}

TEST_CASE("component expansion and the weighted norm") {
    Signature sig = Signature::create(3, 3);
    // F = x0 y0: single admissible component (1,1), weight 3/2
    CompactFunction F = compact_sample(
        sig, 1, 6, 6, [](const Vec& u) { return Cplx(u[0] * u[3], 0.0); });
    KTypeExpansion E = ktype_expand(F, 4);
    CHECK(E.residual < 1e-6);
    const double l2 = std::pow(4.0 * M_PI / 3.0, 2);  // |x0|^2 twice
    CHECK(l2m_inner(F, F).real() == doctest::Approx(l2).epsilon(1e-12));
    CHECK(inner_M(E, E).real() == doctest::Approx(1.5 * l2).epsilon(1e-10));

    // orthogonality against the constant vector
    CompactFunction G = compact_sample(
        sig, 1, 6, 6, [](const Vec&) { return Cplx(1.0, 0.0); });
    KTypeExpansion EG = ktype_expand(G, 4);
    CHECK(std::abs(inner_M(E, EG)) < 1e-12);

    // minimal component of the generating vector at (4,2) is (0,1)
    Signature s42 = Signature::create(4, 2);
    CompactFunction F0 = compact_sample(
        s42, -1, 6, 6, [](const Vec& u) { return Cplx(u[5], 0.0); });
    KTypeExpansion E0 = ktype_expand(F0, 4);
    CHECK(E0.residual < 1e-6);
    REQUIRE(!E0.comps.empty());
    CHECK(E0.a_deg[0] == 0);
    CHECK(E0.b_deg[0] == 1);
    for (size_t k = 1; k < E0.comps.size(); ++k)
        CHECK(E0.norm2[k] < 1e-16);
    // ||u_5||^2 = vol(S^3) * int_{S^1} cos^2 = 2 pi^2 * pi, weight (p-2)/2 = 1
    CHECK(inner_M(E0, E0).real() ==
          doctest::Approx(2.0 * std::pow(M_PI, 3)).epsilon(1e-10));
}

TEST_CASE("zonal and grid expansions agree") {
    Signature sig = Signature::create(3, 3);
    auto g = [](double s, double t) {
        return Cplx(s * t + 0.2 * zonal_poly(3, 3, s) * zonal_poly(3, 1, t),
                    0.0);
    };
    BiZonalFunction Z{sig, 1, g};
    ZonalExpansion EZ = zonal_expand(Z, 6, 6, 48);
    CompactFunction F = compact_sample(sig, 1, 8, 8, [&](const Vec& u) {
        return g(u[0], u[3]);
    });
    CHECK(EZ.residual < 1e-12);
    CHECK(EZ.norm2 ==
          doctest::Approx(l2m_inner(F, F).real()).epsilon(1e-10));
    KTypeExpansion EK = ktype_expand(F, 6);
    CHECK(inner_M(EZ, EZ).real() ==
          doctest::Approx(inner_M(EK, EK).real()).epsilon(1e-10));
}

TEST_CASE("twisted pullback and its inverse") {
    std::mt19937 rng(3);
    for (auto [p, q] : {std::pair{3, 3}, {5, 3}}) {
        Signature sig = Signature::create(p, q);
        const double lam = (sig.n - 2.0) / 2.0;

        // F = 1 pulls back to tau^{-lambda}
        auto one = [](const Vec&) { return Cplx(1.0, 0.0); };
        auto f1 = twisted_pullback(sig, lam, one);
        std::normal_distribution<double> N(0.0, 1.0);
        Vec z(sig.n);
        for (int i = 0; i < sig.n; ++i) z[i] = N(rng);
        CHECK(f1(z).real() ==
              doctest::Approx(std::pow(tau(sig, z), -lam)).epsilon(1e-14));

        // round trip through both hemispheres for an even function
        auto F = [](const Vec& u) {
            return Cplx(u[0] * u[u.size() - 1] + 0.2 * u[1] * u[2], 0.0);
        };
        auto f = twisted_pullback(sig, lam, F);
        auto Fb = twisted_pullback_inv(sig, lam, 1, f);
        bool saw_plus = false, saw_minus = false;
        for (int t = 0; t < 20; ++t) {
            Vec u = random_m_point(sig, rng);
            (minrep::mu(u) > 0 ? saw_plus : saw_minus) = true;
            CHECK(std::abs(Fb(u) - F(u)) < 1e-9);
        }
        CHECK(saw_plus);
        CHECK(saw_minus);
    }

    // pullback of the closed-form compact generating vector matches the
    // closed-form flat one
    std::mt19937 rng2(17);
    for (auto [p, q] : {std::pair{4, 2}, {5, 3}}) {
        Signature sig = Signature::create(p, q);
        const double lam = (sig.n - 2.0) / 2.0;
        auto F0 = [sig](const Vec& u) {
            return Cplx(generating_F0(sig, u), 0.0);
        };
        auto f0 = twisted_pullback(sig, lam, F0);
        std::normal_distribution<double> N(0.0, 0.8);
        for (int t = 0; t < 5; ++t) {
            Vec z(sig.n);
            for (int i = 0; i < sig.n; ++i) z[i] = N(rng2);
            CHECK(std::abs(f0(z) - generating_f0(sig, z)) < 1e-10);
        }
    }
}

TEST_CASE("Yamabe covariance through the stereographic map") {
    // box(tau^{-lambda} F o Psi) = tau^{-lambda-2} (Yamabe F) o Psi, checked
    // by second differences with O(h^2) convergence
    Signature sig = Signature::create(3, 3);
    const double lam = (sig.n - 2.0) / 2.0;
    auto F = [](const Vec& u) { return Cplx(u[0], 0.0); };  // eigenvalue -2
    auto f = twisted_pullback(sig, lam, F);
    Vec z(sig.n);
    z << 0.3, -0.5, 0.7, 0.2;
    const Cplx rhs = std::pow(tau(sig, z), -lam - 2.0) * (-2.0) *
                     psi_map(sig, z)[0];
    const double e1 = std::abs(box_fd(f, sig, z, 1e-2) - rhs);
    const double e2 = std::abs(box_fd(f, sig, z, 5e-3) - rhs);
    CHECK(e1 < 1e-3 * std::abs(rhs));
    CHECK(e2 < 0.3 * e1);  // second order: expect ~ e1 / 4
}

TEST_CASE("conformality of the stereographic map and the flat action") {
    const double h = 1e-5;
    for (auto [p, q] : {std::pair{3, 3}, {4, 2}}) {
        Signature sig = Signature::create(p, q);
        std::mt19937 rng(23);
        std::normal_distribution<double> N(0.0, 0.6);
        Vec z(sig.n);
        for (int i = 0; i < sig.n; ++i) z[i] = N(rng);
        const Mat D = Mat(sig.eps.asDiagonal());

        Mat J = fd_jacobian(
            [&](const Vec& w) { return psi_map(sig, w); }, z, sig.n + 2, h);
        Mat A = J.transpose() * ambient_form(sig) * J;
        Mat expectA = std::pow(tau(sig, z), -2.0) * D;
        CHECK((A - expectA).norm() < 1e-6 * expectA.norm());

        GroupElement g = group_exp(
            LieAlgebraElement{0.25 * n_generator(sig, 1).mat, "N1"});
        Mat Jg = fd_jacobian(
            [&](const Vec& w) { return flat_action(sig, g, w).z; }, z,
            sig.n, h);
        const double fac = flat_action(sig, g, z).factor;
        Mat B = Jg.transpose() * D * Jg;
        Mat expectB = std::pow(fac, -2.0) * D;
        CHECK((B - expectB).norm() < 1e-6 * expectB.norm());
    }
}

TEST_CASE("equivariance of the twisted pullback") {
    Signature sig = Signature::create(3, 3);
    const double lam = (sig.n - 2.0) / 2.0;
    const int eps = 1;
    auto F = [](const Vec& u) {
        return Cplx(u[0] * u[3] + 0.2 * u[1] * u[4], 0.0);
    };
    auto f = twisted_pullback(sig, lam, F);
    Vec a(sig.n);
    a << 0.2, -0.3, 0.1, 0.25;
    std::vector<GroupElement> gs = {
        group_exp(LieAlgebraElement{0.4 * e_generator(sig).mat, "tE"}),
        nbar_element(sig, a),
        group_exp(LieAlgebraElement{0.3 * mmax_generator(sig, 1, 3).mat,
                                    "m"}),
        m0_element(sig)};
    std::mt19937 rng(29);
    std::normal_distribution<double> N(0.0, 0.7);
    for (const GroupElement& g : gs) {
        auto lhs = twisted_pullback(sig, lam,
                                    compact_action(sig, lam, g, F));
        GroupElement gi{g.mat.inverse()};
        for (int t = 0; t < 3; ++t) {
            Vec z(sig.n);
            for (int i = 0; i < sig.n; ++i) z[i] = N(rng);
            FlatActionResult r = flat_action(sig, gi, z);
            Cplx rhs = std::pow(std::abs(r.factor), -lam) * f(r.z) *
                       (r.factor < 0 ? double(eps) : 1.0);
            CHECK(std::abs(lhs(z) - rhs) < 1e-8);
        }
    }
    // the central element acts by the parity sign
    auto Fm0 = compact_action(sig, lam, m0_element(sig), F);
    Vec u(sig.n + 2);
    u << 1, 0, 0, 0, 0, 1;
    u.head(sig.p).normalize();
    u.tail(sig.q).normalize();
    CHECK(std::abs(Fm0(u) - double(eps) * F(u)) < 1e-12);
}

TEST_CASE("convolution kernels") {
    // Gamma poles give exact zeros, and y = 0 is rejected
    CHECK_THROWS_AS(kernel_psi(2.0, 1, 0.0), std::domain_error);
    CHECK(kernel_psi(-1.0, 1, 0.7) == 0.0);  // (3,3) critical: Gamma(0) pole

    // closed forms at the critical parameter 1 - n/2
    Signature s42 = Signature::create(4, 2);
    for (double y : {1.0, -1.0, 0.7, -0.7}) {
        const double expect =
            (y > 0 ? 1.0 : -1.0) / (std::sqrt(M_PI) * std::abs(y));
        CHECK(kernel_psi(-1.0, -1, y) ==
              doctest::Approx(expect).epsilon(1e-14));
    }
    Signature s44 = Signature::create(4, 4);
    for (double y : {1.0, -1.0, 0.7, -0.7})
        CHECK(kernel_psi(-2.0, 1, y) ==
              doctest::Approx(-0.5 / (std::sqrt(M_PI) * y * y))
                  .epsilon(1e-14));

    // residue-formula combination equals the kernel at 1 - n/2 pointwise
    for (auto [p, q] : {std::pair{3, 3}, {4, 2}, {4, 4}, {5, 3}, {2, 4}}) {
        Signature sig = Signature::create(p, q);
        const int eps = constants(sig).eps_sign > 0 ? 1 : -1;
        for (double y : {1.0, -1.0, 0.7, -0.7}) {
            const Cplx crit = kernel_psi_critical(sig, y);
            const double direct =
                kernel_psi(1.0 - sig.n / 2.0, eps, y);
            CHECK(std::abs(crit.real() - direct) < 1e-12);
            CHECK(std::abs(crit.imag()) < 1e-12);
        }
    }
}

TEST_CASE("convolution form against the cone form") {
    Signature sig = Signature::create(4, 2);
    const Constants c = constants(sig);
    InnerNParams prm;
    prm.n_s = 128;
    BiRadial phi1 = gaussian_pair(1.0, 1.3);
    BiRadial phi2 = gaussian_pair(0.8, 1.1);

    KnappSteinResult d = knapp_stein_pair(sig, phi1, phi1, prm);
    CHECK(d.n_form.real() > 0.0);
    CHECK(std::abs(d.n_form.imag()) < 1e-12 * d.n_form.real());

    KnappSteinResult r12 = knapp_stein_pair(sig, phi1, phi2, prm);
    KnappSteinResult r21 = knapp_stein_pair(sig, phi2, phi1, prm);
    CHECK(std::abs(r12.a_form - std::conj(r21.a_form)) <
          1e-10 * std::abs(r12.a_form));

    // the two discretizations of the same pairing agree
    for (const KnappSteinResult& r : {d, r12}) {
        const Cplx unit = r.ratio * 4.0 * c.delta * c.c2;
        CHECK(std::abs(unit - 1.0) < 1e-4);
    }
}

TEST_CASE("cross-picture norm ratio is vector independent") {
    Signature sig = Signature::create(4, 4);
    const double lam = (sig.n - 2.0) / 2.0;
    const int eps = constants(sig).eps_sign > 0 ? 1 : -1;
    InnerNParams prm;
    prm.n_s = 128;
    prm.smax = 12.0;
    CrossNormParams cp;
    std::vector<double> ratios;
    for (auto [a, b] : {std::pair{1.0, 1.3}, {0.7, 0.9}}) {
        BiRadial phi = gaussian_pair(a, b);
        const double N = inner_N(sig, phi, phi, prm).cone.real();
        ZonalExpansion E = pullback_expansion(sig, lam, eps, phi, cp);
        ratios.push_back(N / inner_M(E, E).real());
    }
    for (double r : ratios) CHECK(r == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::abs(ratios[0] - ratios[1]) < 1e-4 * std::abs(ratios[0]));
}
