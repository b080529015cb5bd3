#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "minrep/geometry.hpp"

#include <cmath>
#include <random>

using namespace minrep;

namespace {

Vec random_z(const Signature& sig, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vec z(sig.n);
    for (int i = 0; i < sig.n; ++i) z[i] = g(rng);
    return z;
}

const std::vector<std::pair<int, int>> kSignatures = {
    {3, 3}, {4, 2}, {4, 4}, {5, 3}, {2, 4}};

}  // namespace

TEST_CASE("signature validation") {
    CHECK_THROWS(Signature::create(2, 3));   // odd p+q
    CHECK_THROWS(Signature::create(2, 2));   // excluded
    CHECK_THROWS(Signature::create(1, 5));   // p < 2
    auto sig = Signature::create(4, 2);
    CHECK(sig.n == 4);
    CHECK(sig.eps[0] == 1.0);
    CHECK(sig.eps[2] == 1.0);
    CHECK(sig.eps[3] == -1.0);
}

TEST_CASE("quadratic forms") {
    auto s33 = Signature::create(3, 3);
    CHECK(eval_P(s33, Vec::Zero(4)) == 0.0);
    Vec z(4);
    z << 3, 4, 0, 5;
    CHECK(eval_P(s33, z) == 0.0);
    auto s42 = Signature::create(4, 2);
    Vec w(4);
    w << 1, 1, 1, 2;
    CHECK(eval_P(s42, w) == -1.0);
    Vec zeta(4);
    zeta << 1, 0, 1, 0;
    CHECK(eval_Q(s33, zeta) == 0.0);
    auto s44 = Signature::create(4, 4);
    Vec zeta6(6);
    zeta6 << 1, 2, 2, 0, 3, 0;
    CHECK(eval_Q(s44, zeta6) == 0.0);
    CHECK_THROWS(eval_P(s33, Vec::Zero(3)));
}

TEST_CASE("iota lands on Xi with mu = 1") {
    std::mt19937_64 rng(7);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        Vec v0 = iota(sig, Vec::Zero(sig.n));
        CHECK(v0[0] == 1.0);
        CHECK(v0[sig.n + 1] == 1.0);
        for (int t = 0; t < 50; ++t) {
            Vec z = random_z(sig, rng, 2.0);
            Vec v = iota(sig, z);
            CHECK(mu(v) == doctest::Approx(1.0).epsilon(1e-14));
            // |x block| = |y block| on Xi.
            double xs = v.head(sig.p).squaredNorm();
            double ys = v.tail(sig.q).squaredNorm();
            CHECK(xs == doctest::Approx(ys).epsilon(1e-12));
        }
    }
    auto s33 = Signature::create(3, 3);
    Vec z(4);
    z << 2, 0, 0, 0;
    Vec v = iota(s33, z);
    Vec expect(6);
    expect << 0, 2, 0, 0, 0, 2;
    CHECK((v - expect).norm() == doctest::Approx(0.0));
}

TEST_CASE("tau factorizations agree and bound holds") {
    std::mt19937_64 rng(11);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        CHECK(tau(sig, Vec::Zero(sig.n)) == doctest::Approx(1.0));
        for (int t = 0; t < 1000; ++t) {
            Vec z = random_z(sig, rng, 3.0);
            double t1 = tau_form1(sig, z), t2 = tau_form2(sig, z),
                   t3 = tau_form3(sig, z);
            CHECK(std::abs(t1 - t3) < 1e-12 * t3);
            CHECK(std::abs(t2 - t3) < 1e-12 * t3);
            // tau >= |z''| with equality only when P = -4.
            double zpp = z.tail(sig.q - 1).norm();
            CHECK(t3 >= zpp - 1e-12);
        }
        // tau = nu(iota(z)) by definition.
        Vec z = random_z(sig, rng);
        CHECK(tau(sig, z) ==
              doctest::Approx(nu_plus(sig, iota(sig, z))).epsilon(1e-13));
    }
    auto s42 = Signature::create(4, 2);
    Vec z(4);
    z << 2, 0, 0, 0;
    CHECK(tau(s42, z) == doctest::Approx(2.0));
}

TEST_CASE("tau equality case |z''| attained exactly on P = -4") {
    auto sig = Signature::create(3, 3);
    // z' = 0, |z''| = 2 gives P = -4 and tau = |z''| = 2.
    Vec z(4);
    z << 0, 0, 2, 0;
    CHECK(tau(sig, z) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("psi round trip and image") {
    std::mt19937_64 rng(13);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        Vec u0 = psi_map(sig, Vec::Zero(sig.n));
        CHECK(u0[0] == doctest::Approx(1.0));
        CHECK(u0[sig.n + 1] == doctest::Approx(1.0));
        for (int t = 0; t < 100; ++t) {
            Vec z = random_z(sig, rng, 2.0);
            Vec u = psi_map(sig, z);
            // u is on M = S^{p-1} x S^{q-1}.
            CHECK(u.head(sig.p).norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(u.tail(sig.q).norm() == doctest::Approx(1.0).epsilon(1e-12));
            Vec back = psi_inv(sig, u);
            CHECK((back - z).norm() < 1e-12 * (1.0 + z.norm()));
        }
        // psi_inv rejects the lower hemisphere.
        Vec u = -psi_map(sig, Vec::Zero(sig.n));
        CHECK_THROWS_AS((void)psi_inv(sig, u), std::domain_error);
    }
}

TEST_CASE("psi pullback of the product metric is conformal") {
    // (FD Jacobian J of Psi) must satisfy  J^T g_M J = tau^{-2} diag(eps),
    // where g_M is the ambient (+p,-q) form restricted to M.
    std::mt19937_64 rng(17);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        Mat gamb = ambient_form(sig);
        for (int t = 0; t < 5; ++t) {
            Vec z = random_z(sig, rng, 1.5);
            const double h = 1e-5;
            Mat J(sig.n + 2, sig.n);
            for (int j = 0; j < sig.n; ++j) {
                Vec zp = z, zm = z;
                zp[j] += h;
                zm[j] -= h;
                J.col(j) = (psi_map(sig, zp) - psi_map(sig, zm)) / (2 * h);
            }
            Mat G = J.transpose() * gamb * J;
            double t2 = std::pow(tau(sig, z), -2.0);
            Mat expect = t2 * sig.eps.asDiagonal();
            CHECK((G - expect).cwiseAbs().maxCoeff() < 1e-6 * t2);
        }
    }
}

TEST_CASE("basis elements satisfy the Lie algebra invariant") {
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        Mat I = ambient_form(sig);
        for (const auto& X : basis_elements(sig)) {
            Mat r = X.mat * I + I * X.mat.transpose();
            CHECK(r.cwiseAbs().maxCoeff() == 0.0);  // exact for generators
        }
    }
}

TEST_CASE("generator identities") {
    auto sig = Signature::create(4, 4);
    Mat E = e_generator(sig).mat;
    for (int j = 1; j <= sig.n; ++j) {
        Mat Nb = nbar_generator(sig, j).mat;
        // [E, Nbar_j] = -Nbar_j.
        CHECK((bracket(E, Nb) + Nb).cwiseAbs().maxCoeff() == 0.0);
        // Nbar_j nilpotent of degree 3.
        CHECK((Nb * Nb * Nb).cwiseAbs().maxCoeff() == 0.0);
        // [Nbar_j, N_j] = 2 eps_j E.
        Mat N = n_generator(sig, j).mat;
        CHECK((bracket(Nb, N) - 2.0 * sig.eps[j - 1] * E).cwiseAbs().maxCoeff() ==
              0.0);
    }
    // m0 is in O(p,q).
    Mat I = ambient_form(sig);
    Mat g = m0_element(sig).mat;
    CHECK((g.transpose() * I * g - I).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bracket closure with structure-constant solve") {
    std::mt19937_64 rng(23);
    for (auto [p, q] : {std::pair<int, int>{3, 3}, {4, 2}, {5, 3}}) {
        auto sig = Signature::create(p, q);
        auto basis = basis_elements(sig);
        // Sample pairs rather than all O(nb^2) for the bigger algebras.
        std::uniform_int_distribution<size_t> pick(0, basis.size() - 1);
        for (int t = 0; t < 120; ++t) {
            const auto& X = basis[pick(rng)];
            const auto& Y = basis[pick(rng)];
            double res = 0.0;
            expand_in_basis(sig, basis, bracket(X.mat, Y.mat), &res);
            CHECK(res < 1e-10);
        }
    }
}

TEST_CASE("group_exp produces O(p,q) elements") {
    std::mt19937_64 rng(29);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        Mat I = ambient_form(sig);
        auto basis = basis_elements(sig);
        std::uniform_real_distribution<double> coef(-0.4, 0.4);
        for (int t = 0; t < 10; ++t) {
            Mat X = Mat::Zero(p + q, p + q);
            for (const auto& B : basis) X += coef(rng) * B.mat;
            Mat g = group_exp({X, "sum"}).mat;
            CHECK((g.transpose() * I * g - I).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("flat_action basics") {
    std::mt19937_64 rng(31);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        Vec z = random_z(sig, rng);
        // Identity.
        GroupElement id{Mat::Identity(p + q, p + q)};
        auto r = flat_action(sig, id, z);
        CHECK((r.z - z).norm() < 1e-14);
        CHECK(r.factor == doctest::Approx(1.0));
        // Dilation: L_{exp(tE)} z = e^{-t} z with factor e^{t}.
        const double t = 0.6;
        LieAlgebraElement E = e_generator(sig);
        E.mat *= t;
        auto rd = flat_action(sig, group_exp(E), z);
        CHECK((rd.z - std::exp(-t) * z).norm() < 1e-12);
        CHECK(rd.factor == doctest::Approx(std::exp(t)).epsilon(1e-12));
        // Translations: L_{nbar_a} z = z + 2a, so the representation formula
        // pi(nbar_a) f = f(L_{nbar_a^{-1}} z) = f(z - 2a).
        Vec a = random_z(sig, rng);
        auto rt = flat_action(sig, nbar_element(sig, a), z);
        CHECK((rt.z - (z + 2.0 * a)).norm() < 1e-12);
        CHECK(rt.factor == doctest::Approx(1.0).epsilon(1e-12));
        auto rti = flat_action(sig, nbar_element(sig, Vec(-a)), z);
        CHECK((rti.z - (z - 2.0 * a)).norm() < 1e-12);
    }
}

TEST_CASE("flat_action is a group action where defined") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> coef(-0.3, 0.3);
    for (auto [p, q] : kSignatures) {
        auto sig = Signature::create(p, q);
        auto basis = basis_elements(sig);
        for (int t = 0; t < 20; ++t) {
            Mat X = Mat::Zero(p + q, p + q), Y = Mat::Zero(p + q, p + q);
            for (const auto& B : basis) {
                X += coef(rng) * B.mat;
                Y += coef(rng) * B.mat;
            }
            Mat g = group_exp({X, ""}).mat, h = group_exp({Y, ""}).mat;
            Vec z = random_z(sig, rng);
            try {
                auto rh = flat_action(sig, {h}, z);
                auto rgh = flat_action(sig, {g}, rh.z);
                auto rboth = flat_action(sig, {Mat(g * h)}, z);
                CHECK((rgh.z - rboth.z).norm() < 1e-9 * (1.0 + rboth.z.norm()));
                // Cocycle: factors multiply.
                CHECK(rboth.factor ==
                      doctest::Approx(rgh.factor * rh.factor).epsilon(1e-9));
            } catch (const std::domain_error&) {
                // singular set; skip
            }
        }
    }
}

TEST_CASE("flat_action conformality (FD metric pullback)") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> coef(-0.25, 0.25);
    for (auto [p, q] : {std::pair<int, int>{3, 3}, {4, 2}}) {
        auto sig = Signature::create(p, q);
        auto basis = basis_elements(sig);
        Mat X = Mat::Zero(p + q, p + q);
        for (const auto& B : basis) X += coef(rng) * B.mat;
        GroupElement g = group_exp({X, ""});
        for (int t = 0; t < 5; ++t) {
            Vec z = random_z(sig, rng);
            auto r0 = flat_action(sig, g, z);
            const double h = 1e-5;
            Mat J(sig.n, sig.n);
            for (int j = 0; j < sig.n; ++j) {
                Vec zp = z, zm = z;
                zp[j] += h;
                zm[j] -= h;
                J.col(j) =
                    (flat_action(sig, g, zp).z - flat_action(sig, g, zm).z) /
                    (2 * h);
            }
            Mat G = J.transpose() * Mat(sig.eps.asDiagonal()) * J;
            Mat expect =
                std::pow(r0.factor, -2.0) * Mat(sig.eps.asDiagonal());
            CHECK((G - expect).cwiseAbs().maxCoeff() <
                  1e-6 * std::pow(r0.factor, -2.0));
        }
    }
}

TEST_CASE("flat_action singular set raises") {
    auto sig = Signature::create(3, 3);
    // A large dilation composed with conformal inversion-like element can put
    // mu at zero; construct directly: pick g = exp(pi/2 * K_{0,?}) rotating
    // (v0, v_{n+1})... simpler: w = m0 * something. Use the rotation in the
    // (0, 1) plane by pi/2 sending iota(z)=(1,0,..)-like vectors around.
    Mat X = k0_generator(sig, 0, 1).mat * (M_PI / 2.0);
    GroupElement g = group_exp({X, ""});
    // Find a z with mu(g iota(z)) ~ 0: for z=along axis 1 we can solve;
    // instead scan for a throw to confirm the guard is reachable.
    bool threw = false;
    for (double x = -4.0; x <= 4.0; x += 0.001) {
        Vec z(4);
        z << x, 0, 0, 0;
        try {
            flat_action(sig, g, z);
        } catch (const std::domain_error&) {
            threw = true;
            break;
        }
    }
    CHECK(threw);
}
