#include "minrep/geometry.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace minrep {

Signature Signature::create(int p, int q) {
    if (p < 2 || q < 2)
        throw std::invalid_argument("signature: need p >= 2 and q >= 2");
    if ((p + q) % 2 != 0)
        throw std::invalid_argument("signature: p + q must be even");
    if (p == 2 && q == 2)
        throw std::invalid_argument("signature: (2,2) is excluded");
    Signature s;
    s.p = p;
    s.q = q;
    s.n = p + q - 2;
    if (s.n <= 2) throw std::invalid_argument("signature: p + q - 2 must exceed 2");
    s.eps = Vec(s.n);
    for (int j = 0; j < s.n; ++j) s.eps[j] = (j < p - 1) ? 1.0 : -1.0;
    return s;
}

Mat ambient_form(const Signature& sig) {
    const int d = sig.p + sig.q;
    Mat I = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) I(i, i) = (i < sig.p) ? 1.0 : -1.0;
    return I;
}

static void check_dim(const Signature& sig, const Vec& z, const char* what) {
    if (z.size() != sig.n)
        throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                    std::to_string(sig.n));
}

double eval_P(const Signature& sig, const Vec& z) {
    check_dim(sig, z, "eval_P");
    return (sig.eps.array() * z.array().square()).sum();
}

double eval_Q(const Signature& sig, const Vec& zeta) {
    check_dim(sig, zeta, "eval_Q");
    return (sig.eps.array() * zeta.array().square()).sum();
}

double mu(const Vec& v) { return 0.5 * (v[0] + v[v.size() - 1]); }

double nu_plus(const Signature& sig, const Vec& v) {
    return v.head(sig.p).norm();
}

Vec iota(const Signature& sig, const Vec& z) {
    check_dim(sig, z, "iota");
    Vec v(sig.n + 2);
    const double P = eval_P(sig, z);
    v[0] = 1.0 - P / 4.0;
    v.segment(1, sig.n) = z;
    v[sig.n + 1] = 1.0 + P / 4.0;
    return v;
}

double tau_form1(const Signature& sig, const Vec& z) {
    const double P = eval_P(sig, z);
    const double zp2 = z.head(sig.p - 1).squaredNorm();
    return std::sqrt((1.0 - P / 4.0) * (1.0 - P / 4.0) + zp2);
}

double tau_form2(const Signature& sig, const Vec& z) {
    const double P = eval_P(sig, z);
    const double zpp2 = z.tail(sig.q - 1).squaredNorm();
    return std::sqrt((1.0 + P / 4.0) * (1.0 + P / 4.0) + zpp2);
}

double tau_form3(const Signature& sig, const Vec& z) {
    const double a = z.head(sig.p - 1).norm();
    const double b = z.tail(sig.q - 1).norm();
    const double s = 0.5 * (a + b), d = 0.5 * (a - b);
    return std::sqrt((1.0 + s * s) * (1.0 + d * d));
}

double tau(const Signature& sig, const Vec& z) {
    check_dim(sig, z, "tau");
    return tau_form3(sig, z);
}

Vec psi_map(const Signature& sig, const Vec& z) {
    return iota(sig, z) / tau(sig, z);
}

Vec psi_inv(const Signature& sig, const Vec& u) {
    if (u.size() != sig.n + 2)
        throw std::invalid_argument("psi_inv: expected ambient dimension");
    const double m = mu(u);
    if (m <= 0.0)
        throw std::domain_error("psi_inv: u is not in M_+ (mu(u) <= 0)");
    return u.segment(1, sig.n) / m;
}

static Mat unit(int d, int i, int j) {
    Mat E = Mat::Zero(d, d);
    E(i, j) = 1.0;
    return E;
}

LieAlgebraElement nbar_generator(const Signature& sig, int j) {
    if (j < 1 || j > sig.n) throw std::invalid_argument("nbar_generator: bad index");
    const int d = sig.p + sig.q, last = sig.n + 1;
    const double ej = sig.eps[j - 1];
    Mat X = unit(d, j, 0) + unit(d, j, last) - ej * unit(d, 0, j) +
            ej * unit(d, last, j);
    return {X, "Nbar_" + std::to_string(j)};
}

LieAlgebraElement n_generator(const Signature& sig, int j) {
    if (j < 1 || j > sig.n) throw std::invalid_argument("n_generator: bad index");
    const int d = sig.p + sig.q, last = sig.n + 1;
    const double ej = sig.eps[j - 1];
    Mat X = unit(d, j, 0) - unit(d, j, last) - ej * unit(d, 0, j) -
            ej * unit(d, last, j);
    return {X, "N_" + std::to_string(j)};
}

LieAlgebraElement e_generator(const Signature& sig) {
    const int d = sig.p + sig.q, last = sig.n + 1;
    return {unit(d, 0, last) + unit(d, last, 0), "E"};
}

LieAlgebraElement mmax_generator(const Signature& sig, int j, int k) {
    if (j < 1 || k <= j || k > sig.n)
        throw std::invalid_argument("mmax_generator: need 1 <= j < k <= n");
    const int d = sig.p + sig.q;
    const double ejk = sig.eps[j - 1] * sig.eps[k - 1];
    Mat X = unit(d, j, k) - ejk * unit(d, k, j);
    return {X, "M_" + std::to_string(j) + "_" + std::to_string(k)};
}

LieAlgebraElement k0_generator(const Signature& sig, int a, int b) {
    const int d = sig.p + sig.q;
    if (a < 0 || b <= a || b >= d)
        throw std::invalid_argument("k0_generator: need 0 <= a < b < p+q");
    const bool aplus = a < sig.p, bplus = b < sig.p;
    if (aplus != bplus)
        throw std::invalid_argument("k0_generator: indices must share a sign block");
    Mat X = unit(d, a, b) - unit(d, b, a);
    return {X, "K_" + std::to_string(a) + "_" + std::to_string(b)};
}

std::vector<LieAlgebraElement> basis_elements(const Signature& sig) {
    std::vector<LieAlgebraElement> out;
    for (int j = 1; j <= sig.n; ++j) out.push_back(nbar_generator(sig, j));
    for (int j = 1; j <= sig.n; ++j) out.push_back(n_generator(sig, j));
    out.push_back(e_generator(sig));
    for (int j = 1; j <= sig.n; ++j)
        for (int k = j + 1; k <= sig.n; ++k) out.push_back(mmax_generator(sig, j, k));
    for (int a = 0; a < sig.p; ++a)
        for (int b = a + 1; b < sig.p; ++b) out.push_back(k0_generator(sig, a, b));
    for (int a = sig.p; a < sig.p + sig.q; ++a)
        for (int b = a + 1; b < sig.p + sig.q; ++b)
            out.push_back(k0_generator(sig, a, b));
    return out;
}

GroupElement m0_element(const Signature& sig) {
    return {-Mat::Identity(sig.p + sig.q, sig.p + sig.q)};
}

GroupElement nbar_element(const Signature& sig, const Vec& a) {
    check_dim(sig, a, "nbar_element");
    const int d = sig.p + sig.q;
    Mat X = Mat::Zero(d, d);
    for (int j = 1; j <= sig.n; ++j) X += a[j - 1] * nbar_generator(sig, j).mat;
    // Degree-3 nilpotent: the series terminates.
    Mat X2 = X * X;
    return {Mat::Identity(d, d) + X + 0.5 * X2};
}

GroupElement group_exp(const LieAlgebraElement& X) {
    const int d = static_cast<int>(X.mat.rows());
    Mat X3 = X.mat * X.mat * X.mat;
    if (X3.cwiseAbs().maxCoeff() == 0.0) {
        return {Mat::Identity(d, d) + X.mat + 0.5 * X.mat * X.mat};
    }
    return {X.mat.exp()};
}

FlatActionResult flat_action(const Signature& sig, const GroupElement& g,
                             const Vec& z) {
    const Vec v = g.mat * iota(sig, z);
    const double m = mu(v);
    if (std::abs(m) < 1e-10)
        throw std::domain_error("flat_action: point at infinity (mu = 0)");
    return {v.segment(1, sig.n) / m, m};
}

Eigen::VectorXd expand_in_basis(const Signature& sig,
                                const std::vector<LieAlgebraElement>& basis,
                                const Mat& X, double* residual) {
    const int d = sig.p + sig.q;
    const int nb = static_cast<int>(basis.size());
    Mat A(d * d, nb);
    for (int k = 0; k < nb; ++k)
        A.col(k) = Eigen::Map<const Eigen::VectorXd>(basis[k].mat.data(), d * d);
    Eigen::Map<const Eigen::VectorXd> b(X.data(), d * d);
    Eigen::VectorXd c = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    if (residual) *residual = (A * c - b).norm();
    return c;
}

}  // namespace minrep
