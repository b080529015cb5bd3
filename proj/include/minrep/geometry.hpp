#pragma once

// Signatures, quadratic forms, the light-cone embedding iota, the conformal
// factor tau, the stereographic map Psi onto M = S^{p-1} x S^{q-1}, and the
// matrix realizations of O(p,q) group / Lie algebra elements.
//
// Ambient coordinates are indexed 0..n+1 (n = p+q-2): the first p of them
// carry a + sign in the ambient quadratic form, the last q a - sign.  Flat
// coordinates z = (z', z'') in R^{p-1,q-1} are indexed 1..n in the ambient
// picture and 0..n-1 in the code; eps_j = +1 for the first p-1 of them and
// -1 for the last q-1.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace minrep {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Signature {
    int p = 0;
    int q = 0;
    int n = 0;        // p + q - 2
    Vec eps;          // n metric signs, +1 (p-1 times) then -1 (q-1 times)

    // Validates p,q >= 2, p+q even, (p,q) != (2,2), n > 2.
    static Signature create(int p, int q);

    // eps for flat coordinate j, 0-based.
    double sign(int j) const { return eps[j]; }
};

// Diagonal matrix of the ambient form I_{p,q} (+1 x p, -1 x q).
Mat ambient_form(const Signature& sig);

// P(z) = sum_j eps_j z_j^2 on the flat space.
double eval_P(const Signature& sig, const Vec& z);

// Q(zeta), the dual quadratic form (same signs) on the Fourier side.
double eval_Q(const Signature& sig, const Vec& zeta);

// mu(v) = (v_0 + v_{n+1})/2 for an ambient vector v.
double mu(const Vec& v);

// nu(v) = Euclidean norm of the first p components (the "+ block").
double nu_plus(const Signature& sig, const Vec& v);

// iota(z) = (1 - P(z)/4, z, 1 + P(z)/4); lies on Xi (|x|=|y|), mu = 1.
Vec iota(const Signature& sig, const Vec& z);

// Conformal factor tau(z) = nu(iota(z)).  All three closed forms agree:
//   sqrt((1 - P/4)^2 + |z'|^2) = sqrt((1 + P/4)^2 + |z''|^2)
//     = sqrt(1 + ((|z'|+|z''|)/2)^2) * sqrt(1 + ((|z'|-|z''|)/2)^2).
double tau(const Signature& sig, const Vec& z);
// The individual factorizations, for consistency tests.
double tau_form1(const Signature& sig, const Vec& z);
double tau_form2(const Signature& sig, const Vec& z);
double tau_form3(const Signature& sig, const Vec& z);

// Psi(z) = tau(z)^{-1} iota(z), a point of M_+ (mu > 0).
Vec psi_map(const Signature& sig, const Vec& z);

// Psi^{-1}(u) = mu(u)^{-1} (u', u'') for u in M_+; throws std::domain_error
// if mu(u) <= 0.
Vec psi_inv(const Signature& sig, const Vec& u);

struct GroupElement {
    Mat mat;
};

struct LieAlgebraElement {
    Mat mat;
    std::string name;
};

// Generators, all as (p+q)x(p+q) matrices in ambient coordinates:
//   Nbar_j = E_{j,0} + E_{j,n+1} - eps_j E_{0,j} + eps_j E_{n+1,j}
//   N_j    = E_{j,0} - E_{j,n+1} - eps_j E_{0,j} - eps_j E_{n+1,j}
//   E      = E_{0,n+1} + E_{n+1,0}
// (j is 1-based here, matching the ambient row/column index.)
LieAlgebraElement nbar_generator(const Signature& sig, int j);
LieAlgebraElement n_generator(const Signature& sig, int j);
LieAlgebraElement e_generator(const Signature& sig);

// Generator of the m^max block o(p-1,q-1), rows/cols 1..n:
//   X_{jk} = E_{j,k} - eps_j eps_k E_{k,j}  (1 <= j < k <= n).
LieAlgebraElement mmax_generator(const Signature& sig, int j, int k);

// so(p) + so(q) rotation generator E_{a,b} - E_{b,a} for ambient indices a<b
// in the same sign block.
LieAlgebraElement k0_generator(const Signature& sig, int a, int b);

// Nbar_j, N_j (1<=j<=n), E, all mmax generators, all k0 generators.
std::vector<LieAlgebraElement> basis_elements(const Signature& sig);

// m0 = -Identity, the central element of M^max.
GroupElement m0_element(const Signature& sig);

// nbar_a = exp(sum_j a_j Nbar_j) (the sum is nilpotent of degree 3).
GroupElement nbar_element(const Signature& sig, const Vec& a);

// Matrix exponential (nilpotents terminate exactly; general elements via
// Pade scaling-and-squaring).
GroupElement group_exp(const LieAlgebraElement& X);

// Meromorphic conformal action L_g z = iota^{-1}(g iota(z) / mu(g iota(z)))
// together with the conformal factor mu(g iota(z)).  Throws
// std::domain_error when |mu| < 1e-10 ("point at infinity").
struct FlatActionResult {
    Vec z;
    double factor;
};
FlatActionResult flat_action(const Signature& sig, const GroupElement& g,
                             const Vec& z);

// Least-squares expansion of a matrix in basis_elements(sig); returns the
// coefficient vector and fills *residual (Frobenius norm of the error) if
// requested.  Used for structure constants.
Eigen::VectorXd expand_in_basis(const Signature& sig,
                                const std::vector<LieAlgebraElement>& basis,
                                const Mat& X, double* residual = nullptr);

inline Mat bracket(const Mat& X, const Mat& Y) { return X * Y - Y * X; }

}  // namespace minrep
