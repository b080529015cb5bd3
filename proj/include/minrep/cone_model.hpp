#pragma once

// The L^2(C) realization: cone functions and their inner product, the
// parabolic group action, the exact Lie-algebra operators on a symbolic
// polynomial-times-plane-wave family, and the lowest vector family psi_{b,m}.

#include "minrep/quadrature.hpp"

#include <iosfwd>
#include <map>

namespace minrep {

struct ConeFunction {
    ConeIntegrand eval;  // (s, omega, omega') with zeta = (s omega, s omega')
    std::string label;
};

// Hermitian inner product <f, g> = integral of conj(f) g over the cone.
// Computed on the rule and its doubled refinement; throws std::runtime_error
// if the two disagree beyond diverge_tol relative (node-doubling divergence
// check).  The doubling error is written to *err when requested.
Cplx l2c_inner(const ConeRule& rule, const ConeFunction& f,
               const ConeFunction& g, double* err = nullptr,
               double diverge_tol = 1e-6);

// Generator classes of the parabolic subgroup acting on L^2(C):
//   Dilation   e^{tE}  : psi -> e^{-(n-2)t/2} psi(e^{-t} zeta)
//   Rotation   m in M^max_+ (an O(p-1,q-1) matrix on zeta): psi(m^T zeta)
//   CenterSign m0 = -1 : psi -> (-1)^{(p-q)/2} psi
//   Translation nbar_a : psi -> e^{2 i a.zeta} psi
struct PmaxElement {
    enum class Kind { Dilation, Composition, CenterSign, Phase } kind;
    double t = 0.0;  // Dilation
    Mat m;           // Composition: n x n, preserves diag(eps)
    Vec a;           // Phase
    static PmaxElement dilation(double t);
    static PmaxElement composition(const Mat& m);
    static PmaxElement center_sign();
    static PmaxElement phase(const Vec& a);
};

// Applies the listed generator classes; throws std::invalid_argument for a
// Composition matrix that does not preserve the dual form.  The full group
// action beyond the parabolic is deliberately not available here.
ConeFunction pmax_action(const Signature& sig, const PmaxElement& elem,
                         const ConeFunction& psi);

// Finite sums  sum_alpha c_alpha zeta^alpha e^{i b.zeta}, closed under
// d/d zeta_j, multiplication by zeta_j, the Euler operator and the dual wave
// operator; coefficient arithmetic is exact up to float rounding.
struct PolyPlaneWave {
    int n = 0;
    Vec b;
    std::map<std::vector<int>, Cplx> terms;

    static PolyPlaneWave monomial(int n, const std::vector<int>& alpha,
                                  Cplx coeff, const Vec& b);
    static PolyPlaneWave constant(int n, Cplx coeff);

    PolyPlaneWave dz(int j) const;    // d/d zeta_j, 0-based
    PolyPlaneWave mul(int j) const;   // zeta_j .
    PolyPlaneWave euler() const;      // sum_j zeta_j d_j
    PolyPlaneWave box(const Signature& sig) const;  // sum_j eps_j d_j^2
    PolyPlaneWave scaled(Cplx c) const;
    PolyPlaneWave plus(const PolyPlaneWave& o) const;  // same b required

    Cplx eval(const Vec& zeta) const;
    double coeff_norm() const;
    double distance(const PolyPlaneWave& o) const;
    void prune(double tol = 1e-14);
};

// The Lie algebra action on the symbolic family, for X in
// span{Nbar_j, N_j, E} + m^max:
//   Nbar_j : 2 i zeta_j
//   N_j    : i ((lambda - n) eps_j d_j - E_zeta eps_j d_j + 1/2 zeta_j box)
//   E      : lambda - n - E_zeta
//   m^max  : sum_{jk} X_{jk} zeta_j d_k for the middle-block matrix X
// The N_j and E operators carry lambda - n (not lambda) in the zeroth-order
// coefficient; this is what closes the bracket relations against the matrix
// algebra.  The operators are independent of the parity character that
// labels the representation.  Throws std::invalid_argument if X lies
// outside the spanned algebra.
PolyPlaneWave dpi_hat(const Signature& sig, double lambda,
                      const LieAlgebraElement& X, const PolyPlaneWave& f);

// The matrices spanning dpi_hat's domain, in expansion order:
// Nbar_1..Nbar_n, N_1..N_n, E, then the m^max pairs (j < k).
std::vector<LieAlgebraElement> dpi_hat_basis(const Signature& sig);

// Conjugates the flat-side operator through the Fourier dictionary
// (z_j <-> -i d_j, d/dz_j <-> -i zeta_j, E_z <-> -n - E_zeta,
//  P(z) <-> -box) and compares with dpi_hat; returns the coefficient-norm
// residual.  j is 1-based, ignored for E.
enum class DualityGen { Nbar, N, E };
double fourier_duality_check(const Signature& sig, double lambda,
                             DualityGen gen, int j, const PolyPlaneWave& f);

// psi_{b,m}(zeta) = e^{i b.zeta} |m zeta|^{(3-q)/2} K_{(q-3)/2}(2 |m zeta|),
// where |.| of a cone point is its radial coordinate s.  m must preserve
// diag(eps).  psi_bm(sig, 0, I) is the lowest vector psi_0e.
ConeFunction psi_bm(const Signature& sig, const Vec& b, const Mat& m);

// CSV with header "s,i,j,re,im": radial node value, sphere node indices,
// and the sample of f at that cone node.
void write_cone_samples_csv(std::ostream& os, const ConeRule& rule,
                            const ConeFunction& f);

}  // namespace minrep
