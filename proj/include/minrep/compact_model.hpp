#pragma once

// The compact picture on M = S^{p-1} x S^{q-1}: parity-typed functions on
// product-sphere grids, harmonic component expansions, the spectral Yamabe
// operator, twisted pullbacks between the flat and compact pictures, the
// weighted component norm (,)_M, and the convolution form (,)_A realized
// through the Green-kernel transform.  Functions invariant under the
// rotations fixing the two polar axes reduce to two Gegenbauer axes, which
// keeps the larger signatures cheap.

#include "minrep/flat_model.hpp"

#include <iosfwd>

namespace minrep {

// dim of the degree-a harmonic polynomials on R^p.
double harmonic_dim(int p, int a);

// Gegenbauer polynomial C_a^{(p-2)/2}(t) (Chebyshev T_a when p = 2).
double zonal_poly(int p, int a, double t);

// Reproducing kernel of the degree-a harmonics on S^{p-1}: projection is
// integration against Z_a(<u, v>) over the sphere.
double zonal_kernel(int p, int a, double t);

// Square norm of zonal_poly(p, a, .) in L^2(S^{p-1}) (as a function of the
// polar cosine), computed by Gauss-Gegenbauer quadrature.
double zonal_norm2(int p, int a);

// Yamabe eigenvalue on degree-a harmonics of S^{p-1}: 1/4 - (a+(p-2)/2)^2.
double yamabe_sphere_eigen(int p, int a);

// Yamabe eigenvalue of M on the (a, b) component:
// (b + (q-2)/2)^2 - (a + (p-2)/2)^2; zero exactly when a + p/2 = b + q/2.
double yamabe_eigen(const Signature& sig, int a, int b);

// Weight of the (a, b) component in the (,)_M norm: a + (p-2)/2, the
// positive square root of the (1/4 - Yamabe_{S^{p-1}}) eigenvalue; equals
// b + (q-2)/2 on admissible indices.
double ktype_weight(const Signature& sig, int a);

// Function on M with parity f(-u) = eps f(u), sampled on a product of
// sphere rules; eval keeps the smooth representative for off-grid probes.
// Ambient points u have n+2 coordinates, the first p on S^{p-1}.
struct CompactFunction {
    Signature sig;
    int eps = 1;
    SphereRule rx;  // S^{p-1}
    SphereRule ry;  // S^{q-1}
    Eigen::MatrixXcd samples;  // rx node x ry node
    std::function<Cplx(const Vec& u)> eval;
};

// Samples fn on the product grid; throws std::domain_error if the parity
// invariant fails at probed node pairs (tolerance 1e-10).
CompactFunction compact_sample(const Signature& sig, int eps, int order_x,
                               int order_y,
                               const std::function<Cplx(const Vec&)>& fn);

// L^2(M) pairing <F, G> = int_M F conj(G) for the product measure.
Cplx l2m_inner(const CompactFunction& F, const CompactFunction& G);
double l2m_norm(const CompactFunction& F);

// Projection onto the (a, b) harmonic component by zonal-kernel quadrature
// on both factors.
CompactFunction project_component(const CompactFunction& F, int a, int b);

// Spectral Yamabe operator of M, degrees up to half the declared rule
// degree per factor.  Throws std::domain_error when F is not band-limited
// there (projection completeness residual > 1e-6).
CompactFunction yamabe_M(const CompactFunction& F);

// Components on the admissible index set a, b >= 0, a + p/2 = b + q/2,
// truncated at a <= a_max.  residual is the relative L^2 mass of F outside
// the kept components (informational; zero for vectors of the model space).
struct KTypeExpansion {
    Signature sig;
    int a_max = 6;
    std::vector<int> a_deg, b_deg;
    std::vector<Eigen::MatrixXcd> comps;  // samples per index pair
    std::vector<double> norm2;            // L^2(M) square norm per pair
    SphereRule rx, ry;
    double residual = 0.0;
};
KTypeExpansion ktype_expand(const CompactFunction& F, int a_max = 6);

// (F1, F2)_M = sum over admissible (a, b) of (a + (p-2)/2) times the
// L^2(M) pairing of the components.  Throws std::invalid_argument on
// mismatched grids or truncations.
Cplx inner_M(const KTypeExpansion& E1, const KTypeExpansion& E2);

// CSV "a,b,norm2", one row per kept component.
void write_ktype_csv(std::ostream& os, const KTypeExpansion& E);

// Function on M of the form F(u) = g(u_0, u_{n+1}); s is the polar cosine
// on S^{p-1}, t on S^{q-1}.
struct BiZonalFunction {
    Signature sig;
    int eps = 1;
    std::function<Cplx(double s, double t)> eval;
};

// Coefficients of a bi-zonal function against the L^2(S)-normalized zonal
// harmonics Y_a(s) Y_b(t), by Gauss-Gegenbauer quadrature on both axes.
struct ZonalExpansion {
    Signature sig;
    int ax_max = 0, ay_max = 0;
    Eigen::MatrixXcd coeffs;  // (ax_max+1) x (ay_max+1)
    double norm2 = 0.0;       // ||F||^2_{L^2(M)} by the same quadrature
    double residual = 0.0;    // relative L^2 mass beyond the truncation
};
ZonalExpansion zonal_expand(const BiZonalFunction& F, int ax_max, int ay_max,
                            int n_nodes = 64);

// Zonal expansion of the pullback inverse F of a bi-radial flat function,
// computed entirely in flat coordinates:
//   c_ab = 2 vol vol' int tau^{lambda-n} f(r, rho) Y_a(s) Y_b(t)
//          r^{p-2} rho^{q-2} dr drho,
// with s, t the polar cosines of Psi(z).  Components whose parity differs
// from eps vanish identically and are set to zero.  Avoids near-equator
// evaluations of F (the weight tau^{lambda-n} keeps the integrand decaying).
ZonalExpansion zonal_expand_flat(
    const Signature& sig, double lambda, int eps,
    const std::function<Cplx(double, double)>& f_radial, int ax_max,
    int ay_max, int n_r = 240, double rmax = 40.0);
// Fast path for f = S phi with bi-radial phi: the radial grid of f is
// assembled by one matrix product over the cone rule.
ZonalExpansion zonal_expand_flat(const Signature& sig, double lambda, int eps,
                                 const BiRadial& phi,
                                 const InnerNParams& cone_params, int ax_max,
                                 int ay_max, int n_r = 240,
                                 double rmax = 40.0);

// Spectral Yamabe operator in the bi-zonal sector; throws std::domain_error
// when the expansion residual exceeds 1e-6.
BiZonalFunction yamabe_M(const BiZonalFunction& F, int a_max = 24,
                         int n_nodes = 64);

// (,)_M restricted to two zonal expansions (admissible indices only).
Cplx inner_M(const ZonalExpansion& E1, const ZonalExpansion& E2);

// The generating vector as a bi-zonal function: the even hypergeometric
// closed form carries a sign correction on the odd-parity signatures,
// which recovers the analytic harmonic-polynomial representative.  For
// p < q the roles of the two spheres are exchanged.
BiZonalFunction generating_bizonal(const Signature& sig);

// Twisted pullback (Psi*_lambda F)(z) = tau(z)^{-lambda} F(Psi(z)) and its
// inverse, which reconstructs both hemispheres from the parity:
// u -> |mu(u)|^{-lambda} f(Psi^{-1}(+-u)) with the sign of mu(u), times eps
// on the lower hemisphere.  The inverse throws std::domain_error when the
// value fails to be finite (equator evaluation outside the image class).
std::function<Cplx(const Vec&)> twisted_pullback(
    const Signature& sig, double lambda,
    const std::function<Cplx(const Vec&)>& F);
std::function<Cplx(const Vec&)> twisted_pullback_inv(
    const Signature& sig, double lambda, int eps,
    const std::function<Cplx(const Vec&)>& f);

// Pullback inverse of a bi-radial flat function f(|z'|, |z''|); the result
// depends only on the two polar cosines.
BiZonalFunction bizonal_pullback_inv(
    const Signature& sig, double lambda, int eps,
    const std::function<Cplx(double, double)>& f_radial);

// Zonal expansion of the pullback inverse of S phi for bi-radial phi, at
// the accuracy the cross-picture norm ratio needs.  The two Gegenbauer
// axes get different node counts (the offset is searched so no product
// node sits near the equator mu = 0), and product nodes whose flat radii
// exceed r_switch evaluate S phi through the slow-phase Hankel-envelope
// part of the cone quadrature; that part stays resolvable at any distance
// because r - rho is bounded near the equator, while the dropped fast
// phase s (r + rho) suppresses its term well below the target accuracy.
struct CrossNormParams {
    int a_max = 14;          // kept degrees on the S^{p-1} axis
    int n_x = 40;            // S^{p-1} axis nodes; the other axis is offset
    double r_switch = 40.0;  // flat radius where the envelope form takes over
    InnerNParams cone{80, 4096, 1e-4, 8.0};
};
ZonalExpansion pullback_expansion(const Signature& sig, double lambda,
                                  int eps, const BiRadial& phi,
                                  const CrossNormParams& params = {});

// (varpi_lambda(g) F)(v) = nu(g^{-1} v)^{-lambda} F(g^{-1} v / nu(g^{-1} v))
// on M, for the conformal action through the ambient cone.
std::function<Cplx(const Vec&)> compact_action(
    const Signature& sig, double lambda, const GroupElement& g,
    const std::function<Cplx(const Vec&)>& F);

// Pointwise convolution kernel |y|^nu chi_eps(sgn y) / Gamma((2nu+3-eps)/4)
// for y != 0 (throws std::domain_error at y = 0); the Gamma poles give
// exact zeros.
double kernel_psi(double nu, int eps, double y);

// h(y) = e^{i pi (q-1)/2} (y + i0)^{1-n/2}, off y = 0.
Cplx kernel_h(const Signature& sig, double y);

// The residue-formula combination
// delta Gamma((n-1+eps)/4) / (2 pi i) * (h(y) - conj(h(y))),
// equal to kernel_psi(1-n/2, eps, y) pointwise off y = 0.
Cplx kernel_psi_critical(const Signature& sig, double y);

// The convolution form on pullback images, realized through the
// Green-kernel transform: (F1, F2)_A = delta <2 c2 S phi1, conj phi2> with
// the pairing 2 int dz; evaluated on bi-radial data together with the
// L^2(C) evaluation of (f1, f2)_N, so the ratio is an independent
// cross-check of the two discretizations.
struct KnappSteinResult {
    Cplx a_form;  // (F1, F2)_A
    Cplx n_form;  // (f1, f2)_N from the cone side
    Cplx ratio;   // n_form / a_form
};
KnappSteinResult knapp_stein_pair(const Signature& sig, const BiRadial& phi1,
                                  const BiRadial& phi2,
                                  const InnerNParams& params = {});

}  // namespace minrep
