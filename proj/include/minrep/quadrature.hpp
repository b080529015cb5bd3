#pragma once

// Reusable numeric integration: Gauss rules on intervals, product rules on
// spheres, a log-mapped radial rule on (0, inf), tensor box rules on R^k,
// and the cone integral with the 1/2 prefactor and s^{n-3} density.

#include "minrep/geometry.hpp"
#include "minrep/specfun.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace minrep {

using Cplx = std::complex<double>;

struct Quad1D {
    Vec nodes;
    Vec weights;
};

// Gauss rule for the weight (1-t^2)^lam on [-1,1] (lam = 0 is Legendre),
// computed by the Golub-Welsch eigenvalue method.
Quad1D gauss_gegenbauer(int n, double lam);
Quad1D gauss_legendre(int n);
// Affine image of a [-1,1] rule on [a,b].
Quad1D mapped(const Quad1D& q, double a, double b);
// Gauss-Legendre in log s on [smin, smax]; weights carry the ds = s du
// Jacobian, so sums approximate plain ds integrals on (0, inf) truncated
// to the envelope interval.
Quad1D radial_log_rule(double smin, double smax, int n);

// Deterministic pairwise summation (mandated summation order).
Cplx pairwise_sum(std::vector<Cplx>& terms);
double pairwise_sum(std::vector<double>& terms);

// vol(S^dim) = 2 pi^{(dim+1)/2} / Gamma((dim+1)/2).
double sphere_volume(int dim);
// Closed-form monomial integral over S^{m-1} with m = alpha.size():
// 2 prod Gamma((a_i+1)/2) / Gamma(sum (a_i+1)/2) if all even, else 0.
double sphere_monomial_integral(const std::vector<int>& alpha);
// int_{S^{m-1}} e^{i t <eta, omega>} d omega for |eta| = 1:
// (2 pi)^{m/2} t^{1-m/2} J_{m/2-1}(t), with the t -> 0 limit vol(S^{m-1}).
double sphere_plane_wave(int m, double t);
// Complex Hankel envelope W_m with sphere_plane_wave(m, t) = Re(W_m(t) e^{it});
// slowly varying for large t, which separates the fast and slow phases in
// products of plane-wave factors.  Closed forms through m = 5.
Cplx sphere_plane_wave_envelope(int m, double t);

// Product rule on S^dim: Gauss-Gegenbauer in each polar cosine, trapezoid
// in the final periodic angle; S^0 is two points of weight 1.  Exact on
// polynomials of degree <= declared degree (= 2 order - 1).
struct SphereRule {
    int dim = 0;
    Mat nodes;  // one node per row, dim+1 columns, unit vectors
    Vec weights;
    int degree = 0;
    static SphereRule create(int dim, int order);
};

// Cone rule: radial x S^{p-2} x S^{q-2}; integrates
// (1/2) int_0^inf int int f(s, w, w') s^{n-3} ds dw dw'.
struct ConeRule {
    Signature sig;
    Quad1D radial;
    SphereRule sp;  // S^{p-2}
    SphereRule sq;  // S^{q-2}
    int nr = 0;
    int order = 0;
    double smin = 0.0, smax = 0.0;
    static ConeRule create(const Signature& sig, int nr, int order,
                           double smin, double smax);
    ConeRule doubled() const;
};

using ConeIntegrand =
    std::function<Cplx(double s, const Vec& omega, const Vec& omega_prime)>;

// Cone integral; throws std::runtime_error naming the node if the integrand
// produces NaN.
Cplx cone_integrate(const ConeRule& rule, const ConeIntegrand& f);

struct RefinedValue {
    Cplx value;   // from the doubled rule
    double error; // |doubled - base| node-doubling estimate
};
RefinedValue cone_integrate_refined(const ConeRule& rule,
                                    const ConeIntegrand& f);

// Tensor Gauss-Legendre rule on a box in R^k.
struct BoxRule {
    std::vector<Quad1D> axes;
    long node_count() const;
};
BoxRule box_rule(const Vec& lo, const Vec& hi, int n_per_axis);

using BoxIntegrand = std::function<Cplx(const Vec& z)>;

Cplx box_integrate(const BoxRule& rule, const BoxIntegrand& f);

// F phi(zeta) = int phi(z) e^{sign * i z.zeta} dz over the rule's box; plain
// Euclidean pairing, no 2 pi prefactor; sign = +1 is the forward transform.
Cplx fourier_quad(const BoxRule& rule, const BoxIntegrand& phi,
                  const Vec& zeta, double sign = 1.0);

// F phi on a tensor grid of zeta values (one axis list per coordinate),
// evaluated by per-axis contractions instead of a full double loop.
// Returns values in row-major order over the zeta grid.
std::vector<Cplx> fourier_quad_grid(const BoxRule& rule,
                                    const BoxIntegrand& phi,
                                    const std::vector<Vec>& zeta_axes,
                                    double sign = 1.0);

// f(z) = (2 pi)^{-n} int_C phi(zeta) e^{-i z.zeta} d mu, with
// zeta = (s w, s w') on the cone.
Cplx inverse_synthesis(const ConeRule& rule, const ConeIntegrand& phi,
                       const Vec& z);

}  // namespace minrep
