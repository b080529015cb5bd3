#pragma once

// Solutions of the flat wave equation box f = 0 on R^{p-1,q-1} built from
// cone data: synthesis, the Green-kernel transform, the N and W inner
// products, the boundary-value split f = f_+ + f_-, Cauchy data on a
// hyperplane, and conserved quantities.  The Green kernel itself is never
// evaluated in position space; every number routes through the cone.

#include "minrep/cone_model.hpp"

#include <iosfwd>
#include <utility>

namespace minrep {

// f(z) = (2 pi)^{-n} int_C phi(zeta) e^{-i z.zeta} d mu, with phi sampled
// once on the rule's nodes at construction.  Values are cached per probe
// point (append-only; recompute per thread if sharing).
class FlatSolution {
  public:
    FlatSolution(const Signature& sig, const ConeRule& rule,
                 const ConeFunction& phi);

    const Signature& sig() const { return sig_; }
    const ConeRule& rule() const { return rule_; }
    const ConeFunction& cone_data() const { return phi_; }

    Cplx value(const Vec& z) const;
    // d f / d z_j (j 1-based), via the -i zeta_j factor.
    Cplx derivative(const Vec& z, int j) const;
    // Central second differences of sum_j eps_j d_j^2 f at step h.
    Cplx box_residual(const Vec& z, double h) const;

  private:
    Signature sig_;
    ConeRule rule_;
    ConeFunction phi_;
    Mat zeta_;                // one cone node per row
    std::vector<Cplx> wphi_;  // quadrature weight * sample * (2 pi)^{-n}
    mutable std::map<std::vector<double>, Cplx> cache_;
};

// (F phi)|_C as a cone function; each cone evaluation is one box Fourier
// quadrature (use the separable variant when phi factorizes, it is far
// cheaper).
ConeFunction restrict_fourier(const Signature& sig, const BoxRule& rule,
                              const BoxIntegrand& phi);
ConeFunction restrict_fourier_separable(
    const Signature& sig, const BoxRule& rule,
    const std::vector<std::function<Cplx(double)>>& factors);

// S phi = F^{-1}((F phi) delta(Q)): synthesis from the restricted Fourier
// transform.  phi must be negligible outside the box.
FlatSolution s_transform(const Signature& sig, const ConeRule& cone_rule,
                         const BoxRule& box, const BoxIntegrand& phi);
FlatSolution s_transform_separable(
    const Signature& sig, const ConeRule& cone_rule, const BoxRule& box,
    const std::vector<std::function<Cplx(double)>>& factors);

// Test functions of the form g(|z'|) h(|z''|); their Fourier transforms
// restrict to the cone as radial profiles, which makes both sides of the
// N-form computable on low-dimensional grids at any n.
struct BiRadial {
    std::function<double(double)> plus_profile;   // g
    std::function<double(double)> minus_profile;  // h
    double rmax = 6.0;  // both profiles negligible beyond rmax
};

struct InnerNParams {
    int n_r = 80;   // radial nodes for position grids and profile transforms
    int n_s = 96;   // cone radial nodes
    double smin = 1e-6;
    double smax = 10.0;
};

// The radial profile of (F phi)|_C for bi-radial phi, as a cone function.
ConeFunction biradial_cone_data(const Signature& sig, const BiRadial& phi,
                                const InnerNParams& params = {});

// Cone radial rule and synthesis weights for bi-radial phi:
// S phi(r, rho) = sum_k c_k spw(p-1, s_k r) spw(q-1, s_k rho).
struct BiRadialSynthesisData {
    Vec s_nodes;
    Vec c;
};
BiRadialSynthesisData biradial_synthesis_data(
    const Signature& sig, const BiRadial& phi, const InnerNParams& params = {});

// S phi as a function of the two radii (|z'|, |z''|) for bi-radial phi;
// one radial cone quadrature per evaluation.
std::function<Cplx(double, double)> biradial_synthesis(
    const Signature& sig, const BiRadial& phi, const InnerNParams& params = {});

// S phi sampled on a tensor grid of the two radii, assembled as one matrix
// product over the cone radial rule (use this instead of per-point calls
// when many radii are needed; values are real for real profiles).
Mat biradial_synthesis_grid(const Signature& sig, const BiRadial& phi,
                            const Vec& r_nodes, const Vec& rho_nodes,
                            const InnerNParams& params = {});

struct InnerNResult {
    Cplx position;        // (phi1, S phi2)_{L^2(R^n)}
    Cplx cone;            // (2 pi)^{-n} <F phi1|_C, F phi2|_C>_{L^2(C)}
    double disagreement;  // |position - cone| / max(|cone|, tiny)
};

// Both evaluations of the N-form; the two numbers are reported as computed
// and never reconciled.
InnerNResult inner_N(const Signature& sig, const BiRadial& phi1,
                     const BiRadial& phi2, const InnerNParams& params = {});

// Boundary values and normal derivatives of f_+ and f_- on z_axis = 0,
// sampled on the tensor grid z_grid over the kept coordinates (in
// increasing-coordinate order).
struct CauchyData {
    int axis = 1;  // removed coordinate, 1-based
    BoxRule z_grid;
    std::vector<Cplx> f_plus, f_minus;    // row-major over z_grid
    std::vector<Cplx> df_plus, df_minus;  // d/dz_axis at z_axis = 0
    // Tangential derivatives d/dz_k for each kept coordinate, same layout;
    // filled only on request.
    std::vector<std::vector<Cplx>> grad_plus, grad_minus;
    long grid_size() const;
};

// Computes Cauchy data by quadrature over the chart (zeta_1, ..,
// zeta_axis-hat, .., zeta_n), where the cone measure is d zeta' / (2 sqrt Q)
// and the lifted point has zeta_axis = +- sqrt Q.  Throws std::domain_error
// if phi fails to vanish near the chart boundary sqrt Q = 0 (the data would
// not be rapidly decreasing).
CauchyData cauchy_data(const Signature& sig, const ConeFunction& phi,
                       int axis, const BoxRule& chart, const BoxRule& z_grid,
                       bool with_gradient = false);

// f_+ and f_- from the Heaviside cut of the cone data in zeta_axis
// (zeta_axis >= 0 goes to the plus part, so the split is exactly additive
// on shared quadrature nodes).
std::pair<FlatSolution, FlatSolution> split_pm(const FlatSolution& f,
                                               int axis);

struct WFormResult {
    double value;          // real part of the W-form
    double imag_residual;  // |imaginary part|, flagged by the caller
};

// (f,f)_W = (1/i) int (f_+ conj(d f_+/dz_i) - f_- conj(d f_-/dz_i)) dz'
// over the hyperplane z_i = 0, from precomputed Cauchy data (uses the grid
// weights) or computed end to end through the chart.
WFormResult inner_W(const CauchyData& data);
WFormResult inner_W(const Signature& sig, const ConeFunction& phi, int axis,
                    const BoxRule& chart, const BoxRule& z_grid);

// Cone data of the separated form b(s) c(omega_1) d(omega'_{q-1}).  With
// cutoffs vanishing near the equators, such data is supported away from
// zeta_1 = 0 and zeta_n = 0, and its Cauchy data on z_1 = 0 or z_n = 0
// depends only on two radii and one line coordinate; the W-form then
// reduces to low-dimensional quadrature at any n.
struct SeparatedConeData {
    std::function<double(double)> radial;     // b(s)
    std::function<double(double)> plus_cut;   // c, ignored when p = 2
    std::function<double(double)> minus_cut;  // d, ignored when q = 2
    double smin = 1e-6;
    double smax = 4.0;  // radial profile negligible beyond smax
};

ConeFunction separated_cone_function(const Signature& sig,
                                     const SeparatedConeData& data);
// ||phi||^2_{L^2(C)} by the reduced radial x polar quadrature.
double separated_norm(const Signature& sig, const SeparatedConeData& data,
                      int n_s = 160, int n_t = 48);

struct SeparatedWParams {
    int n_s = 96;           // cone radial nodes
    int n_t = 64;           // polar-cosine nodes per half sphere
    int n_rad = 96;         // hyperplane radial nodes
    double rad_max = 16.0;  // hyperplane radial extent
    int n_line = 136;       // nodes on the distinguished line coordinate
    double line_max = 16.0;
};

// The W-form of the solution with the given separated cone data, on the
// hyperplane z_axis = 0; axis must be 1 or n.
WFormResult inner_W_separated(const Signature& sig,
                              const SeparatedConeData& data, int axis,
                              const SeparatedWParams& params = {});

// E_j(f) = int_C |zeta_j| |phi|^2 d mu.  The shift t translates z_j, which
// multiplies phi by a unimodular phase; the returned value is t-independent.
double conserved_quantity(const Signature& sig, const ConeRule& rule,
                          const ConeFunction& phi, int j, double shift = 0.0);

// CSV "z1,..,zn,re,im", one row per probe point.
void write_solution_csv(std::ostream& os, const FlatSolution& f,
                        const std::vector<Vec>& points);
// CSV "z_<k>,..,fp_re,fp_im,fm_re,fm_im,dfp_re,dfp_im,dfm_re,dfm_im",
// one row per grid node.
void write_cauchy_csv(std::ostream& os, const CauchyData& data);

}  // namespace minrep
