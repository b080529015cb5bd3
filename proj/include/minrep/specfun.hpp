#pragma once

// Special functions and closed-form constants: Gamma, Bessel J/I/K, Gauss
// 2F1 (with Pfaff / 1-x continuations), Appell F4 (double series), the
// Bailey Hankel-transform identity, the generating functions F0 (on M) and
// f0 (flat), and the normalization constants.

#include "minrep/geometry.hpp"

#include <optional>
#include <string>

namespace minrep {

double gamma_fn(double x);

// Bessel functions for real order.  bessel_k is even in nu; bessel_j for
// negative non-integer order uses J_{-nu} = cos(nu pi) J_nu - sin(nu pi) Y_nu.
// All require x > 0 (throw std::domain_error otherwise).
double bessel_j(double nu, double x);
double bessel_i(double nu, double x);
double bessel_k(double nu, double x);

// Gauss hypergeometric series with continuations.  If `method` is non-null it
// receives which evaluation path was used ("series", "polynomial", "pfaff",
// "connection") for reproducibility.  Throws std::domain_error for x >= 1,
// for non-positive-integer c (non-terminating case), and for the integer
// c-a-b connection case outside the plain series' reach.
double gauss_2f1(double a, double b, double c, double x,
                 std::string* method = nullptr);

// Appell F4 double series; requires sqrt|x| + sqrt|y| < 1 and c,d not
// non-positive integers.  Tail bounded below 1e-12 by ratio test.
double appell_f4(double a, double b, double c, double d, double x, double y);

struct Constants {
    double eps_sign;      // (-1)^{(p-q)/2}
    double delta;         // +1 for p-q = 0,2 mod 8; -1 for p-q = 4,6 mod 8
    double c1;            // Gamma((n-1-eps)/4) / (2^{n/2} pi^{(n+1)/2})
    double c2;            // 4 delta pi^{n/2} Gamma((n-1+eps)/4) / Gamma(n/2-1)
    double c3;            // pi^{n/2} Gamma((n-1+eps)/4) / Gamma(n/2-1)
    double thm55_const;   // (2pi)^{n/2} 2^{-(p-5)/2} Gamma((q-1)/2)/Gamma((n-2)/2)
    double prop56_const;  // Gamma((n-2)/2) / (2^{(q+3)/2} pi^{n/2} Gamma((q-1)/2))
};
Constants constants(const Signature& sig);

// F0(u) = 2F1((q-p)/4, (p+q-4)/4; (q-1)/2; 1 - u_{n+1}^2) on M, the
// O(p) x O(q-1)-invariant generator of Ker(Yamabe_M).  Requires p >= q.
double generating_F0(const Signature& sig, const Vec& u);

// f0(z) = tau^{-(p+q-4)/2} 2F1((q-p)/4, (p+q-4)/4; (q-1)/2; |z''|^2/tau^2).
double generating_f0(const Signature& sig, const Vec& z);

// |F4(...) - tau^{-(p+q-4)/2} 2F1(...)| at z (the Lemma relating the two);
// returns nullopt when (-|z'|^2/4, -|z''|^2/4) is outside the F4 series
// domain (skip marker, not a failure).
std::optional<double> f4_reduction_residual(const Signature& sig, const Vec& z);

// Right side of the Bailey Hankel-transform formula.
double bailey_rhs(double lambda, double mu, double nu, double rho, double a,
                  double b, double c);
// Left side by oscillation-aware panel quadrature.
double bailey_lhs_quadrature(double lambda, double mu, double nu, double rho,
                             double a, double b, double c);
// |lhs - rhs|; throws std::domain_error outside the absolutely convergent
// regime (c <= 0, lambda+mu+nu-rho <= 0, or F4 arguments out of domain).
double bailey_hankel_residual(double lambda, double mu, double nu, double rho,
                              double a, double b, double c);

}  // namespace minrep
