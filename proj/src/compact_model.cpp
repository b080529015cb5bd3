#include "minrep/compact_model.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace minrep {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

double binom(int m, int k) {
    if (k < 0 || k > m) return 0.0;
    double out = 1.0;
    for (int i = 0; i < k; ++i) out = out * (m - i) / (i + 1);
    return out;
}

bool near_nonpos_int(double x) {
    return x <= 0.5 && std::abs(x - std::round(x)) < 1e-12;
}

}  // namespace

double harmonic_dim(int p, int a) {
    if (p < 1 || a < 0) throw std::invalid_argument("harmonic_dim");
    return binom(a + p - 1, p - 1) - binom(a + p - 3, p - 1);
}

double zonal_poly(int p, int a, double t) {
    if (p < 2 || a < 0) throw std::invalid_argument("zonal_poly");
    if (a == 0) return 1.0;
    if (p == 2) {
        // Chebyshev T
        double prev = 1.0, cur = t;
        for (int k = 1; k < a; ++k) {
            double next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    const double lam = (p - 2) / 2.0;
    double prev = 1.0, cur = 2.0 * lam * t;
    for (int k = 1; k < a; ++k) {
        double next = (2.0 * (k + lam) * t * cur - (k + 2.0 * lam - 1.0) * prev) /
                      (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double zonal_kernel(int p, int a, double t) {
    if (p == 2) {
        if (a == 0) return 1.0 / (2.0 * M_PI);
        return zonal_poly(2, a, t) / M_PI;
    }
    return harmonic_dim(p, a) * zonal_poly(p, a, t) /
           (sphere_volume(p - 1) * zonal_poly(p, a, 1.0));
}

double zonal_norm2(int p, int a) {
    const int nq = a + 2;
    Quad1D g = gauss_gegenbauer(nq, (p - 3) / 2.0);
    double sum = 0.0;
    for (long i = 0; i < g.nodes.size(); ++i) {
        double c = zonal_poly(p, a, g.nodes[i]);
        sum += g.weights[i] * c * c;
    }
    return sphere_volume(p - 2) * sum;
}

double yamabe_sphere_eigen(int p, int a) {
    const double w = a + (p - 2) / 2.0;
    return 0.25 - w * w;
}

double yamabe_eigen(const Signature& sig, int a, int b) {
    return yamabe_sphere_eigen(sig.p, a) - yamabe_sphere_eigen(sig.q, b);
}

double ktype_weight(const Signature& sig, int a) {
    return a + (sig.p - 2) / 2.0;
}

CompactFunction compact_sample(const Signature& sig, int eps, int order_x,
                               int order_y,
                               const std::function<Cplx(const Vec&)>& fn) {
    if (eps != 1 && eps != -1)
        throw std::invalid_argument("compact_sample: parity must be +-1");
    CompactFunction F;
    F.sig = sig;
    F.eps = eps;
    F.rx = SphereRule::create(sig.p - 1, order_x);
    F.ry = SphereRule::create(sig.q - 1, order_y);
    const long np = F.rx.nodes.rows(), nq = F.ry.nodes.rows();
    F.samples.resize(np, nq);
    Vec u(sig.n + 2);
    for (long i = 0; i < np; ++i)
        for (long j = 0; j < nq; ++j) {
            u.head(sig.p) = F.rx.nodes.row(i).transpose();
            u.tail(sig.q) = F.ry.nodes.row(j).transpose();
            F.samples(i, j) = fn(u);
        }
    // parity spot check against the antipode
    double scale = std::max(F.samples.cwiseAbs().maxCoeff(), 1e-30);
    const long nc = std::min<long>(12, std::min(np, nq));
    for (long k = 0; k < nc; ++k) {
        u.head(sig.p) = F.rx.nodes.row(k % np).transpose();
        u.tail(sig.q) = F.ry.nodes.row((k * 7 + 3) % nq).transpose();
        Cplx diff = fn(-u) - static_cast<double>(eps) * fn(u);
        if (std::abs(diff) > 1e-10 * scale)
            throw std::domain_error("compact_sample: parity invariant fails");
    }
    F.eval = fn;
    return F;
}

Cplx l2m_inner(const CompactFunction& F, const CompactFunction& G) {
    if (F.samples.rows() != G.samples.rows() ||
        F.samples.cols() != G.samples.cols())
        throw std::invalid_argument("l2m_inner: grid mismatch");
    std::vector<Cplx> terms;
    terms.reserve(F.samples.size());
    for (long i = 0; i < F.samples.rows(); ++i)
        for (long j = 0; j < F.samples.cols(); ++j)
            terms.push_back(F.rx.weights[i] * F.ry.weights[j] *
                            F.samples(i, j) * std::conj(G.samples(i, j)));
    return pairwise_sum(terms);
}

double l2m_norm(const CompactFunction& F) {
    return std::sqrt(std::abs(l2m_inner(F, F)));
}

namespace {

// (P_a)_{ij} = Z_a(x_i . x_j) w_j, the degree-a projector on the grid.
Mat grid_projector(const SphereRule& r, int p, int a) {
    const long m = r.nodes.rows();
    Mat P(m, m);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            P(i, j) = zonal_kernel(p, a, r.nodes.row(i).dot(r.nodes.row(j))) *
                      r.weights[j];
    return P;
}

// Kernel vector Z_a(x . x_j) w_j at an off-grid point x.
Vec kernel_vector(const SphereRule& r, int p, int a, const Vec& x) {
    const long m = r.nodes.rows();
    Vec z(m);
    for (long j = 0; j < m; ++j)
        z[j] = zonal_kernel(p, a, x.dot(r.nodes.row(j))) * r.weights[j];
    return z;
}

}  // namespace

CompactFunction project_component(const CompactFunction& F, int a, int b) {
    CompactFunction out;
    out.sig = F.sig;
    out.eps = ((a + b) % 2 == 0) ? 1 : -1;
    out.rx = F.rx;
    out.ry = F.ry;
    Mat Px = grid_projector(F.rx, F.sig.p, a);
    Mat Py = grid_projector(F.ry, F.sig.q, b);
    out.samples = Px * F.samples * Py.transpose();
    const Signature sig = F.sig;
    const SphereRule rx = F.rx, ry = F.ry;
    const CMat S = F.samples;
    out.eval = [sig, rx, ry, S, a, b](const Vec& u) {
        Vec zx = kernel_vector(rx, sig.p, a, u.head(sig.p));
        Vec zy = kernel_vector(ry, sig.q, b, u.tail(sig.q));
        return (zx.transpose() * (S * zy.cast<Cplx>()))(0);
    };
    return out;
}

CompactFunction yamabe_M(const CompactFunction& F) {
    const int ax = F.rx.degree / 2, ay = F.ry.degree / 2;
    const long np = F.samples.rows(), nq = F.samples.cols();
    Mat Kx = Mat::Zero(np, np), Cx = Mat::Zero(np, np);
    for (int a = 0; a <= ax; ++a) {
        Mat P = grid_projector(F.rx, F.sig.p, a);
        Kx += yamabe_sphere_eigen(F.sig.p, a) * P;
        Cx += P;
    }
    Mat Ky = Mat::Zero(nq, nq), Cy = Mat::Zero(nq, nq);
    for (int b = 0; b <= ay; ++b) {
        Mat P = grid_projector(F.ry, F.sig.q, b);
        Ky += yamabe_sphere_eigen(F.sig.q, b) * P;
        Cy += P;
    }
    const double scale = std::max(F.samples.norm(), 1e-30);
    const double res = std::max((Cx * F.samples - F.samples).norm(),
                                (F.samples * Cy.transpose() - F.samples).norm()) /
                       scale;
    if (res > 1e-6)
        throw std::domain_error("yamabe_M: function is not band-limited on "
                                "this grid");
    CompactFunction out;
    out.sig = F.sig;
    out.eps = F.eps;
    out.rx = F.rx;
    out.ry = F.ry;
    out.samples = Kx * F.samples - F.samples * Ky.transpose();
    const Signature sig = F.sig;
    const SphereRule rx = F.rx, ry = F.ry;
    const CMat S = F.samples;
    out.eval = [sig, rx, ry, S, ax, ay](const Vec& u) {
        const Vec x = u.head(sig.p), y = u.tail(sig.q);
        Vec vx = Vec::Zero(S.rows()), cx = Vec::Zero(S.rows());
        for (int a = 0; a <= ax; ++a) {
            Vec z = kernel_vector(rx, sig.p, a, x);
            vx += yamabe_sphere_eigen(sig.p, a) * z;
            cx += z;
        }
        Vec vy = Vec::Zero(S.cols()), cy = Vec::Zero(S.cols());
        for (int b = 0; b <= ay; ++b) {
            Vec z = kernel_vector(ry, sig.q, b, y);
            vy += yamabe_sphere_eigen(sig.q, b) * z;
            cy += z;
        }
        Cplx left = (vx.transpose() * (S * cy.cast<Cplx>()))(0);
        Cplx right = (cx.transpose() * (S * vy.cast<Cplx>()))(0);
        return left - right;
    };
    return out;
}

KTypeExpansion ktype_expand(const CompactFunction& F, int a_max) {
    KTypeExpansion E;
    E.sig = F.sig;
    E.a_max = a_max;
    E.rx = F.rx;
    E.ry = F.ry;
    const int shift = (F.sig.p - F.sig.q) / 2;  // b = a + shift
    const double total = l2m_inner(F, F).real();
    double captured = 0.0;
    for (int a = std::max(0, -shift); a <= a_max; ++a) {
        const int b = a + shift;
        CompactFunction comp = project_component(F, a, b);
        E.a_deg.push_back(a);
        E.b_deg.push_back(b);
        double n2 = l2m_inner(comp, comp).real();
        E.norm2.push_back(n2);
        E.comps.push_back(comp.samples);
        captured += n2;
    }
    E.residual = total > 1e-300
                     ? std::sqrt(std::max(0.0, 1.0 - captured / total))
                     : 0.0;
    return E;
}

Cplx inner_M(const KTypeExpansion& E1, const KTypeExpansion& E2) {
    if (E1.sig.p != E2.sig.p || E1.sig.q != E2.sig.q ||
        E1.a_max != E2.a_max || E1.comps.size() != E2.comps.size())
        throw std::invalid_argument("inner_M: mismatched expansions");
    Cplx out(0.0, 0.0);
    for (size_t k = 0; k < E1.comps.size(); ++k) {
        if (E1.a_deg[k] < 0 || E1.b_deg[k] < 0)
            throw std::invalid_argument("inner_M: inadmissible index");
        if (E1.comps[k].rows() != E2.comps[k].rows() ||
            E1.comps[k].cols() != E2.comps[k].cols())
            throw std::invalid_argument("inner_M: grid mismatch");
        std::vector<Cplx> terms;
        terms.reserve(E1.comps[k].size());
        for (long i = 0; i < E1.comps[k].rows(); ++i)
            for (long j = 0; j < E1.comps[k].cols(); ++j)
                terms.push_back(E1.rx.weights[i] * E1.ry.weights[j] *
                                E1.comps[k](i, j) *
                                std::conj(E2.comps[k](i, j)));
        out += ktype_weight(E1.sig, E1.a_deg[k]) * pairwise_sum(terms);
    }
    return out;
}

void write_ktype_csv(std::ostream& os, const KTypeExpansion& E) {
    os << "a,b,norm2\n";
    for (size_t k = 0; k < E.comps.size(); ++k)
        os << E.a_deg[k] << "," << E.b_deg[k] << "," << E.norm2[k] << "\n";
}

ZonalExpansion zonal_expand(const BiZonalFunction& F, int ax_max, int ay_max,
                            int n_nodes) {
    const int p = F.sig.p, q = F.sig.q;
    Quad1D gs = gauss_gegenbauer(n_nodes, (p - 3) / 2.0);
    Quad1D gt = gauss_gegenbauer(n_nodes, (q - 3) / 2.0);
    const double volp = sphere_volume(p - 2), volq = sphere_volume(q - 2);
    CMat vals(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        for (int j = 0; j < n_nodes; ++j)
            vals(i, j) = F.eval(gs.nodes[i], gt.nodes[j]);
    Mat ya(ax_max + 1, n_nodes), yb(ay_max + 1, n_nodes);
    for (int a = 0; a <= ax_max; ++a) {
        const double nrm = std::sqrt(zonal_norm2(p, a));
        for (int i = 0; i < n_nodes; ++i)
            ya(a, i) = zonal_poly(p, a, gs.nodes[i]) / nrm;
    }
    for (int b = 0; b <= ay_max; ++b) {
        const double nrm = std::sqrt(zonal_norm2(q, b));
        for (int j = 0; j < n_nodes; ++j)
            yb(b, j) = zonal_poly(q, b, gt.nodes[j]) / nrm;
    }
    CMat weighted = vals;
    for (int i = 0; i < n_nodes; ++i)
        for (int j = 0; j < n_nodes; ++j)
            weighted(i, j) *= gs.weights[i] * gt.weights[j];
    ZonalExpansion E;
    E.sig = F.sig;
    E.ax_max = ax_max;
    E.ay_max = ay_max;
    E.coeffs = volp * volq * (ya.cast<Cplx>() * weighted *
                              yb.cast<Cplx>().transpose());
    std::vector<double> nterms;
    nterms.reserve(static_cast<size_t>(n_nodes) * n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        for (int j = 0; j < n_nodes; ++j)
            nterms.push_back(gs.weights[i] * gt.weights[j] *
                             std::norm(vals(i, j)));
    E.norm2 = volp * volq * pairwise_sum(nterms);
    E.residual =
        E.norm2 > 1e-300
            ? std::sqrt(std::max(0.0,
                                 1.0 - E.coeffs.squaredNorm() / E.norm2))
            : 0.0;
    return E;
}

namespace {

ZonalExpansion zonal_expand_flat_grid(const Signature& sig, double lambda,
                                      int eps, const CMat& fvals,
                                      const Quad1D& rq, int ax_max,
                                      int ay_max) {
    const int p = sig.p, q = sig.q, n = sig.n;
    const long n_r = rq.nodes.size();
    const double volp = sphere_volume(p - 2), volq = sphere_volume(q - 2);
    Vec nrp(ax_max + 1), nrq(ay_max + 1);
    for (int a = 0; a <= ax_max; ++a) nrp[a] = std::sqrt(zonal_norm2(p, a));
    for (int b = 0; b <= ay_max; ++b) nrq[b] = std::sqrt(zonal_norm2(q, b));
    ZonalExpansion E;
    E.sig = sig;
    E.ax_max = ax_max;
    E.ay_max = ay_max;
    E.coeffs = CMat::Zero(ax_max + 1, ay_max + 1);
    std::vector<double> nterms;
    nterms.reserve(static_cast<size_t>(n_r) * n_r);
    Vec z(n);
    for (long i = 0; i < n_r; ++i)
        for (long j = 0; j < n_r; ++j) {
            const double r = rq.nodes[i], rho = rq.nodes[j];
            z.setZero();
            z[0] = r;
            z[n - 1] = rho;
            const double tz = tau(sig, z);
            const double P = r * r - rho * rho;
            const double s = (1.0 - 0.25 * P) / tz;
            const double t = (1.0 + 0.25 * P) / tz;
            const double meas = rq.weights[i] * rq.weights[j] *
                                std::pow(r, p - 2) * std::pow(rho, q - 2);
            const Cplx fv = fvals(i, j);
            const Cplx base = meas * std::pow(tz, lambda - n) * fv;
            for (int a = 0; a <= ax_max; ++a) {
                const double yaa = zonal_poly(p, a, s) / nrp[a];
                for (int b = 0; b <= ay_max; ++b) {
                    if ((a + b) % 2 == 0 ? eps != 1 : eps != -1) continue;
                    E.coeffs(a, b) +=
                        base * yaa * zonal_poly(q, b, t) / nrq[b];
                }
            }
            nterms.push_back(meas * std::pow(tz, 2.0 * lambda - n) *
                             std::norm(fv));
        }
    E.coeffs *= 2.0 * volp * volq;
    E.norm2 = 2.0 * volp * volq * pairwise_sum(nterms);
    E.residual =
        E.norm2 > 1e-300
            ? std::sqrt(std::max(0.0, 1.0 - E.coeffs.squaredNorm() / E.norm2))
            : 0.0;
    return E;
}

}  // namespace

ZonalExpansion zonal_expand_flat(
    const Signature& sig, double lambda, int eps,
    const std::function<Cplx(double, double)>& f_radial, int ax_max,
    int ay_max, int n_r, double rmax) {
    Quad1D rq = mapped(gauss_legendre(n_r), 0.0, rmax);
    CMat fvals(n_r, n_r);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_r; ++j)
            fvals(i, j) = f_radial(rq.nodes[i], rq.nodes[j]);
    return zonal_expand_flat_grid(sig, lambda, eps, fvals, rq, ax_max,
                                  ay_max);
}

ZonalExpansion zonal_expand_flat(const Signature& sig, double lambda, int eps,
                                 const BiRadial& phi,
                                 const InnerNParams& cone_params, int ax_max,
                                 int ay_max, int n_r, double rmax) {
    Quad1D rq = mapped(gauss_legendre(n_r), 0.0, rmax);
    Mat fvals = biradial_synthesis_grid(sig, phi, rq.nodes, rq.nodes,
                                        cone_params);
    return zonal_expand_flat_grid(sig, lambda, eps, fvals.cast<Cplx>(), rq,
                                  ax_max, ay_max);
}

BiZonalFunction yamabe_M(const BiZonalFunction& F, int a_max, int n_nodes) {
    ZonalExpansion E = zonal_expand(F, a_max, a_max, n_nodes);
    if (E.residual > 1e-6)
        throw std::domain_error("yamabe_M: function is not band-limited at "
                                "this truncation");
    const int p = F.sig.p, q = F.sig.q;
    CMat c = E.coeffs;
    Vec nrp(a_max + 1), nrq(a_max + 1);
    for (int a = 0; a <= a_max; ++a) {
        nrp[a] = std::sqrt(zonal_norm2(p, a));
        nrq[a] = std::sqrt(zonal_norm2(q, a));
    }
    for (int a = 0; a <= a_max; ++a)
        for (int b = 0; b <= a_max; ++b)
            c(a, b) *= yamabe_sphere_eigen(p, a) - yamabe_sphere_eigen(q, b);
    BiZonalFunction out;
    out.sig = F.sig;
    out.eps = F.eps;
    out.eval = [p, q, c, a_max, nrp, nrq](double s, double t) {
        Cplx sum(0.0, 0.0);
        for (int a = 0; a <= a_max; ++a) {
            const double yaa = zonal_poly(p, a, s) / nrp[a];
            for (int b = 0; b <= a_max; ++b)
                sum += c(a, b) * yaa * zonal_poly(q, b, t) / nrq[b];
        }
        return sum;
    };
    return out;
}

Cplx inner_M(const ZonalExpansion& E1, const ZonalExpansion& E2) {
    if (E1.sig.p != E2.sig.p || E1.sig.q != E2.sig.q ||
        E1.ax_max != E2.ax_max || E1.ay_max != E2.ay_max)
        throw std::invalid_argument("inner_M: mismatched expansions");
    const int shift = (E1.sig.p - E1.sig.q) / 2;  // b = a + shift
    Cplx out(0.0, 0.0);
    for (int a = std::max(0, -shift); a <= E1.ax_max; ++a) {
        const int b = a + shift;
        if (b > E1.ay_max) break;
        out += ktype_weight(E1.sig, a) * E1.coeffs(a, b) *
               std::conj(E2.coeffs(a, b));
    }
    return out;
}

BiZonalFunction generating_bizonal(const Signature& sig) {
    BiZonalFunction F;
    F.sig = sig;
    const double eps = constants(sig).eps_sign;
    F.eps = eps > 0 ? 1 : -1;
    if (sig.p >= sig.q) {
        Vec u = Vec::Zero(sig.n + 2);
        F.eval = [sig, eps, u](double, double t) mutable {
            u[0] = 1.0;
            u[sig.p] = std::sqrt(std::max(0.0, 1.0 - t * t));
            u[sig.n + 1] = t;
            double corr = eps < 0 ? (t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)) : 1.0;
            return Cplx(corr * generating_F0(sig, u), 0.0);
        };
    } else {
        // mirrored construction: zonal on the first sphere
        const Signature sw = Signature::create(sig.q, sig.p);
        Vec u = Vec::Zero(sig.n + 2);
        F.eval = [sw, sig, eps, u](double s, double) mutable {
            u[0] = 1.0;
            u[sw.p] = std::sqrt(std::max(0.0, 1.0 - s * s));
            u[sw.n + 1] = s;
            double corr = eps < 0 ? (s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0)) : 1.0;
            return Cplx(corr * generating_F0(sw, u), 0.0);
        };
    }
    return F;
}

std::function<Cplx(const Vec&)> twisted_pullback(
    const Signature& sig, double lambda,
    const std::function<Cplx(const Vec&)>& F) {
    return [sig, lambda, F](const Vec& z) {
        return std::pow(tau(sig, z), -lambda) * F(psi_map(sig, z));
    };
}

std::function<Cplx(const Vec&)> twisted_pullback_inv(
    const Signature& sig, double lambda, int eps,
    const std::function<Cplx(const Vec&)>& f) {
    return [sig, lambda, eps, f](const Vec& u) {
        const double m = mu(u);
        if (m == 0.0)
            throw std::domain_error("twisted_pullback_inv: equator point");
        Cplx val;
        if (m > 0.0)
            val = std::pow(m, -lambda) * f(psi_inv(sig, u));
        else
            val = static_cast<double>(eps) * std::pow(-m, -lambda) *
                  f(psi_inv(sig, Vec(-u)));
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
            throw std::domain_error("twisted_pullback_inv: non-finite value");
        return val;
    };
}

BiZonalFunction bizonal_pullback_inv(
    const Signature& sig, double lambda, int eps,
    const std::function<Cplx(double, double)>& f_radial) {
    BiZonalFunction F;
    F.sig = sig;
    F.eps = eps;
    F.eval = [sig, lambda, eps, f_radial](double s, double t) {
        const double m = 0.5 * (s + t);
        if (m == 0.0)
            throw std::domain_error("bizonal_pullback_inv: equator point");
        const double am = std::abs(m);
        const double rp = std::sqrt(std::max(0.0, 1.0 - s * s)) / am;
        const double rq = std::sqrt(std::max(0.0, 1.0 - t * t)) / am;
        Cplx val = std::pow(am, -lambda) * f_radial(rp, rq);
        if (m < 0.0) val *= static_cast<double>(eps);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
            throw std::domain_error("bizonal_pullback_inv: non-finite value");
        return val;
    };
    return F;
}

ZonalExpansion pullback_expansion(const Signature& sig, double lambda,
                                  int eps, const BiRadial& phi,
                                  const CrossNormParams& params) {
    const int p = sig.p, q = sig.q;
    const int nx = params.n_x;
    Quad1D gs = gauss_gegenbauer(nx, (p - 3) / 2.0);
    // offset the second axis so no product node lands near the equator
    Quad1D gt;
    int ny = 0;
    double best = -1.0;
    for (int off : {3, 5, 7, 9, 11}) {
        Quad1D cand = gauss_gegenbauer(nx + off, (q - 3) / 2.0);
        double mu_min = 2.0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx + off; ++j)
                mu_min = std::min(
                    mu_min, 0.5 * std::abs(gs.nodes[i] + cand.nodes[j]));
        if (mu_min > best) {
            best = mu_min;
            gt = cand;
            ny = nx + off;
        }
    }
    if (best < 1e-8)
        throw std::domain_error("pullback_expansion: equator collision");
    BiRadialSynthesisData data = biradial_synthesis_data(sig, phi,
                                                         params.cone);
    const long ns = data.s_nodes.size();
    CMat fvals(nx, ny);
    std::vector<double> terms(ns);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double s = gs.nodes[i], t = gt.nodes[j];
            const double mu = 0.5 * (s + t);
            const double am = std::abs(mu);
            const double r = std::sqrt(std::max(0.0, 1.0 - s * s)) / am;
            const double rho = std::sqrt(std::max(0.0, 1.0 - t * t)) / am;
            double f;
            if (std::max(r, rho) <= params.r_switch) {
                for (long k = 0; k < ns; ++k)
                    terms[k] = data.c[k] *
                               sphere_plane_wave(p - 1, data.s_nodes[k] * r) *
                               sphere_plane_wave(q - 1,
                                                 data.s_nodes[k] * rho);
                f = pairwise_sum(terms);
            } else {
                for (long k = 0; k < ns; ++k) {
                    const double sk = data.s_nodes[k];
                    const Cplx env =
                        sphere_plane_wave_envelope(p - 1, sk * r) *
                        std::conj(sphere_plane_wave_envelope(q - 1,
                                                             sk * rho)) *
                        std::polar(1.0, sk * (r - rho));
                    terms[k] = 0.5 * data.c[k] * env.real();
                }
                f = pairwise_sum(terms);
            }
            fvals(i, j) = std::pow(am, -lambda) * f *
                          (mu < 0.0 ? static_cast<double>(eps) : 1.0);
        }
    const int ax_max = params.a_max;
    const int ay_max = std::max(0, params.a_max + (p - q) / 2);
    const double volp = sphere_volume(p - 2), volq = sphere_volume(q - 2);
    Mat ya(ax_max + 1, nx), yb(ay_max + 1, ny);
    for (int a = 0; a <= ax_max; ++a) {
        const double nrm = std::sqrt(zonal_norm2(p, a));
        for (int i = 0; i < nx; ++i)
            ya(a, i) = zonal_poly(p, a, gs.nodes[i]) / nrm;
    }
    for (int b = 0; b <= ay_max; ++b) {
        const double nrm = std::sqrt(zonal_norm2(q, b));
        for (int j = 0; j < ny; ++j)
            yb(b, j) = zonal_poly(q, b, gt.nodes[j]) / nrm;
    }
    CMat weighted = fvals;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            weighted(i, j) *= gs.weights[i] * gt.weights[j];
    ZonalExpansion E;
    E.sig = sig;
    E.ax_max = ax_max;
    E.ay_max = ay_max;
    E.coeffs = volp * volq *
               (ya.cast<Cplx>() * weighted * yb.cast<Cplx>().transpose());
    std::vector<double> nterms;
    nterms.reserve(static_cast<size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            nterms.push_back(gs.weights[i] * gt.weights[j] *
                             std::norm(fvals(i, j)));
    E.norm2 = volp * volq * pairwise_sum(nterms);
    E.residual =
        E.norm2 > 1e-300
            ? std::sqrt(std::max(0.0, 1.0 - E.coeffs.squaredNorm() / E.norm2))
            : 0.0;
    return E;
}

std::function<Cplx(const Vec&)> compact_action(
    const Signature& sig, double lambda, const GroupElement& g,
    const std::function<Cplx(const Vec&)>& F) {
    const Mat gi = g.mat.inverse();
    return [sig, lambda, gi, F](const Vec& v) {
        const Vec w = gi * v;
        const double nv = nu_plus(sig, w);
        if (nv < 1e-14)
            throw std::domain_error("compact_action: degenerate point");
        return std::pow(nv, -lambda) * F(Vec(w / nv));
    };
}

double kernel_psi(double nu, int eps, double y) {
    if (y == 0.0) throw std::domain_error("kernel_psi: y = 0");
    if (eps != 1 && eps != -1)
        throw std::invalid_argument("kernel_psi: parity must be +-1");
    const double arg = (2.0 * nu + 3.0 - eps) / 4.0;
    if (near_nonpos_int(arg)) return 0.0;  // Gamma pole
    const double chi = eps == 1 ? 1.0 : (y > 0 ? 1.0 : -1.0);
    return std::pow(std::abs(y), nu) * chi / gamma_fn(arg);
}

Cplx kernel_h(const Signature& sig, double y) {
    if (y == 0.0) throw std::domain_error("kernel_h: y = 0");
    const double nu = 1.0 - sig.n / 2.0;
    const Cplx front = std::exp(Cplx(0.0, M_PI * (sig.q - 1) / 2.0));
    if (y > 0.0) return front * std::pow(y, nu);
    return front * std::pow(-y, nu) * std::exp(Cplx(0.0, M_PI * nu));
}

Cplx kernel_psi_critical(const Signature& sig, double y) {
    const Constants c = constants(sig);
    const double g = gamma_fn((sig.n - 1.0 + c.eps_sign) / 4.0);
    const Cplx h = kernel_h(sig, y);
    return c.delta * g / Cplx(0.0, 2.0 * M_PI) * (h - std::conj(h));
}

KnappSteinResult knapp_stein_pair(const Signature& sig, const BiRadial& phi1,
                                  const BiRadial& phi2,
                                  const InnerNParams& params) {
    const InnerNResult r = inner_N(sig, phi1, phi2, params);
    const Constants c = constants(sig);
    KnappSteinResult out;
    out.a_form = 4.0 * c.delta * c.c2 * r.position;
    out.n_form = r.cone;
    out.ratio = std::abs(out.a_form) > 1e-300 ? out.n_form / out.a_form
                                              : Cplx(0.0, 0.0);
    return out;
}

}  // namespace minrep
