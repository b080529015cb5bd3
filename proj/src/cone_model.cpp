#include "minrep/cone_model.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace minrep {

Cplx l2c_inner(const ConeRule& rule, const ConeFunction& f,
               const ConeFunction& g, double* err, double diverge_tol) {
    ConeIntegrand prod = [&](double s, const Vec& w, const Vec& wp) {
        return std::conj(f.eval(s, w, wp)) * g.eval(s, w, wp);
    };
    RefinedValue rv = cone_integrate_refined(rule, prod);
    if (err) *err = rv.error;
    double scale = std::max(std::abs(rv.value), 1e-30);
    if (rv.error > diverge_tol * scale && rv.error > 1e-14)
        throw std::runtime_error(
            "l2c_inner: node-doubling disagreement (divergent or "
            "under-resolved integrand)");
    return rv.value;
}

PmaxElement PmaxElement::dilation(double t) {
    PmaxElement e;
    e.kind = Kind::Dilation;
    e.t = t;
    return e;
}

PmaxElement PmaxElement::composition(const Mat& m) {
    PmaxElement e;
    e.kind = Kind::Composition;
    e.m = m;
    return e;
}

PmaxElement PmaxElement::center_sign() {
    PmaxElement e;
    e.kind = Kind::CenterSign;
    return e;
}

PmaxElement PmaxElement::phase(const Vec& a) {
    PmaxElement e;
    e.kind = Kind::Phase;
    e.a = a;
    return e;
}

ConeFunction pmax_action(const Signature& sig, const PmaxElement& elem,
                         const ConeFunction& psi) {
    const int n = sig.n;
    ConeFunction out;
    out.label = psi.label;
    switch (elem.kind) {
        case PmaxElement::Kind::Dilation: {
            double t = elem.t;
            double c = std::exp(-(n - 2.0) * t / 2.0);
            auto base = psi.eval;
            out.eval = [c, t, base](double s, const Vec& w, const Vec& wp) {
                return c * base(std::exp(-t) * s, w, wp);
            };
            return out;
        }
        case PmaxElement::Kind::Composition: {
            if (elem.m.rows() != n || elem.m.cols() != n)
                throw std::invalid_argument("pmax_action: matrix size");
            Mat eps = sig.eps.asDiagonal();
            if ((elem.m.transpose() * eps * elem.m - eps).norm() > 1e-10)
                throw std::invalid_argument(
                    "pmax_action: matrix does not preserve the dual form");
            Mat mt = elem.m.transpose();
            int pm = sig.p - 1, qm = sig.q - 1;
            auto base = psi.eval;
            out.eval = [mt, pm, qm, base](double s, const Vec& w,
                                          const Vec& wp) {
                Vec zeta(pm + qm);
                zeta.head(pm) = s * w;
                zeta.tail(qm) = s * wp;
                Vec v = mt * zeta;
                double sp = v.head(pm).norm();
                if (sp == 0.0) return Cplx(0, 0);
                return base(sp, v.head(pm) / sp, v.tail(qm) / sp);
            };
            return out;
        }
        case PmaxElement::Kind::CenterSign: {
            double sgn = ((sig.p - sig.q) / 2) % 2 == 0 ? 1.0 : -1.0;
            auto base = psi.eval;
            out.eval = [sgn, base](double s, const Vec& w, const Vec& wp) {
                return sgn * base(s, w, wp);
            };
            return out;
        }
        case PmaxElement::Kind::Phase: {
            if (elem.a.size() != n)
                throw std::invalid_argument("pmax_action: phase vector size");
            Vec ap = elem.a.head(sig.p - 1), aq = elem.a.tail(sig.q - 1);
            auto base = psi.eval;
            out.eval = [ap, aq, base](double s, const Vec& w, const Vec& wp) {
                double dot = s * (ap.dot(w) + aq.dot(wp));
                return std::exp(Cplx(0.0, 2.0 * dot)) * base(s, w, wp);
            };
            return out;
        }
    }
    throw std::invalid_argument("pmax_action: unsupported element class");
}

PolyPlaneWave PolyPlaneWave::monomial(int n, const std::vector<int>& alpha,
                                      Cplx coeff, const Vec& b) {
    if (static_cast<int>(alpha.size()) != n || b.size() != n)
        throw std::invalid_argument("PolyPlaneWave: dimension mismatch");
    PolyPlaneWave f;
    f.n = n;
    f.b = b;
    if (coeff != Cplx(0, 0)) f.terms[alpha] = coeff;
    return f;
}

PolyPlaneWave PolyPlaneWave::constant(int n, Cplx coeff) {
    return monomial(n, std::vector<int>(n, 0), coeff, Vec::Zero(n));
}

PolyPlaneWave PolyPlaneWave::dz(int j) const {
    PolyPlaneWave out;
    out.n = n;
    out.b = b;
    for (const auto& [alpha, c] : terms) {
        if (alpha[j] > 0) {
            auto beta = alpha;
            beta[j] -= 1;
            out.terms[beta] += c * static_cast<double>(alpha[j]);
        }
        if (b[j] != 0.0) out.terms[alpha] += c * Cplx(0.0, b[j]);
    }
    return out;
}

PolyPlaneWave PolyPlaneWave::mul(int j) const {
    PolyPlaneWave out;
    out.n = n;
    out.b = b;
    for (const auto& [alpha, c] : terms) {
        auto beta = alpha;
        beta[j] += 1;
        out.terms[beta] += c;
    }
    return out;
}

PolyPlaneWave PolyPlaneWave::euler() const {
    PolyPlaneWave out;
    out.n = n;
    out.b = b;
    for (int j = 0; j < n; ++j) {
        PolyPlaneWave t = dz(j).mul(j);
        for (const auto& [alpha, c] : t.terms) out.terms[alpha] += c;
    }
    return out;
}

PolyPlaneWave PolyPlaneWave::box(const Signature& sig) const {
    if (sig.n != n) throw std::invalid_argument("box: signature mismatch");
    PolyPlaneWave out;
    out.n = n;
    out.b = b;
    for (int j = 0; j < n; ++j) {
        PolyPlaneWave t = dz(j).dz(j);
        for (const auto& [alpha, c] : t.terms)
            out.terms[alpha] += sig.sign(j) * c;
    }
    return out;
}

PolyPlaneWave PolyPlaneWave::scaled(Cplx c) const {
    PolyPlaneWave out = *this;
    for (auto& [alpha, v] : out.terms) v *= c;
    return out;
}

PolyPlaneWave PolyPlaneWave::plus(const PolyPlaneWave& o) const {
    if (o.n != n || (o.b - b).norm() > 0.0)
        throw std::invalid_argument("plus: mismatched frequency");
    PolyPlaneWave out = *this;
    for (const auto& [alpha, c] : o.terms) out.terms[alpha] += c;
    return out;
}

Cplx PolyPlaneWave::eval(const Vec& zeta) const {
    Cplx poly(0, 0);
    for (const auto& [alpha, c] : terms) {
        Cplx t = c;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < alpha[j]; ++k) t *= zeta[j];
        poly += t;
    }
    return poly * std::exp(Cplx(0.0, b.dot(zeta)));
}

double PolyPlaneWave::coeff_norm() const {
    double s = 0.0;
    for (const auto& [alpha, c] : terms) s += std::norm(c);
    return std::sqrt(s);
}

double PolyPlaneWave::distance(const PolyPlaneWave& o) const {
    PolyPlaneWave d = plus(o.scaled(-1.0));
    return d.coeff_norm();
}

void PolyPlaneWave::prune(double tol) {
    for (auto it = terms.begin(); it != terms.end();)
        it = (std::abs(it->second) <= tol) ? terms.erase(it) : std::next(it);
}

std::vector<LieAlgebraElement> dpi_hat_basis(const Signature& sig) {
    std::vector<LieAlgebraElement> basis;
    for (int j = 1; j <= sig.n; ++j) basis.push_back(nbar_generator(sig, j));
    for (int j = 1; j <= sig.n; ++j) basis.push_back(n_generator(sig, j));
    basis.push_back(e_generator(sig));
    for (int j = 1; j <= sig.n; ++j)
        for (int k = j + 1; k <= sig.n; ++k)
            basis.push_back(mmax_generator(sig, j, k));
    return basis;
}

namespace {

// Nbar_j: 2 i zeta_j   (j 0-based)
PolyPlaneWave op_nbar(const PolyPlaneWave& f, int j) {
    return f.mul(j).scaled(Cplx(0, 2));
}

// N_j: i ((lambda-n) eps_j d_j - E eps_j d_j + 1/2 zeta_j box)
PolyPlaneWave op_n(const Signature& sig, double lambda,
                   const PolyPlaneWave& f, int j) {
    double e = sig.sign(j);
    PolyPlaneWave d = f.dz(j);
    PolyPlaneWave out = d.scaled((lambda - sig.n) * e);
    out = out.plus(d.euler().scaled(-e));
    out = out.plus(f.box(sig).mul(j).scaled(0.5));
    return out.scaled(Cplx(0, 1));
}

// E: lambda - n - E_zeta
PolyPlaneWave op_e(const Signature& sig, double lambda,
                   const PolyPlaneWave& f) {
    return f.scaled(lambda - sig.n).plus(f.euler().scaled(-1.0));
}

// m^max middle block B: sum_{jk} B_{jk} zeta_j d_k
PolyPlaneWave op_mmax(const PolyPlaneWave& f, const Mat& B) {
    int n = f.n;
    PolyPlaneWave out = f.scaled(0.0);
    for (int k = 0; k < n; ++k) {
        PolyPlaneWave dk = f.dz(k);
        for (int j = 0; j < n; ++j)
            if (B(j, k) != 0.0) out = out.plus(dk.mul(j).scaled(B(j, k)));
    }
    return out;
}

}  // namespace

PolyPlaneWave dpi_hat(const Signature& sig, double lambda,
                      const LieAlgebraElement& X, const PolyPlaneWave& f) {
    auto basis = dpi_hat_basis(sig);
    double residual = 0.0;
    Vec coeff = expand_in_basis(sig, basis, X.mat, &residual);
    if (residual > 1e-10 * std::max(1.0, X.mat.norm()))
        throw std::invalid_argument(
            "dpi_hat: element outside span{Nbar, N, E} + m^max");
    const int n = sig.n;
    PolyPlaneWave out = f.scaled(0.0);
    for (int j = 0; j < n; ++j)
        if (coeff[j] != 0.0)
            out = out.plus(op_nbar(f, j).scaled(coeff[j]));
    for (int j = 0; j < n; ++j)
        if (coeff[n + j] != 0.0)
            out = out.plus(op_n(sig, lambda, f, j).scaled(coeff[n + j]));
    if (coeff[2 * n] != 0.0)
        out = out.plus(op_e(sig, lambda, f).scaled(coeff[2 * n]));
    int idx = 2 * n + 1;
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k, ++idx)
            if (coeff[idx] != 0.0) {
                Mat B = basis[idx].mat.block(1, 1, n, n);
                out = out.plus(op_mmax(f, B).scaled(coeff[idx]));
            }
    out.prune();
    return out;
}

double fourier_duality_check(const Signature& sig, double lambda,
                             DualityGen gen, int j, const PolyPlaneWave& f) {
    const int n = sig.n;
    // dictionary images of the flat-side building blocks
    auto dict_z = [&](const PolyPlaneWave& g, int a) {  // z_a -> -i d_a
        return g.dz(a).scaled(Cplx(0, -1));
    };
    auto dict_dz = [&](const PolyPlaneWave& g, int a) {  // d/dz_a -> -i zeta_a
        return g.mul(a).scaled(Cplx(0, -1));
    };
    auto dict_eulerz = [&](const PolyPlaneWave& g) {  // E_z -> -n - E_zeta
        return g.scaled(-static_cast<double>(n)).plus(g.euler().scaled(-1.0));
    };
    auto dict_p = [&](const PolyPlaneWave& g) {  // P(z) -> -box
        return g.box(sig).scaled(-1.0);
    };
    PolyPlaneWave via_dict = f.scaled(0.0);
    PolyPlaneWave direct = f.scaled(0.0);
    int a = j - 1;
    switch (gen) {
        case DualityGen::Nbar:
            // flat side: -2 d/dz_j
            via_dict = dict_dz(f, a).scaled(-2.0);
            direct = op_nbar(f, a);
            break;
        case DualityGen::N: {
            // flat side: -lambda eps_j z_j - eps_j z_j E_z + 1/2 P d/dz_j
            double e = sig.sign(a);
            via_dict = dict_z(f, a).scaled(-lambda * e);
            via_dict = via_dict.plus(dict_z(dict_eulerz(f), a).scaled(-e));
            via_dict = via_dict.plus(dict_p(dict_dz(f, a)).scaled(0.5));
            direct = op_n(sig, lambda, f, a);
            break;
        }
        case DualityGen::E:
            // flat side: lambda + E_z
            via_dict = f.scaled(lambda).plus(dict_eulerz(f));
            direct = op_e(sig, lambda, f);
            break;
    }
    return via_dict.distance(direct);
}

ConeFunction psi_bm(const Signature& sig, const Vec& b, const Mat& m) {
    const int n = sig.n;
    if (b.size() != n || m.rows() != n || m.cols() != n)
        throw std::invalid_argument("psi_bm: dimension mismatch");
    Mat eps = sig.eps.asDiagonal();
    if ((m.transpose() * eps * m - eps).norm() > 1e-10)
        throw std::invalid_argument("psi_bm: m does not preserve the dual form");
    int pm = sig.p - 1, qm = sig.q - 1;
    double nu = (sig.q - 3.0) / 2.0;
    Vec bp = b.head(pm), bq = b.tail(qm);
    Mat mm = m;
    ConeFunction out;
    std::ostringstream lbl;
    lbl << "psi_bm";
    out.label = lbl.str();
    out.eval = [pm, qm, nu, bp, bq, mm](double s, const Vec& w,
                                        const Vec& wp) {
        Vec zeta(pm + qm);
        zeta.head(pm) = s * w;
        zeta.tail(qm) = s * wp;
        Vec v = mm * zeta;
        double r = v.head(pm).norm();  // radial coordinate of the cone point
        if (r <= 0.0) return Cplx(0, 0);
        double phase = bp.dot(zeta.head(pm)) + bq.dot(zeta.tail(qm));
        return std::exp(Cplx(0.0, phase)) *
               std::pow(r, -nu) * bessel_k(nu, 2.0 * r);
    };
    return out;
}

void write_cone_samples_csv(std::ostream& os, const ConeRule& rule,
                            const ConeFunction& f) {
    os << "s,i,j,re,im\n";
    for (int ir = 0; ir < rule.radial.nodes.size(); ++ir) {
        double s = rule.radial.nodes[ir];
        for (long i = 0; i < rule.sp.nodes.rows(); ++i) {
            Vec w = rule.sp.nodes.row(i);
            for (long jq = 0; jq < rule.sq.nodes.rows(); ++jq) {
                Vec wp = rule.sq.nodes.row(jq);
                Cplx v = f.eval(s, w, wp);
                os << s << ',' << i << ',' << jq << ',' << v.real() << ','
                   << v.imag() << '\n';
            }
        }
    }
}

}  // namespace minrep
