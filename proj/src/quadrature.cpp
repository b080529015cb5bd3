#include "minrep/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace minrep {

namespace {

template <typename T>
T pairwise_sum_span(const T* data, std::size_t count) {
    if (count <= 8) {
        T s{};
        for (std::size_t i = 0; i < count; ++i) s += data[i];
        return s;
    }
    std::size_t half = count / 2;
    return pairwise_sum_span(data, half) +
           pairwise_sum_span(data + half, count - half);
}

}  // namespace

Cplx pairwise_sum(std::vector<Cplx>& terms) {
    return pairwise_sum_span(terms.data(), terms.size());
}

double pairwise_sum(std::vector<double>& terms) {
    return pairwise_sum_span(terms.data(), terms.size());
}

namespace {

// Newton iteration on the Legendre recurrence; the dense Golub-Welsch
// eigensolver is cubic in n, which matters for the large radial rules.
Quad1D gauss_legendre_newton(int n) {
    Quad1D q;
    q.nodes = Vec(n);
    q.weights = Vec(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.nodes[n - 1 - i] = x;
        q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

}  // namespace

Quad1D gauss_gegenbauer(int n, double lam) {
    if (n < 1) throw std::invalid_argument("gauss_gegenbauer: n < 1");
    if (lam <= -1.0)
        throw std::invalid_argument("gauss_gegenbauer: lam <= -1");
    if (lam == 0.0 && n > 64) return gauss_legendre_newton(n);
    // Golub-Welsch: the weight is symmetric so the Jacobi matrix has zero
    // diagonal and off-diagonal b_k = sqrt(k (k + 2 lam) / (4 (k+lam)^2 - 1)).
    Mat J = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double kk = k;
        // k = 1, lam = -1/2 is 0/0 in the general formula; the Chebyshev
        // limit is 1/2
        double ratio = (k == 1 && lam == -0.5)
                           ? 0.5
                           : kk * (kk + 2.0 * lam) /
                                 (4.0 * (kk + lam) * (kk + lam) - 1.0);
        double b = std::sqrt(ratio);
        J(k - 1, k) = b;
        J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    double mu0 = std::sqrt(M_PI) * gamma_fn(lam + 1.0) / gamma_fn(lam + 1.5);
    Quad1D q;
    q.nodes = es.eigenvalues();
    q.weights = Vec(n);
    for (int i = 0; i < n; ++i) {
        double v = es.eigenvectors()(0, i);
        q.weights[i] = mu0 * v * v;
    }
    return q;
}

Quad1D gauss_legendre(int n) { return gauss_gegenbauer(n, 0.0); }

Quad1D mapped(const Quad1D& q, double a, double b) {
    Quad1D r;
    r.nodes = 0.5 * (b - a) * q.nodes.array() + 0.5 * (a + b);
    r.weights = 0.5 * (b - a) * q.weights;
    return r;
}

Quad1D radial_log_rule(double smin, double smax, int n) {
    if (!(0.0 < smin && smin < smax))
        throw std::invalid_argument("radial_log_rule: need 0 < smin < smax");
    Quad1D u = mapped(gauss_legendre(n), std::log(smin), std::log(smax));
    Quad1D r;
    r.nodes = u.nodes.array().exp();
    r.weights = u.weights.array() * r.nodes.array();  // ds = s du
    return r;
}

double sphere_volume(int dim) {
    double m = dim + 1.0;
    return 2.0 * std::pow(M_PI, m / 2.0) / gamma_fn(m / 2.0);
}

double sphere_monomial_integral(const std::vector<int>& alpha) {
    double num = 2.0, denom_arg = 0.0;
    for (int a : alpha) {
        if (a % 2 != 0) return 0.0;
        num *= gamma_fn((a + 1.0) / 2.0);
        denom_arg += (a + 1.0) / 2.0;
    }
    return num / gamma_fn(denom_arg);
}

double sphere_plane_wave(int m, double t) {
    if (m < 1) throw std::invalid_argument("sphere_plane_wave: m < 1");
    t = std::abs(t);
    if (t < 1e-6) {
        // series limit: vol(S^{m-1}) (1 - t^2 / (2m) + O(t^4))
        return sphere_volume(m - 1) * (1.0 - t * t / (2.0 * m));
    }
    switch (m) {
        case 1:
            return 2.0 * std::cos(t);
        case 2:
            return 2.0 * M_PI * j0(t);
        case 3:
            return 4.0 * M_PI * std::sin(t) / t;
        case 4:
            return 4.0 * M_PI * M_PI * j1(t) / t;
        case 5: {
            if (t < 1e-2) {
                // series for (sin t - t cos t) / t^3, which cancels badly
                const double t2 = t * t;
                return 8.0 * M_PI * M_PI *
                       (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0);
            }
            return 8.0 * M_PI * M_PI *
                   (std::sin(t) - t * std::cos(t)) / (t * t * t);
        }
        default: {
            double hm = m / 2.0;
            return std::pow(2.0 * M_PI, hm) * std::pow(t, 1.0 - hm) *
                   bessel_j(hm - 1.0, t);
        }
    }
}

Cplx sphere_plane_wave_envelope(int m, double t) {
    if (t <= 0.0)
        throw std::invalid_argument("sphere_plane_wave_envelope: t <= 0");
    const Cplx mexp = std::polar(1.0, -t);
    switch (m) {
        case 1:
            return Cplx(2.0, 0.0);
        case 2:
            return 2.0 * M_PI * Cplx(j0(t), y0(t)) * mexp;
        case 3:
            return Cplx(0.0, -4.0 * M_PI / t);
        case 4:
            return 4.0 * M_PI * M_PI / t * Cplx(j1(t), y1(t)) * mexp;
        case 5:
            return -8.0 * M_PI * M_PI * Cplx(1.0 / (t * t), 1.0 / (t * t * t));
        default:
            throw std::invalid_argument(
                "sphere_plane_wave_envelope: m > 5 not implemented");
    }
}

SphereRule SphereRule::create(int dim, int order) {
    if (dim < 0) throw std::invalid_argument("SphereRule: dim < 0");
    if (order < 1) throw std::invalid_argument("SphereRule: order < 1");
    SphereRule r;
    r.dim = dim;
    if (dim == 0) {
        r.nodes = Mat(2, 1);
        r.nodes << 1.0, -1.0;
        r.weights = Vec::Constant(2, 1.0);
        r.degree = 1 << 20;  // exact for every monomial
        return r;
    }
    if (dim == 1) {
        int nphi = 2 * order;
        r.nodes = Mat(nphi, 2);
        r.weights = Vec::Constant(nphi, 2.0 * M_PI / nphi);
        for (int k = 0; k < nphi; ++k) {
            double phi = 2.0 * M_PI * (k + 0.5) / nphi;
            r.nodes(k, 0) = std::cos(phi);
            r.nodes(k, 1) = std::sin(phi);
        }
        r.degree = nphi - 1;
        return r;
    }
    // S^dim = polar angle over S^{dim-1}; cos(theta) weight (1-t^2)^{(dim-2)/2}
    SphereRule sub = create(dim - 1, order);
    Quad1D gj = gauss_gegenbauer(order, (dim - 2.0) / 2.0);
    long count = sub.nodes.rows() * order;
    r.nodes = Mat(count, dim + 1);
    r.weights = Vec(count);
    long idx = 0;
    for (int it = 0; it < order; ++it) {
        double t = gj.nodes[it];
        double st = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (long is = 0; is < sub.nodes.rows(); ++is) {
            r.nodes.row(idx).head(dim) = st * sub.nodes.row(is);
            r.nodes(idx, dim) = t;
            r.weights[idx] = gj.weights[it] * sub.weights[is];
            ++idx;
        }
    }
    r.degree = std::min(2 * order - 1, sub.degree);
    return r;
}

ConeRule ConeRule::create(const Signature& sig, int nr, int order, double smin,
                          double smax) {
    ConeRule r;
    r.sig = sig;
    r.nr = nr;
    r.order = order;
    r.smin = smin;
    r.smax = smax;
    r.radial = radial_log_rule(smin, smax, nr);
    r.sp = SphereRule::create(sig.p - 2, order);
    r.sq = SphereRule::create(sig.q - 2, order);
    return r;
}

ConeRule ConeRule::doubled() const {
    return create(sig, 2 * nr, 2 * order, smin, smax);
}

Cplx cone_integrate(const ConeRule& rule, const ConeIntegrand& f) {
    std::vector<Cplx> terms;
    terms.reserve(rule.radial.nodes.size() * rule.sp.nodes.rows() *
                  rule.sq.nodes.rows());
    for (int ir = 0; ir < rule.radial.nodes.size(); ++ir) {
        double s = rule.radial.nodes[ir];
        double wr = rule.radial.weights[ir] * std::pow(s, rule.sig.n - 3);
        for (long i = 0; i < rule.sp.nodes.rows(); ++i) {
            Vec w = rule.sp.nodes.row(i);
            double wi = rule.sp.weights[i];
            for (long j = 0; j < rule.sq.nodes.rows(); ++j) {
                Vec wp = rule.sq.nodes.row(j);
                Cplx v = f(s, w, wp);
                if (std::isnan(v.real()) || std::isnan(v.imag())) {
                    std::ostringstream os;
                    os << "cone_integrate: NaN at s=" << s
                       << ", sphere node " << i << ", sphere' node " << j;
                    throw std::runtime_error(os.str());
                }
                terms.push_back(0.5 * wr * wi * rule.sq.weights[j] * v);
            }
        }
    }
    return pairwise_sum(terms);
}

RefinedValue cone_integrate_refined(const ConeRule& rule,
                                    const ConeIntegrand& f) {
    Cplx coarse = cone_integrate(rule, f);
    Cplx fine = cone_integrate(rule.doubled(), f);
    return {fine, std::abs(fine - coarse)};
}

BoxRule box_rule(const Vec& lo, const Vec& hi, int n_per_axis) {
    if (lo.size() != hi.size())
        throw std::invalid_argument("box_rule: dimension mismatch");
    BoxRule r;
    Quad1D base = gauss_legendre(n_per_axis);
    for (int k = 0; k < lo.size(); ++k)
        r.axes.push_back(mapped(base, lo[k], hi[k]));
    return r;
}

long BoxRule::node_count() const {
    long c = 1;
    for (const auto& a : axes) c *= a.nodes.size();
    return c;
}

Cplx box_integrate(const BoxRule& rule, const BoxIntegrand& f) {
    int k = static_cast<int>(rule.axes.size());
    std::vector<int> idx(k, 0);
    Vec z(k);
    std::vector<Cplx> terms;
    terms.reserve(rule.node_count());
    bool done = (rule.node_count() == 0);
    while (!done) {
        double w = 1.0;
        for (int a = 0; a < k; ++a) {
            z[a] = rule.axes[a].nodes[idx[a]];
            w *= rule.axes[a].weights[idx[a]];
        }
        terms.push_back(w * f(z));
        int a = k - 1;
        while (a >= 0 && ++idx[a] == rule.axes[a].nodes.size()) {
            idx[a] = 0;
            --a;
        }
        done = (a < 0);
    }
    return pairwise_sum(terms);
}

Cplx fourier_quad(const BoxRule& rule, const BoxIntegrand& phi,
                  const Vec& zeta, double sign) {
    return box_integrate(rule, [&](const Vec& z) {
        return phi(z) * std::exp(Cplx(0.0, sign * z.dot(zeta)));
    });
}

std::vector<Cplx> fourier_quad_grid(const BoxRule& rule,
                                    const BoxIntegrand& phi,
                                    const std::vector<Vec>& zeta_axes,
                                    double sign) {
    int k = static_cast<int>(rule.axes.size());
    if (static_cast<int>(zeta_axes.size()) != k)
        throw std::invalid_argument("fourier_quad_grid: axis count mismatch");
    // sample phi on the tensor grid (row-major over z indices)
    std::vector<long> dims(k);
    long total = 1;
    for (int a = 0; a < k; ++a) {
        dims[a] = rule.axes[a].nodes.size();
        total *= dims[a];
    }
    std::vector<Cplx> tensor(total);
    {
        std::vector<int> idx(k, 0);
        Vec z(k);
        for (long flat = 0; flat < total; ++flat) {
            for (int a = 0; a < k; ++a) z[a] = rule.axes[a].nodes[idx[a]];
            tensor[flat] = phi(z);
            int a = k - 1;
            while (a >= 0 && ++idx[a] == dims[a]) {
                idx[a] = 0;
                --a;
            }
        }
    }
    // contract the leading axis with E[zeta, z] = w_z e^{i z zeta}, cycling
    // the result axis to the back; after k passes the order is restored
    using CMatR =
        Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (int a = 0; a < k; ++a) {
        long nz = dims[0];
        long nzeta = zeta_axes[a].size();
        CMatR E(nzeta, nz);
        for (long r = 0; r < nzeta; ++r)
            for (long c = 0; c < nz; ++c)
                E(r, c) = rule.axes[a].weights[c] *
                          std::exp(Cplx(0.0, sign * rule.axes[a].nodes[c] *
                                                 zeta_axes[a][r]));
        long rest = total / nz;
        Eigen::Map<CMatR> M(tensor.data(), nz, rest);
        CMatR R = (E * M).transpose();  // shape (rest, nzeta)
        total = rest * nzeta;
        tensor.assign(R.data(), R.data() + total);
        dims.erase(dims.begin());
        dims.push_back(nzeta);
    }
    return tensor;
}

Cplx inverse_synthesis(const ConeRule& rule, const ConeIntegrand& phi,
                       const Vec& z) {
    const Signature& sig = rule.sig;
    Vec zp = z.head(sig.p - 1), zq = z.tail(sig.q - 1);
    Cplx val = cone_integrate(rule, [&](double s, const Vec& w, const Vec& wp) {
        double dot = s * (zp.dot(w) + zq.dot(wp));
        return phi(s, w, wp) * std::exp(Cplx(0.0, -dot));
    });
    return val * std::pow(2.0 * M_PI, -sig.n);
}

}  // namespace minrep
