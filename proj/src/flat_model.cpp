#include "minrep/flat_model.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace minrep {

namespace {

const Cplx kI(0.0, 1.0);

// phi at a full cone point zeta = (s w, s w'); zero at the tip.
Cplx eval_at_zeta(const Signature& sig, const ConeFunction& phi,
                  const Vec& zeta) {
    double s = zeta.head(sig.p - 1).norm();
    if (s < 1e-300) return Cplx(0.0, 0.0);
    Vec w = zeta.head(sig.p - 1) / s;
    Vec wp = zeta.tail(sig.q - 1) / s;
    return phi.eval(s, w, wp);
}

double zeta_coord(const Signature& sig, double s, const Vec& w, const Vec& wp,
                  int j) {
    return (j <= sig.p - 1) ? s * w(j - 1) : s * wp(j - sig.p);
}

}  // namespace

FlatSolution::FlatSolution(const Signature& sig, const ConeRule& rule,
                           const ConeFunction& phi)
    : sig_(sig), rule_(rule), phi_(phi) {
    const int n = sig.n;
    const long nr = rule.radial.nodes.size();
    const long na = rule.sp.nodes.rows();
    const long nb = rule.sq.nodes.rows();
    zeta_.resize(nr * na * nb, n);
    wphi_.resize(nr * na * nb);
    const double pref = 0.5 * std::pow(2.0 * M_PI, -n);
    long row = 0;
    for (long ir = 0; ir < nr; ++ir) {
        const double s = rule.radial.nodes[ir];
        const double ws =
            rule.radial.weights[ir] * std::pow(s, n - 3) * pref;
        for (long ia = 0; ia < na; ++ia) {
            Vec w = rule.sp.nodes.row(ia);
            for (long ib = 0; ib < nb; ++ib, ++row) {
                Vec wp = rule.sq.nodes.row(ib);
                Cplx v = phi.eval(s, w, wp);
                if (std::isnan(v.real()) || std::isnan(v.imag()))
                    throw std::runtime_error(
                        "FlatSolution: NaN cone sample at s = " +
                        std::to_string(s));
                zeta_.row(row).head(sig.p - 1) = (s * w).transpose();
                zeta_.row(row).tail(sig.q - 1) = (s * wp).transpose();
                wphi_[row] =
                    ws * rule.sp.weights[ia] * rule.sq.weights[ib] * v;
            }
        }
    }
}

Cplx FlatSolution::value(const Vec& z) const {
    std::vector<double> key(z.data(), z.data() + z.size());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Vec phase = zeta_ * z;
    std::vector<Cplx> terms(wphi_.size());
    for (size_t k = 0; k < wphi_.size(); ++k)
        terms[k] = wphi_[k] * std::exp(-kI * phase[k]);
    Cplx v = pairwise_sum(terms);
    cache_.emplace(std::move(key), v);
    return v;
}

Cplx FlatSolution::derivative(const Vec& z, int j) const {
    Vec phase = zeta_ * z;
    std::vector<Cplx> terms(wphi_.size());
    for (size_t k = 0; k < wphi_.size(); ++k)
        terms[k] =
            -kI * zeta_(k, j - 1) * wphi_[k] * std::exp(-kI * phase[k]);
    return pairwise_sum(terms);
}

Cplx FlatSolution::box_residual(const Vec& z, double h) const {
    Cplx center = value(z);
    Cplx acc(0.0, 0.0);
    for (int j = 0; j < sig_.n; ++j) {
        Vec zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        acc += sig_.sign(j) * (value(zp) - 2.0 * center + value(zm));
    }
    return acc / (h * h);
}

ConeFunction restrict_fourier(const Signature& sig, const BoxRule& rule,
                              const BoxIntegrand& phi) {
    ConeFunction out;
    out.label = "F phi|_C";
    out.eval = [sig, rule, phi](double s, const Vec& w, const Vec& wp) {
        Vec zeta(sig.n);
        zeta.head(sig.p - 1) = s * w;
        zeta.tail(sig.q - 1) = s * wp;
        return fourier_quad(rule, phi, zeta);
    };
    return out;
}

ConeFunction restrict_fourier_separable(
    const Signature& sig, const BoxRule& rule,
    const std::vector<std::function<Cplx(double)>>& factors) {
    if (static_cast<int>(rule.axes.size()) != sig.n ||
        static_cast<int>(factors.size()) != sig.n)
        throw std::invalid_argument(
            "restrict_fourier_separable: need one axis and factor per "
            "coordinate");
    // pre-sample each factor on its axis
    std::vector<std::vector<Cplx>> samples(sig.n);
    for (int a = 0; a < sig.n; ++a) {
        const auto& ax = rule.axes[a];
        samples[a].resize(ax.nodes.size());
        for (long c = 0; c < ax.nodes.size(); ++c)
            samples[a][c] = ax.weights[c] * factors[a](ax.nodes[c]);
    }
    ConeFunction out;
    out.label = "F phi|_C (separable)";
    out.eval = [sig, rule, samples](double s, const Vec& w, const Vec& wp) {
        Vec zeta(sig.n);
        zeta.head(sig.p - 1) = s * w;
        zeta.tail(sig.q - 1) = s * wp;
        Cplx prod(1.0, 0.0);
        for (int a = 0; a < sig.n; ++a) {
            Cplx acc(0.0, 0.0);
            const auto& ax = rule.axes[a];
            for (long c = 0; c < ax.nodes.size(); ++c)
                acc += samples[a][c] *
                       std::exp(kI * (ax.nodes[c] * zeta[a]));
            prod *= acc;
        }
        return prod;
    };
    return out;
}

FlatSolution s_transform(const Signature& sig, const ConeRule& cone_rule,
                         const BoxRule& box, const BoxIntegrand& phi) {
    return FlatSolution(sig, cone_rule, restrict_fourier(sig, box, phi));
}

FlatSolution s_transform_separable(
    const Signature& sig, const ConeRule& cone_rule, const BoxRule& box,
    const std::vector<std::function<Cplx(double)>>& factors) {
    return FlatSolution(sig, cone_rule,
                        restrict_fourier_separable(sig, box, factors));
}

namespace {

// G_m(s) = int_0^rmax g(r) r^{m-1} spw(m, r s) dr, sampled on s_nodes.
Vec profile_transform(const std::function<double(double)>& g, double rmax,
                      int m, int n_r, const Vec& s_nodes) {
    Quad1D rq = mapped(gauss_legendre(n_r), 0.0, rmax);
    Vec gs(n_r);
    for (int i = 0; i < n_r; ++i)
        gs[i] = rq.weights[i] * g(rq.nodes[i]) *
                std::pow(rq.nodes[i], m - 1);
    Vec out(s_nodes.size());
    for (long a = 0; a < s_nodes.size(); ++a) {
        std::vector<double> terms(n_r);
        for (int i = 0; i < n_r; ++i)
            terms[i] = gs[i] * sphere_plane_wave(m, rq.nodes[i] * s_nodes[a]);
        out[a] = pairwise_sum(terms);
    }
    return out;
}

}  // namespace

ConeFunction biradial_cone_data(const Signature& sig, const BiRadial& phi,
                                const InnerNParams& params) {
    // pre-weighted radial samples; each cone evaluation is one 1-D sum
    Quad1D rq = mapped(gauss_legendre(params.n_r), 0.0, phi.rmax);
    Vec gp(params.n_r), gq(params.n_r);
    for (int i = 0; i < params.n_r; ++i) {
        gp[i] = rq.weights[i] * phi.plus_profile(rq.nodes[i]) *
                std::pow(rq.nodes[i], sig.p - 2);
        gq[i] = rq.weights[i] * phi.minus_profile(rq.nodes[i]) *
                std::pow(rq.nodes[i], sig.q - 2);
    }
    ConeFunction out;
    out.label = "biradial F|_C";
    const int p = sig.p, q = sig.q;
    out.eval = [p, q, rq, gp, gq](double s, const Vec&, const Vec&) {
        double a = 0.0, b = 0.0;
        for (long i = 0; i < rq.nodes.size(); ++i) {
            a += gp[i] * sphere_plane_wave(p - 1, rq.nodes[i] * s);
            b += gq[i] * sphere_plane_wave(q - 1, rq.nodes[i] * s);
        }
        return Cplx(a * b, 0.0);
    };
    return out;
}

BiRadialSynthesisData biradial_synthesis_data(const Signature& sig,
                                              const BiRadial& phi,
                                              const InnerNParams& params) {
    Quad1D srule = radial_log_rule(params.smin, params.smax, params.n_s);
    const long ns = srule.nodes.size();
    Vec gp = profile_transform(phi.plus_profile, phi.rmax, sig.p - 1,
                               params.n_r, srule.nodes);
    Vec gq = profile_transform(phi.minus_profile, phi.rmax, sig.q - 1,
                               params.n_r, srule.nodes);
    const double pref = 0.5 * std::pow(2.0 * M_PI, -sig.n);
    BiRadialSynthesisData out;
    out.s_nodes = srule.nodes;
    out.c.resize(ns);
    for (long a = 0; a < ns; ++a)
        out.c[a] = pref * srule.weights[a] *
                   std::pow(srule.nodes[a], sig.n - 3) * gp[a] * gq[a];
    return out;
}

std::function<Cplx(double, double)> biradial_synthesis(
    const Signature& sig, const BiRadial& phi, const InnerNParams& params) {
    BiRadialSynthesisData data = biradial_synthesis_data(sig, phi, params);
    const int p = sig.p, q = sig.q;
    Vec snodes = data.s_nodes;
    Vec cvec = data.c;
    return [p, q, snodes, cvec](double r, double rho) {
        std::vector<double> terms(snodes.size());
        for (long a = 0; a < snodes.size(); ++a)
            terms[a] = cvec[a] * sphere_plane_wave(p - 1, snodes[a] * r) *
                       sphere_plane_wave(q - 1, snodes[a] * rho);
        return Cplx(pairwise_sum(terms), 0.0);
    };
}

Mat biradial_synthesis_grid(const Signature& sig, const BiRadial& phi,
                            const Vec& r_nodes, const Vec& rho_nodes,
                            const InnerNParams& params) {
    BiRadialSynthesisData data = biradial_synthesis_data(sig, phi, params);
    const long ns = data.s_nodes.size();
    Mat kp(r_nodes.size(), ns), kq(rho_nodes.size(), ns);
    for (long i = 0; i < r_nodes.size(); ++i)
        for (long a = 0; a < ns; ++a)
            kp(i, a) = sphere_plane_wave(sig.p - 1,
                                         r_nodes[i] * data.s_nodes[a]);
    for (long j = 0; j < rho_nodes.size(); ++j)
        for (long a = 0; a < ns; ++a)
            kq(j, a) = sphere_plane_wave(sig.q - 1,
                                         rho_nodes[j] * data.s_nodes[a]);
    return kp * data.c.asDiagonal() * kq.transpose();
}

InnerNResult inner_N(const Signature& sig, const BiRadial& phi1,
                     const BiRadial& phi2, const InnerNParams& params) {
    const int n = sig.n;
    Quad1D srule = radial_log_rule(params.smin, params.smax, params.n_s);
    const long ns = srule.nodes.size();
    Vec g1p = profile_transform(phi1.plus_profile, phi1.rmax, sig.p - 1,
                                params.n_r, srule.nodes);
    Vec g1q = profile_transform(phi1.minus_profile, phi1.rmax, sig.q - 1,
                                params.n_r, srule.nodes);
    Vec g2p = profile_transform(phi2.plus_profile, phi2.rmax, sig.p - 1,
                                params.n_r, srule.nodes);
    Vec g2q = profile_transform(phi2.minus_profile, phi2.rmax, sig.q - 1,
                                params.n_r, srule.nodes);
    const double volp = sphere_volume(sig.p - 2);
    const double volq = sphere_volume(sig.q - 2);
    const double pref = 0.5 * std::pow(2.0 * M_PI, -n);

    // cone side: radial quadrature of the product of profiles
    std::vector<double> cterms(ns);
    for (long a = 0; a < ns; ++a)
        cterms[a] = srule.weights[a] * std::pow(srule.nodes[a], n - 3) *
                    g1p[a] * g1q[a] * g2p[a] * g2q[a];
    double cone = pref * volp * volq * pairwise_sum(cterms);

    // position side: S phi2 on an (r, rho) grid, paired against phi1
    Quad1D rq = mapped(gauss_legendre(params.n_r), 0.0, phi1.rmax);
    Mat kp(params.n_r, ns), kq(params.n_r, ns);
    for (int i = 0; i < params.n_r; ++i)
        for (long a = 0; a < ns; ++a) {
            kp(i, a) = sphere_plane_wave(sig.p - 1,
                                         rq.nodes[i] * srule.nodes[a]);
            kq(i, a) = sphere_plane_wave(sig.q - 1,
                                         rq.nodes[i] * srule.nodes[a]);
        }
    Vec cvec(ns);
    for (long a = 0; a < ns; ++a)
        cvec[a] = pref * srule.weights[a] * std::pow(srule.nodes[a], n - 3) *
                  g2p[a] * g2q[a];
    Mat sphi2 = kp * cvec.asDiagonal() * kq.transpose();
    std::vector<double> pterms;
    pterms.reserve(params.n_r * params.n_r);
    for (int i = 0; i < params.n_r; ++i)
        for (int j = 0; j < params.n_r; ++j)
            pterms.push_back(rq.weights[i] * rq.weights[j] *
                             phi1.plus_profile(rq.nodes[i]) *
                             phi1.minus_profile(rq.nodes[j]) *
                             std::pow(rq.nodes[i], sig.p - 2) *
                             std::pow(rq.nodes[j], sig.q - 2) * sphi2(i, j));
    double position = volp * volq * pairwise_sum(pterms);

    InnerNResult out;
    out.position = Cplx(position, 0.0);
    out.cone = Cplx(cone, 0.0);
    out.disagreement =
        std::abs(position - cone) / std::max(std::abs(cone), 1e-300);
    return out;
}

long CauchyData::grid_size() const { return z_grid.node_count(); }

CauchyData cauchy_data(const Signature& sig, const ConeFunction& phi,
                       int axis, const BoxRule& chart, const BoxRule& z_grid,
                       bool with_gradient) {
    const int n = sig.n;
    const int k = n - 1;
    if (axis < 1 || axis > n)
        throw std::invalid_argument("cauchy_data: axis out of range");
    if (static_cast<int>(chart.axes.size()) != k ||
        static_cast<int>(z_grid.axes.size()) != k)
        throw std::invalid_argument(
            "cauchy_data: chart and grid must have n-1 axes");
    std::vector<int> kept(k);
    for (int j = 0; j < k; ++j) kept[j] = (j < axis - 1) ? j : j + 1;
    const double ei = sig.sign(axis - 1);
    const double qtol = 1e-9;

    auto chart_q = [&](const Vec& zp) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j)
            acc += sig.sign(kept[j]) * zp[j] * zp[j];
        return -ei * acc;
    };
    auto lift = [&](const Vec& zp, double zi) {
        Vec zeta(n);
        for (int j = 0; j < k; ++j) zeta[kept[j]] = zp[j];
        zeta[axis - 1] = zi;
        return zeta;
    };

    // precondition: the data must vanish where the chart leaves the cone
    {
        double interior_max = 0.0, boundary_max = 0.0;
        box_integrate(chart, [&](const Vec& zp) {
            double qq = chart_q(zp);
            double r = std::sqrt(std::max(qq, 0.0));
            double v = std::max(
                std::abs(eval_at_zeta(sig, phi, lift(zp, r))),
                std::abs(eval_at_zeta(sig, phi, lift(zp, -r))));
            (qq >= qtol ? interior_max : boundary_max) =
                std::max(qq >= qtol ? interior_max : boundary_max, v);
            return Cplx(0.0, 0.0);
        });
        if (boundary_max > 1e-8 * std::max(interior_max, 1e-300))
            throw std::domain_error(
                "cauchy_data: cone data does not vanish near zeta_axis = 0");
    }

    std::vector<Vec> targets(k);
    for (int j = 0; j < k; ++j) targets[j] = z_grid.axes[j].nodes;
    const double pref = std::pow(2.0 * M_PI, -n);

    auto transform = [&](const std::function<Cplx(const Vec&, double)>& wgt) {
        std::vector<Cplx> out = fourier_quad_grid(
            chart,
            [&](const Vec& zp) {
                double qq = chart_q(zp);
                if (qq < qtol) return Cplx(0.0, 0.0);
                return wgt(zp, std::sqrt(qq));
            },
            targets, -1.0);
        for (auto& v : out) v *= pref;
        return out;
    };
    auto phi_at = [&](const Vec& zp, double zi) {
        return eval_at_zeta(sig, phi, lift(zp, zi));
    };

    CauchyData out;
    out.axis = axis;
    out.z_grid = z_grid;
    out.f_plus = transform(
        [&](const Vec& zp, double r) { return phi_at(zp, r) / (2.0 * r); });
    out.f_minus = transform(
        [&](const Vec& zp, double r) { return phi_at(zp, -r) / (2.0 * r); });
    out.df_plus = transform(
        [&](const Vec& zp, double r) { return -0.5 * kI * phi_at(zp, r); });
    out.df_minus = transform(
        [&](const Vec& zp, double r) { return 0.5 * kI * phi_at(zp, -r); });
    if (with_gradient) {
        out.grad_plus.resize(k);
        out.grad_minus.resize(k);
        for (int j = 0; j < k; ++j) {
            out.grad_plus[j] = transform([&](const Vec& zp, double r) {
                return -kI * zp[j] * phi_at(zp, r) / (2.0 * r);
            });
            out.grad_minus[j] = transform([&](const Vec& zp, double r) {
                return -kI * zp[j] * phi_at(zp, -r) / (2.0 * r);
            });
        }
    }
    return out;
}

std::pair<FlatSolution, FlatSolution> split_pm(const FlatSolution& f,
                                               int axis) {
    const Signature sig = f.sig();
    const ConeFunction phi = f.cone_data();
    ConeFunction plus, minus;
    plus.label = phi.label + " (+)";
    minus.label = phi.label + " (-)";
    plus.eval = [sig, phi, axis](double s, const Vec& w, const Vec& wp) {
        return zeta_coord(sig, s, w, wp, axis) >= 0.0 ? phi.eval(s, w, wp)
                                                      : Cplx(0.0, 0.0);
    };
    minus.eval = [sig, phi, axis](double s, const Vec& w, const Vec& wp) {
        return zeta_coord(sig, s, w, wp, axis) < 0.0 ? phi.eval(s, w, wp)
                                                     : Cplx(0.0, 0.0);
    };
    return {FlatSolution(sig, f.rule(), plus),
            FlatSolution(sig, f.rule(), minus)};
}

WFormResult inner_W(const CauchyData& data) {
    const int k = static_cast<int>(data.z_grid.axes.size());
    std::vector<int> idx(k, 0);
    std::vector<Cplx> terms;
    terms.reserve(data.grid_size());
    for (long flat = 0; flat < data.grid_size(); ++flat) {
        double w = 1.0;
        for (int a = 0; a < k; ++a)
            w *= data.z_grid.axes[a].weights[idx[a]];
        terms.push_back(w *
                        (data.f_plus[flat] * std::conj(data.df_plus[flat]) -
                         data.f_minus[flat] * std::conj(data.df_minus[flat])));
        int a = k - 1;
        while (a >= 0 &&
               ++idx[a] == static_cast<int>(data.z_grid.axes[a].nodes.size())) {
            idx[a] = 0;
            --a;
        }
    }
    Cplx s = pairwise_sum(terms);  // W-form = s / i
    WFormResult out;
    out.value = s.imag();
    out.imag_residual = std::abs(s.real());
    return out;
}

WFormResult inner_W(const Signature& sig, const ConeFunction& phi, int axis,
                    const BoxRule& chart, const BoxRule& z_grid) {
    return inner_W(cauchy_data(sig, phi, axis, chart, z_grid));
}

ConeFunction separated_cone_function(const Signature& sig,
                                     const SeparatedConeData& data) {
    ConeFunction out;
    out.label = "separated";
    const int p = sig.p, q = sig.q;
    out.eval = [data, p, q](double s, const Vec& w, const Vec& wp) {
        double v = data.radial(s);
        if (p > 2) v *= data.plus_cut(w(0));
        if (q > 2) v *= data.minus_cut(wp(q - 2));
        return Cplx(v, 0.0);
    };
    return out;
}

namespace {

// int over S^{m-1} of u(distinguished coordinate)^2; the polar cosine is
// parametrized as sin(theta) so the endpoint weight stays smooth.
double sphere_cut_square(int m, const std::function<double(double)>& u,
                         int n_t) {
    if (m == 1) return u(1.0) * u(1.0) + u(-1.0) * u(-1.0);
    Quad1D th = mapped(gauss_legendre(n_t), 0.0, M_PI / 2.0);
    double acc = 0.0;
    for (long i = 0; i < th.nodes.size(); ++i) {
        double t = std::sin(th.nodes[i]);
        double c = std::cos(th.nodes[i]);
        acc += th.weights[i] * std::pow(c, m - 2) *
               (u(t) * u(t) + u(-t) * u(-t));
    }
    return sphere_volume(m - 2) * acc;
}

std::function<double(double)> unit_cut() {
    return [](double) { return 1.0; };
}

}  // namespace

double separated_norm(const Signature& sig, const SeparatedConeData& data,
                      int n_s, int n_t) {
    const int n = sig.n;
    double cp = sphere_cut_square(
        sig.p - 1, sig.p == 2 ? unit_cut() : data.plus_cut, n_t);
    double cq = sphere_cut_square(
        sig.q - 1, sig.q == 2 ? unit_cut() : data.minus_cut, n_t);
    Quad1D srule = radial_log_rule(data.smin, data.smax, n_s);
    std::vector<double> terms(srule.nodes.size());
    for (long a = 0; a < srule.nodes.size(); ++a) {
        double b = data.radial(srule.nodes[a]);
        terms[a] =
            srule.weights[a] * std::pow(srule.nodes[a], n - 3) * b * b;
    }
    return 0.5 * cp * cq * pairwise_sum(terms);
}

WFormResult inner_W_separated(const Signature& sig,
                              const SeparatedConeData& data, int axis,
                              const SeparatedWParams& params) {
    const int n = sig.n;
    if (axis != 1 && axis != n)
        throw std::invalid_argument("inner_W_separated: axis must be 1 or n");
    const bool split_plus = (axis == 1);
    // the split sphere carries the Heaviside cut; the other sphere carries
    // the distinguished line coordinate of the hyperplane
    const int ms = split_plus ? sig.p - 1 : sig.q - 1;
    const int mh = split_plus ? sig.q - 1 : sig.p - 1;
    auto cut_s = split_plus ? (sig.p == 2 ? unit_cut() : data.plus_cut)
                            : (sig.q == 2 ? unit_cut() : data.minus_cut);
    auto cut_h = split_plus ? (sig.q == 2 ? unit_cut() : data.minus_cut)
                            : (sig.p == 2 ? unit_cut() : data.plus_cut);
    const int ds = ms - 1;  // radial dimension paired with the split sphere
    const int dh = mh - 1;

    Quad1D srule = radial_log_rule(data.smin, data.smax, params.n_s);
    const long ns = srule.nodes.size();
    Quad1D rq = mapped(gauss_legendre(params.n_rad), 0.0, params.rad_max);
    Quad1D lq = mapped(gauss_legendre(params.n_line), -params.line_max,
                       params.line_max);
    const long nr = ds >= 1 ? rq.nodes.size() : 1;
    const long nh = dh >= 1 ? rq.nodes.size() : 1;
    const long nl = lq.nodes.size();

    using CMat = Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic>;
    // split-side kernels: a0 the plane-wave average against the cut, a1 the
    // same with the -i zeta_axis moment; rows index s, columns the radius
    CMat a0p = CMat::Zero(ns, nr), a0m = CMat::Zero(ns, nr);
    CMat a1p = CMat::Zero(ns, nr), a1m = CMat::Zero(ns, nr);
    if (ms == 1) {
        for (long a = 0; a < ns; ++a) {
            double s = srule.nodes[a];
            a0p(a, 0) = cut_s(1.0);
            a0m(a, 0) = cut_s(-1.0);
            a1p(a, 0) = -kI * s * cut_s(1.0);
            a1m(a, 0) = kI * s * cut_s(-1.0);
        }
    } else {
        Quad1D th = mapped(gauss_legendre(params.n_t), 0.0, M_PI / 2.0);
        for (long a = 0; a < ns; ++a) {
            double s = srule.nodes[a];
            for (long i = 0; i < nr; ++i) {
                double r = ds >= 1 ? rq.nodes[i] : 0.0;
                Cplx c0p(0, 0), c0m(0, 0), c1p(0, 0), c1m(0, 0);
                for (long t = 0; t < th.nodes.size(); ++t) {
                    double st = std::sin(th.nodes[t]);
                    double ct = std::cos(th.nodes[t]);
                    double base = th.weights[t] * std::pow(ct, ms - 2) *
                                  sphere_plane_wave(ms - 1, s * r * ct);
                    c0p += base * cut_s(st);
                    c0m += base * cut_s(-st);
                    c1p += base * cut_s(st) * (-kI * s * st);
                    c1m += base * cut_s(-st) * (kI * s * st);
                }
                a0p(a, i) = c0p;
                a0m(a, i) = c0m;
                a1p(a, i) = c1p;
                a1m(a, i) = c1m;
            }
        }
    }

    // shift-side kernel b(s; rho, z_line): plane-wave average against the
    // cut with the e^{-i s z t} line phase
    std::vector<CMat> bmat(nh, CMat(ns, nl));
    if (mh == 1) {
        for (long a = 0; a < ns; ++a) {
            double s = srule.nodes[a];
            for (long l = 0; l < nl; ++l)
                bmat[0](a, l) =
                    cut_h(1.0) * std::exp(-kI * (s * lq.nodes[l])) +
                    cut_h(-1.0) * std::exp(kI * (s * lq.nodes[l]));
        }
    } else {
        Quad1D th = mapped(gauss_legendre(2 * params.n_t), -M_PI / 2.0,
                           M_PI / 2.0);
        const long nt = th.nodes.size();
        Vec base(nt), st(nt), ct(nt);
        for (long t = 0; t < nt; ++t) {
            st[t] = std::sin(th.nodes[t]);
            ct[t] = std::cos(th.nodes[t]);
            base[t] = th.weights[t] * std::pow(ct[t], mh - 2) * cut_h(st[t]);
        }
        // per s value: one plane-wave row per radius times the line-phase
        // matrix, as a single product
        for (long a = 0; a < ns; ++a) {
            double s = srule.nodes[a];
            Mat pw(nh, nt);
            for (long j = 0; j < nh; ++j) {
                double rho = dh >= 1 ? rq.nodes[j] : 0.0;
                for (long t = 0; t < nt; ++t)
                    pw(j, t) =
                        base[t] * sphere_plane_wave(mh - 1, s * rho * ct[t]);
            }
            CMat ph(nt, nl);
            for (long t = 0; t < nt; ++t)
                for (long l = 0; l < nl; ++l)
                    ph(t, l) = std::exp(-kI * (s * lq.nodes[l] * st[t]));
            CMat slice = pw.cast<Cplx>() * ph;  // (nh, nl)
            for (long j = 0; j < nh; ++j) bmat[j].row(a) = slice.row(j);
        }
    }

    Eigen::VectorXcd coef(ns);
    const double pref = 0.5 * std::pow(2.0 * M_PI, -n);
    for (long a = 0; a < ns; ++a)
        coef[a] = pref * srule.weights[a] * std::pow(srule.nodes[a], n - 3) *
                  data.radial(srule.nodes[a]);

    double mvol = (ds >= 1 ? sphere_volume(ds - 1) : 1.0) *
                  (dh >= 1 ? sphere_volume(dh - 1) : 1.0);
    std::vector<Cplx> terms;
    terms.reserve(nr * nh * nl);
    for (long j = 0; j < nh; ++j) {
        double wj = dh >= 1 ? rq.weights[j] * std::pow(rq.nodes[j], dh - 1)
                            : 1.0;
        for (long l = 0; l < nl; ++l) {
            Eigen::VectorXcd cvec = coef.cwiseProduct(bmat[j].col(l));
            Eigen::VectorXcd fp = a0p.transpose() * cvec;
            Eigen::VectorXcd fm = a0m.transpose() * cvec;
            Eigen::VectorXcd dfp = a1p.transpose() * cvec;
            Eigen::VectorXcd dfm = a1m.transpose() * cvec;
            for (long i = 0; i < nr; ++i) {
                double wi = ds >= 1 ? rq.weights[i] *
                                          std::pow(rq.nodes[i], ds - 1)
                                    : 1.0;
                terms.push_back(wi * wj * lq.weights[l] *
                                (fp[i] * std::conj(dfp[i]) -
                                 fm[i] * std::conj(dfm[i])));
            }
        }
    }
    Cplx s = mvol * pairwise_sum(terms);  // W-form = s / i
    WFormResult out;
    out.value = s.imag();
    out.imag_residual = std::abs(s.real());
    return out;
}

double conserved_quantity(const Signature& sig, const ConeRule& rule,
                          const ConeFunction& phi, int j, double shift) {
    Cplx v = cone_integrate(rule, [&](double s, const Vec& w, const Vec& wp) {
        double zj = zeta_coord(sig, s, w, wp, j);
        Cplx f = phi.eval(s, w, wp) * std::exp(kI * (shift * zj));
        return Cplx(std::abs(zj) * std::norm(f), 0.0);
    });
    return v.real();
}

void write_solution_csv(std::ostream& os, const FlatSolution& f,
                        const std::vector<Vec>& points) {
    for (int j = 1; j <= f.sig().n; ++j) os << "z" << j << ",";
    os << "re,im\n";
    for (const auto& z : points) {
        Cplx v = f.value(z);
        for (int j = 0; j < f.sig().n; ++j) os << z[j] << ",";
        os << v.real() << "," << v.imag() << "\n";
    }
}

void write_cauchy_csv(std::ostream& os, const CauchyData& data) {
    const int k = static_cast<int>(data.z_grid.axes.size());
    for (int a = 0; a < k; ++a) os << "z_" << a << ",";
    os << "fp_re,fp_im,fm_re,fm_im,dfp_re,dfp_im,dfm_re,dfm_im\n";
    std::vector<int> idx(k, 0);
    for (long flat = 0; flat < data.grid_size(); ++flat) {
        for (int a = 0; a < k; ++a)
            os << data.z_grid.axes[a].nodes[idx[a]] << ",";
        os << data.f_plus[flat].real() << "," << data.f_plus[flat].imag()
           << "," << data.f_minus[flat].real() << ","
           << data.f_minus[flat].imag() << "," << data.df_plus[flat].real()
           << "," << data.df_plus[flat].imag() << ","
           << data.df_minus[flat].real() << ","
           << data.df_minus[flat].imag() << "\n";
        int a = k - 1;
        while (a >= 0 &&
               ++idx[a] == static_cast<int>(data.z_grid.axes[a].nodes.size())) {
            idx[a] = 0;
            --a;
        }
    }
}

}  // namespace minrep
