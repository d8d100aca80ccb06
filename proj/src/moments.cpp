#include "bihar/reconstruct.hpp"

#include "bihar/errors.hpp"
#include "bihar/fourier.hpp"
#include "bihar/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace bihar {

namespace {

constexpr cplx I1{0.0, 1.0};

Point centre_of(const Grid& g) {
    return {0.5 * (g.lo[0] + g.hi[0]), 0.5 * (g.lo[1] + g.hi[1]), 0.5 * (g.lo[2] + g.hi[2])};
}

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

void check_xi(const CGOParams& p, const char* who) {
    const double tol = 1e-10 * std::max(1.0, norm(p.xi));
    if (std::abs(dot(p.xi, p.mu1)) > tol || std::abs(dot(p.xi, p.mu2)) > tol)
        throw ParameterError(std::string(who) + ": xi must be orthogonal to mu1 and mu2");
}

}  // namespace

CoefficientDelta CoefficientDelta::zeros(const Grid& g) {
    return {SymMatrixField::zeros(g), VectorField::zeros(g), ScalarField::zeros(g)};
}

CoefficientDelta CoefficientDelta::between(const CoefficientSet& L, const CoefficientSet& R) {
    const Grid& g = L.grid();
    require_same_grid(g, R.grid(), "CoefficientDelta::between");
    CoefficientDelta d = zeros(g);
    for (int s = 0; s < 6; ++s) d.dA.c[s] = L.A.c[s] - R.A.c[s];
    for (int j = 0; j < 3; ++j) d.dB.c[j] = L.B.c[j] - R.B.c[j];
    d.dq.v = L.q.v - R.q.v;
    return d;
}

Amplitude menu_amplitude(const Grid& g, const CGOParams& p, AmplitudeChoice b, double scale) {
    const Point c = centre_of(g);
    Amplitude a{ScalarField::zeros(g), VectorField::zeros(g), SymMatrixField::zeros(g)};
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Point x = g.point(n);
        const Point y{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        const auto k = static_cast<Eigen::Index>(n);
        const double t = dot(p.mu1, y);
        const cplx e = std::exp(-I1 * dot(y, p.xi)) * scale;
        const auto& m = p.mu1;
        const auto& xi = p.xi;
        switch (b) {
        case AmplitudeChoice::one: a.value.v[k] = scale; break;
        case AmplitudeChoice::linear:
            a.value.v[k] = t * scale;
            for (int j = 0; j < g.dim; ++j) a.grad.c[j][k] = m[j] * scale;
            break;
        case AmplitudeChoice::plane_wave:
            a.value.v[k] = e;
            for (int j = 0; j < g.dim; ++j) {
                a.grad.c[j][k] = -I1 * xi[j] * e;
                for (int l = j; l < g.dim; ++l) a.hess.at(j, l)[k] = -xi[j] * xi[l] * e;
            }
            break;
        case AmplitudeChoice::linear_plane_wave:
            a.value.v[k] = t * e;
            for (int j = 0; j < g.dim; ++j) {
                a.grad.c[j][k] = m[j] * e - I1 * xi[j] * t * e;
                for (int l = j; l < g.dim; ++l)
                    a.hess.at(j, l)[k] = -I1 * (xi[l] * m[j] + xi[j] * m[l]) * e - xi[j] * xi[l] * t * e;
            }
            break;
        }
    }
    return a;
}

Amplitude amplitude_from_field(const ScalarField& f) {
    const Grid& g = f.grid;
    Amplitude a{f, VectorField::zeros(g), SymMatrixField::zeros(g)};
    for (int j = 0; j < g.dim; ++j) {
        a.grad.c[j] = d1(g, f.v, j);
        for (int l = j; l < g.dim; ++l) a.hess.at(j, l) = d11(g, f.v, j, l);
    }
    return a;
}

cplx moment_volume(const CoefficientDelta& d, const CGOParams& p, const Amplitude& bt,
                   const Amplitude& bs, MomentOrder order) {
    const Grid& g = d.grid();
    require_same_grid(g, bt.value.grid, "moment_volume");
    require_same_grid(g, bs.value.grid, "moment_volume");
    check_xi(p, "moment_volume");
    const CPoint z = zeta_of(p);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto k = static_cast<Eigen::Index>(n);
        const cplx w = bt.value.v[k] * std::conj(bs.value.v[k]);
        const cplx sharp = std::conj(bs.value.v[k]);
        cplx term = 0.0;
        switch (order) {
        case MomentOrder::h_minus2:
            for (int j = 0; j < g.dim; ++j)
                for (int l = 0; l < g.dim; ++l) term -= z[j] * z[l] * d.dA.at(j, l)[k] * w;
            break;
        case MomentOrder::h_minus1:
            for (int j = 0; j < g.dim; ++j) {
                cplx az = 0.0;
                for (int l = 0; l < g.dim; ++l) az += d.dA.at(j, l)[k] * z[l];
                term -= 2.0 * az * bt.grad.c[j][k] * sharp;
                term -= I1 * d.dB.c[j][k] * z[j] * w;
            }
            break;
        case MomentOrder::h0:
            for (int j = 0; j < g.dim; ++j) {
                for (int l = 0; l < g.dim; ++l) term -= d.dA.at(j, l)[k] * bt.hess.at(j, l)[k] * sharp;
                term -= I1 * d.dB.c[j][k] * bt.grad.c[j][k] * sharp;
            }
            term += d.dq.v[k] * w;
            break;
        }
        acc += term;
    }
    return acc * g.cell_volume();
}

cplx moment_volume_total(const CoefficientDelta& d, const CGOParams& p, const Amplitude& bt,
                         const Amplitude& bs) {
    const double h = p.h;
    return moment_volume(d, p, bt, bs, MomentOrder::h_minus2) / (h * h) +
           moment_volume(d, p, bt, bs, MomentOrder::h_minus1) / h +
           moment_volume(d, p, bt, bs, MomentOrder::h0);
}

BoundaryMoment moment_boundary(const CoefficientSet& L, const CoefficientSet& R, const CGOParams& p,
                               AmplitudeChoice b_tilde, AmplitudeChoice b_sharp, double sharp_scale) {
    const Grid& g = L.grid();
    require_same_grid(g, R.grid(), "moment_boundary");
    validate_params(g, p);
    check_xi(p, "moment_boundary");

    // box faces inside the region where the cutoff is 1
    int nmax = 0;
    for (int a = 0; a < g.dim; ++a) nmax = std::max(nmax, g.n[a]);
    const int margin = static_cast<int>(std::ceil((1.0 - p.cut_inner) * (nmax - 1) / 2.0)) + 1;
    if (2 * margin + 4 > nmax) throw ParameterError("moment_boundary: grid too small for the cutoff");
    DomainMask mask = box_mask(g, margin);

    BoundaryMoment out;
    out.margin = margin;

    CGOSolution ut = build_cgo(R, p, CGOSign::plus, b_tilde);
    ScalarField bs = amplitude_field(g, p, b_sharp);
    bs.v *= sharp_scale;
    CGOSolution v = build_cgo(L, p, CGOSign::minus, bs);
    out.u_tilde_diag = ut.diag;
    out.v_diag = v.diag;

    // The CGO for R only solves R u~ = 0 up to its discretisation residual,
    // which h^-4 amplifies in the pairing.  Replace it by the discrete
    // R-solution with the same Navier traces before forming z.
    const NavierBoundaryData bc = navier_traces(mask, ut.u.v);
    auto sol_t = NavierSolver(R, mask).solve(bc, ScalarField::zeros(g));
    auto sol = NavierSolver(L, mask).solve(bc, ScalarField::zeros(g));

    // z = u~ - u and w_z = -Lap z, both zero on the box faces
    CVec z = CVec::Zero(static_cast<Eigen::Index>(g.size()));
    CVec wz = z;
    for (std::size_t n : mask.inside_nodes()) {
        const auto k = static_cast<Eigen::Index>(n);
        z[k] = sol_t.u.v[k] - sol.u.v[k];
        wz[k] = sol_t.w.v[k] - sol.w.v[k];
    }
    const CVec Lz = -laplacian(g, wz) + lower_order_matrix(L) * z;
    const CVec vb = v.u.v.conjugate();
    cplx acc = 0.0;
    for (std::size_t n : mask.inside_nodes()) {
        const auto k = static_cast<Eigen::Index>(n);
        acc += Lz[k] * vb[k];
    }
    out.value = acc * g.cell_volume();

    // sum over faces of d_nu(Lap z) conj(v) + d_nu z Lap conj(v)
    const CVec lapv = laplacian(g, vb);
    const auto nodes = mask.boundary_nodes();
    CVec f0(static_cast<Eigen::Index>(nodes.size())), f1(f0.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        f0[static_cast<Eigen::Index>(i)] = vb[static_cast<Eigen::Index>(nodes[i])];
        f1[static_cast<Eigen::Index>(i)] = lapv[static_cast<Eigen::Index>(nodes[i])];
    }
    out.green = boundary_pairing(mask, f0, f1, normal_derivative(mask, z), -normal_derivative(mask, wz));

    CoefficientDelta d = CoefficientDelta::between(L, R);
    out.oracle = moment_volume_total(d, p, menu_amplitude(g, p, b_tilde), menu_amplitude(g, p, b_sharp, sharp_scale));
    return out;
}

// ---- Fourier moment table ----

MomentTable::MomentTable(const CoefficientDelta& d) : g_(d.grid()) {
    const Grid& g = g_;
    const Point c = centre_of(g);
    const auto N = static_cast<Eigen::Index>(g.size());
    std::array<CVec, 3> y;
    for (int a = 0; a < 3; ++a) y[a] = CVec::Zero(N);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Point x = g.point(n);
        for (int a = 0; a < g.dim; ++a) y[a][static_cast<Eigen::Index>(n)] = x[a] - c[a];
    }
    for (int s = 0; s < 6; ++s) {
        A_[s] = fft(g, d.dA.c[s]);
        for (int a = 0; a < 3; ++a) {
            Ax_[s * 3 + a] = fft(g, d.dA.c[s].cwiseProduct(y[a]));
            for (int b = a; b < 3; ++b) {
                CVec f = fft(g, d.dA.c[s].cwiseProduct(y[a]).cwiseProduct(y[b]));
                Axx_[s * 9 + a * 3 + b] = f;
                Axx_[s * 9 + b * 3 + a] = f;
            }
        }
    }
    for (int j = 0; j < 3; ++j) {
        B_[j] = fft(g, d.dB.c[j]);
        for (int a = 0; a < 3; ++a) Bx_[j * 3 + a] = fft(g, d.dB.c[j].cwiseProduct(y[a]));
    }
    q_ = fft(g, d.dq.v);

    const double dv = g.cell_volume();
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto k = static_cast<Eigen::Index>(n);
        double xi = 0.0;
        for (double v : wavevector(g, n)) xi += v * v;
        double a = 0.0, b = 0.0;
        for (int s = 0; s < 6; ++s) a = std::max(a, std::abs(A_[s][k]));
        for (int j = 0; j < 3; ++j) b = std::max(b, std::abs(B_[j][k]));
        scale_ = std::max(scale_, dv * (a * (1.0 + std::sqrt(xi)) + b + std::abs(q_[k])));
    }
    if (scale_ == 0.0) scale_ = 1.0;
}

cplx MomentTable::ft(const CVec& F, std::size_t bin) const {
    const Point xi = wavevector(g_, bin);
    double ph = 0.0;
    for (int a = 0; a < g_.dim; ++a) ph += xi[a] * 0.5 * (g_.hi[a] - g_.lo[a]);
    return F[static_cast<Eigen::Index>(bin)] * std::exp(I1 * ph) * g_.cell_volume();
}

cplx MomentTable::a_hat(std::size_t bin, int j, int k, int deg, const Point& m) const {
    const int s = SymMatrixField::slot(j, k);
    if (deg == 0) return ft(A_[s], bin);
    cplx acc = 0.0;
    for (int a = 0; a < g_.dim; ++a) {
        if (m[a] == 0.0) continue;
        if (deg == 1) {
            acc += m[a] * ft(Ax_[s * 3 + a], bin);
            continue;
        }
        for (int b = 0; b < g_.dim; ++b)
            if (m[b] != 0.0) acc += m[a] * m[b] * ft(Axx_[s * 9 + a * 3 + b], bin);
    }
    return acc;
}

cplx MomentTable::b_hat(std::size_t bin, int j, int deg, const Point& m) const {
    if (deg == 0) return ft(B_[j], bin);
    if (deg > 1) throw ParameterError("MomentTable: dB moments above degree 1 are not tabulated");
    cplx acc = 0.0;
    for (int a = 0; a < g_.dim; ++a)
        if (m[a] != 0.0) acc += m[a] * ft(Bx_[j * 3 + a], bin);
    return acc;
}

namespace {

// degree of the polynomial factor (mu1.x)^deg carried by a menu amplitude
int poly_degree(AmplitudeChoice b) {
    return (b == AmplitudeChoice::linear || b == AmplitudeChoice::linear_plane_wave) ? 1 : 0;
}

bool has_wave(AmplitudeChoice b) {
    return b == AmplitudeChoice::plane_wave || b == AmplitudeChoice::linear_plane_wave;
}

void check_menu(AmplitudeChoice bt, AmplitudeChoice bs) {
    if (!has_wave(bt) || has_wave(bs))
        throw ParameterError("MomentTable: b~ must carry the plane wave and b# must not");
}

CPoint zeta_s(const XiFrame& f, int s) {
    return {cplx(f.mu1[0], s * f.mu2[0]), cplx(f.mu1[1], s * f.mu2[1]), cplx(f.mu1[2], s * f.mu2[2])};
}

}  // namespace

cplx MomentTable::m2(std::size_t bin, const XiFrame& f, int s, AmplitudeChoice bt, AmplitudeChoice bs) const {
    check_menu(bt, bs);
    const int deg = poly_degree(bt) + poly_degree(bs);
    const CPoint z = zeta_s(f, s);
    cplx acc = 0.0;
    for (int j = 0; j < g_.dim; ++j)
        for (int k = 0; k < g_.dim; ++k) acc -= z[j] * z[k] * a_hat(bin, j, k, deg, f.mu1);
    return acc;
}

cplx MomentTable::m1(std::size_t bin, const XiFrame& f, int s, AmplitudeChoice bt, AmplitudeChoice bs,
                     double sharp_scale) const {
    check_menu(bt, bs);
    const int ds = poly_degree(bs);
    const bool lin = poly_degree(bt) == 1;
    const CPoint z = zeta_s(f, s);
    cplx acc = 0.0;
    for (int j = 0; j < g_.dim; ++j) {
        for (int k = 0; k < g_.dim; ++k) {
            // grad b~ = (lin ? mu1 e : 0) - i xi (mu1.x)^lin e
            cplx gj = -I1 * f.xi[j] * a_hat(bin, j, k, ds + (lin ? 1 : 0), f.mu1);
            if (lin) gj += f.mu1[j] * a_hat(bin, j, k, ds, f.mu1);
            acc -= 2.0 * z[k] * gj;
        }
        acc -= I1 * z[j] * b_hat(bin, j, ds + (lin ? 1 : 0), f.mu1);
    }
    return acc * sharp_scale;
}

cplx MomentTable::m0(std::size_t bin, const XiFrame& f) const {
    cplx acc = ft(q_, bin);
    for (int j = 0; j < g_.dim; ++j) {
        acc -= f.xi[j] * ft(B_[j], bin);
        for (int k = 0; k < g_.dim; ++k) acc += f.xi[j] * f.xi[k] * ft(A_[SymMatrixField::slot(j, k)], bin);
    }
    return acc;
}

}  // namespace bihar
