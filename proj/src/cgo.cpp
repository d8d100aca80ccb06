#include "bihar/cgo.hpp"

#include "bihar/errors.hpp"
#include "bihar/fourier.hpp"
#include "bihar/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bihar {
namespace {

const cplx I1(0.0, 1.0);

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Point centre_of(const Grid& g) {
    Point c{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) c[a] = 0.5 * (g.lo[a] + g.hi[a]);
    return c;
}

double max_dx(const Grid& g) {
    double h = 0.0;
    for (int a = 0; a < g.dim; ++a) h = std::max(h, g.dx(a));
    return h;
}

bool in_margin(const Grid& g, std::size_t p, int margin) {
    auto i = g.unravel(p);
    for (int a = 0; a < g.dim; ++a)
        if (i[a] < margin || i[a] > g.n[a] - 1 - margin) return false;
    return true;
}

double masked_norm(const Grid& g, const CVec& v, const std::vector<char>& keep) {
    double acc = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
        if (keep[p]) acc += std::norm(v[static_cast<Eigen::Index>(p)]);
    return std::sqrt(acc * g.cell_volume());
}

std::vector<char> margin_mask(const Grid& g, int margin) {
    std::vector<char> m(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) m[p] = in_margin(g, p, margin);
    return m;
}

CVec apply_T(const Grid& g, const CPoint& z, const CVec& v) {
    CVec out = CVec::Zero(v.size());
    for (int j = 0; j < g.dim; ++j)
        if (z[j] != 0.0) out += z[j] * d1(g, v, j);
    return out;
}

// compact T^2 = sum zeta_j^2 D_jj + 2 sum_{j<k} zeta_j zeta_k D_j D_k
CVec apply_T2(const Grid& g, const CPoint& z, const CVec& v) {
    CVec out = CVec::Zero(v.size());
    for (int j = 0; j < g.dim; ++j) {
        if (z[j] == 0.0) continue;
        out += z[j] * z[j] * d2(g, v, j);
        for (int k = j + 1; k < g.dim; ++k)
            if (z[k] != 0.0) out += 2.0 * z[j] * z[k] * d11(g, v, j, k);
    }
    return out;
}

CVec A_zeta_zeta(const CoefficientSet& c, const CPoint& z) {
    const Grid& g = c.grid();
    CVec s = CVec::Zero(static_cast<Eigen::Index>(g.size()));
    for (int j = 0; j < g.dim; ++j)
        for (int k = 0; k < g.dim; ++k) s += z[j] * z[k] * c.A.at(j, k);
    return s;
}

CVec A_zeta(const CoefficientSet& c, const CPoint& z, int j) {
    CVec s = CVec::Zero(c.q.v.size());
    for (int k = 0; k < c.grid().dim; ++k) s += z[k] * c.A.at(j, k);
    return s;
}

CVec B_zeta(const CoefficientSet& c, const CPoint& z) {
    CVec s = CVec::Zero(c.q.v.size());
    for (int j = 0; j < c.grid().dim; ++j) s += z[j] * c.B.c[j];
    return s;
}

// variable-coefficient part of the conjugated operator
CVec apply_variable(const CoefficientSet& c, const CGOParams& p, const CVec& v) {
    const Grid& g = c.grid();
    const CPoint z = zeta_of(p);
    const double h = p.h, h2 = h * h, h3 = h2 * h, h4 = h3 * h;
    CVec out = (-h2 * A_zeta_zeta(c, z) - I1 * h3 * B_zeta(c, z) + h4 * c.q.v).cwiseProduct(v);
    for (int j = 0; j < g.dim; ++j) {
        CVec coef = -2.0 * h3 * A_zeta(c, z, j) - I1 * h4 * c.B.c[j];
        if (coef.cwiseAbs().maxCoeff() > 0) out += coef.cwiseProduct(d1(g, v, j));
        for (int k = 0; k < g.dim; ++k) {
            const CVec& a = c.A.at(j, k);
            if (a.cwiseAbs().maxCoeff() > 0) out -= h4 * a.cwiseProduct(d11(g, v, j, k));
        }
    }
    return out;
}

CVec apply_constant(const Grid& g, const CGOParams& p, const CVec& v) {
    const CPoint z = zeta_of(p);
    const double h = p.h;
    CVec lap = laplacian(g, v);
    return std::pow(h, 4) * laplacian(g, lap) +
           2.0 * std::pow(h, 3) * (laplacian(g, apply_T(g, z, v)) + apply_T(g, z, lap)) +
           4.0 * h * h * apply_T2(g, z, v);
}

double smoothstep(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * u * u * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
}

int axis_of(const Point& m) {
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
        if (m[a] == 0.0) continue;
        if (axis >= 0) return -1;
        axis = a;
    }
    return axis;
}

}  // namespace

void validate_params(const Grid& g, const CGOParams& p) {
    g.validate();
    if (std::abs(dot(p.mu1, p.mu1) - 1.0) > 1e-12 || std::abs(dot(p.mu2, p.mu2) - 1.0) > 1e-12)
        throw ParameterError("cgo params: mu1 and mu2 must be unit vectors");
    if (std::abs(dot(p.mu1, p.mu2)) > 1e-12) throw ParameterError("cgo params: mu1 and mu2 must be orthogonal");
    const double xn = std::sqrt(dot(p.xi, p.xi));
    if (std::abs(dot(p.xi, p.mu1)) > 1e-10 * std::max(1.0, xn) ||
        std::abs(dot(p.xi, p.mu2)) > 1e-10 * std::max(1.0, xn))
        throw ParameterError("cgo params: xi must be orthogonal to mu1 and mu2");
    if (g.dim == 2) {
        if (p.mu1[2] != 0.0 || p.mu2[2] != 0.0)
            throw ParameterError("cgo params: directions must lie in the grid plane");
        if (xn != 0.0) throw ParameterError("cgo params: a 2-D grid admits only xi = 0");
    }
    if (!(p.h > 0.0 && p.h <= 0.5)) throw ParameterError("cgo params: h must lie in (0, 0.5]");
    const double floor = p.h_floor_factor * max_dx(g);
    if (p.h < floor * (1.0 - 1e-9))
        throw ParameterError("cgo params: h = " + std::to_string(p.h) + " is below the grid floor " +
                             std::to_string(floor));
    if (!(p.tau > 0.0 && p.tau < 1.0)) throw ParameterError("cgo params: tau must lie in (0,1)");
    if (!(p.cut_inner > 0.0 && p.cut_inner < p.cut_outer && p.cut_outer <= 1.0))
        throw ParameterError("cgo params: need 0 < cut_inner < cut_outer <= 1");
}

std::pair<double, double> eikonal_check(const CGOParams& p) {
    return {std::abs(dot(p.mu1, p.mu1) - dot(p.mu2, p.mu2)), std::abs(dot(p.mu1, p.mu2))};
}

CPoint zeta_of(const CGOParams& p) {
    return {cplx(p.mu1[0], p.mu2[0]), cplx(p.mu1[1], p.mu2[1]), cplx(p.mu1[2], p.mu2[2])};
}

ScalarField amplitude_field(const Grid& g, const CGOParams& p, AmplitudeChoice b) {
    const Point c = centre_of(g);
    return ScalarField::sample(g, [&](const Point& x) {
        Point y{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        cplx wave = std::exp(-I1 * dot(y, p.xi));
        switch (b) {
        case AmplitudeChoice::one: return cplx(1.0);
        case AmplitudeChoice::plane_wave: return wave;
        case AmplitudeChoice::linear_plane_wave: return dot(p.mu1, y) * wave;
        case AmplitudeChoice::linear: return cplx(dot(p.mu1, y));
        }
        return cplx(0.0);
    });
}

ScalarField transport_potential(const CoefficientSet& c, const CGOParams& p) {
    return {c.grid(), -0.25 * A_zeta_zeta(c, zeta_of(p))};
}

ScalarField cgo_cutoff(const Grid& g, const CGOParams& p) {
    const Point c = centre_of(g);
    return ScalarField::sample(g, [&](const Point& x) {
        double v = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            double half = 0.5 * (g.hi[a] - g.lo[a]);
            double z = std::abs(x[a] - c[a]) / half;
            v *= 1.0 - smoothstep((z - p.cut_inner) / (p.cut_outer - p.cut_inner));
        }
        return cplx(v);
    });
}

CVec cgo_phase(const Grid& g, const CGOParams& p) {
    const Point c = centre_of(g);
    const CPoint z = zeta_of(p);
    CVec out(static_cast<Eigen::Index>(g.size()));
    for (std::size_t n = 0; n < g.size(); ++n) {
        Point x = g.point(n);
        cplx s = 0.0;
        for (int a = 0; a < g.dim; ++a) s += z[a] * (x[a] - c[a]);
        out[static_cast<Eigen::Index>(n)] = std::exp(s / p.h);
    }
    return out;
}

TransportResult solve_transport_a0(const CoefficientSet& c, const CGOParams& p, const ScalarField& b,
                                   const DbarOptions& opts) {
    const Grid& g = c.grid();
    require_same_grid(g, b.grid, "solve_transport_a0");
    const CPoint z = zeta_of(p);
    ScalarField pot = transport_potential(c, p);

    TransportResult out;
    out.potential_max = pot.v.cwiseAbs().maxCoeff();
    ScalarField rhs{g, -(apply_T2(g, z, b.v) + pot.v.cwiseProduct(b.v))};
    if (rhs.v.cwiseAbs().maxCoeff() == 0.0) {
        out.rho = ScalarField::zeros(g);
    } else {
        SliceSolution s = lift_to_slices(pot, rhs, p.mu1, p.mu2, opts);
        out.rho = s.a;
        out.max_slice_residual = s.max_residual;
    }
    out.rho_norm = l2_norm(out.rho);

    CVec factor = CVec::Ones(b.v.size());
    if (p.amp_phase.a != 0.0 || p.amp_phase.b != 0.0) {
        const Point ctr = centre_of(g);
        const cplx ab(p.amp_phase.a, -p.amp_phase.b);
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t n = 0; n < g.size(); ++n) {
            Point x = g.point(n);
            Point y{x[0] - ctr[0], x[1] - ctr[1], x[2] - ctr[2]};
            cplx e = ab * cplx(dot(p.mu1, y), dot(p.mu2, y)) / p.tau;
            lo = std::min(lo, e.real());
            hi = std::max(hi, e.real());
            factor[static_cast<Eigen::Index>(n)] = std::exp(e);
        }
        if (hi - lo > 600.0)
            throw IllConditionedError("solve_transport_a0: amplitude weight overflows; use tau >= " +
                                      std::to_string(p.tau * (hi - lo) / 600.0));
    }
    out.a = {g, factor.cwiseProduct(b.v + out.rho.v)};

    auto keep = margin_mask(g, 2);
    CVec t2 = apply_T2(g, z, out.a.v), ca = pot.v.cwiseProduct(out.a.v);
    // with no potential both terms are roundoff, so floor the scale at |a|
    double scale = std::max(masked_norm(g, t2, keep) + masked_norm(g, ca, keep), masked_norm(g, out.a.v, keep));
    double rn = masked_norm(g, t2 + ca, keep);
    out.residual = scale > 0 ? rn / scale : rn;
    return out;
}

TransportResult solve_transport_a0(const CoefficientSet& c, const CGOParams& p, AmplitudeChoice b,
                                   const DbarOptions& opts) {
    return solve_transport_a0(c, p, amplitude_field(c.grid(), p, b), opts);
}

TransportResult solve_transport_a1(const CoefficientSet& c, const CGOParams& p, const ScalarField& a0,
                                   const DbarOptions& opts) {
    const Grid& g = c.grid();
    require_same_grid(g, a0.grid, "solve_transport_a1");
    const CPoint z = zeta_of(p);
    ScalarField pot = transport_potential(c, p);
    const CVec chi = cgo_cutoff(g, p).v;

    CVec lap = laplacian(g, a0.v);
    CVec rhs = -2.0 * (laplacian(g, apply_T(g, z, a0.v)) + apply_T(g, z, lap)) +
               I1 * B_zeta(c, z).cwiseProduct(a0.v);
    for (int j = 0; j < g.dim; ++j) {
        CVec az = A_zeta(c, z, j);
        if (az.cwiseAbs().maxCoeff() > 0) rhs += 2.0 * az.cwiseProduct(d1(g, a0.v, j));
    }
    rhs = rhs.cwiseProduct(chi);

    TransportResult out;
    out.potential_max = pot.v.cwiseAbs().maxCoeff();
    out.rho = ScalarField::zeros(g);
    if (rhs.cwiseAbs().maxCoeff() == 0.0) {
        out.a = ScalarField::zeros(g);
        return out;
    }
    SliceSolution s = lift_to_slices(pot, ScalarField{g, 0.25 * rhs}, p.mu1, p.mu2, opts);
    out.a = s.a;
    out.max_slice_residual = s.max_residual;

    auto keep = margin_mask(g, 2);
    CVec res = 4.0 * (apply_T2(g, z, out.a.v) + pot.v.cwiseProduct(out.a.v)) - rhs;
    double scale = masked_norm(g, rhs, keep);
    out.residual = scale > 0 ? masked_norm(g, res, keep) / scale : 0.0;
    return out;
}

CVec apply_conjugated(const CoefficientSet& c, const CGOParams& p, const CVec& v) {
    return apply_constant(c.grid(), p, v) + apply_variable(c, p, v);
}

RemainderResult solve_remainder(const CoefficientSet& c, const CGOParams& p, const ScalarField& a0,
                                const ScalarField& a1, double a1_weight) {
    const Grid& g = c.grid();
    require_same_grid(g, a0.grid, "solve_remainder");
    require_same_grid(g, a1.grid, "solve_remainder");
    const int axis = axis_of(p.mu1);
    if (axis < 0) throw ParameterError("solve_remainder: mu1 must be a coordinate axis");

    const CVec chi = cgo_cutoff(g, p).v;
    CVec F = -apply_conjugated(c, p, a0.v + a1_weight * a1.v).cwiseProduct(chi);

    RemainderResult out;
    out.source_norm = l2_norm(g, F);
    if (out.source_norm == 0.0) {
        out.r = ScalarField::zeros(g);
        return out;
    }

    // Bloch shift by half a lattice step along mu1
    Point theta{0, 0, 0};
    theta[axis] = std::numbers::pi / g.period(axis);
    const CPoint z = zeta_of(p);
    const double h = p.h;
    CVec p0(static_cast<Eigen::Index>(g.size()));
    CVec bloch(p0.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        Point k = wavevector(g, n);
        cplx sD = 0.0, sT = 0.0, sT2 = 0.0;
        std::array<cplx, 3> s1{}, s2{};
        for (int a = 0; a < g.dim; ++a) {
            const double kk = k[a] + theta[a], dx = g.dx(a);
            const double sh = std::sin(kk * dx / 2);
            s2[a] = -4.0 / (dx * dx) * sh * sh;
            s1[a] = cplx(0.0, std::sin(kk * dx) / dx);
            sD += s2[a];
            sT += z[a] * s1[a];
        }
        for (int a = 0; a < g.dim; ++a) {
            sT2 += z[a] * z[a] * s2[a];
            for (int b = a + 1; b < g.dim; ++b) sT2 += 2.0 * z[a] * z[b] * s1[a] * s1[b];
        }
        p0[static_cast<Eigen::Index>(n)] = std::pow(h, 4) * sD * sD + 4.0 * std::pow(h, 3) * sD * sT + 4.0 * h * h * sT2;
        Point x = g.point(n);
        bloch[static_cast<Eigen::Index>(n)] = std::exp(I1 * theta[axis] * (x[axis] - g.lo[axis]));
    }
    if (p0.cwiseAbs().minCoeff() <= 1e-14 * p0.cwiseAbs().maxCoeff())
        throw IllConditionedError("solve_remainder: shifted symbol vanishes; use an even node count");

    auto solve0 = [&](const CVec& f) {
        CVec F0 = fft(g, bloch.conjugate().cwiseProduct(f));
        return CVec(bloch.cwiseProduct(ifft(g, F0.cwiseQuotient(p0))));
    };
    CVec r = CVec::Zero(F.size());
    const double first = solve0(F).norm();
    bool converged = false;
    for (int it = 1; it <= 400; ++it) {
        CVec next = solve0(F - apply_variable(c, p, r));
        const double step = (next - r).norm(), size = next.norm();
        r = std::move(next);
        out.iterations = it;
        if (!std::isfinite(size) || size > 1e6 * first) break;
        if (step <= 1e-12 * size) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw IllConditionedError("solve_remainder: Neumann iteration does not contract at h = " +
                                  std::to_string(h) + "; use a larger h or weaker coefficients");

    out.r = {g, r};
    out.l2 = l2_norm(g, r);
    ScalarField periodic{g, bloch.conjugate().cwiseProduct(r)};
    for (int s = 0; s <= 4; ++s) out.scl[s] = scl_norm(periodic, s, h, theta);
    auto keep = margin_mask(g, 3);
    out.residual = masked_norm(g, apply_conjugated(c, p, r) - F, keep) / masked_norm(g, F, keep);
    return out;
}

CGOSolution build_cgo(const CoefficientSet& c, const CGOParams& p, CGOSign sign, const ScalarField& b,
                      const DbarOptions& opts) {
    const Grid& g = c.grid();
    validate_params(g, p);
    CGOSolution sol;
    sol.params = p;
    sol.adjoint = sign == CGOSign::minus;
    CoefficientSet coef = sol.adjoint ? adjoint_coefficients(c) : c;
    if (sol.adjoint)
        for (auto& m : sol.params.mu1) m = -m;
    const CGOParams& q = sol.params;
    sol.a1_weight = (!sol.adjoint || q.h_on_adjoint_a1) ? q.h : 1.0;

    sol.diag.eikonal = eikonal_check(q);
    TransportResult t0 = solve_transport_a0(coef, q, b, opts);
    sol.a0 = t0.a;
    sol.diag.potential_max = t0.potential_max;
    sol.diag.rho_norm = t0.rho_norm;
    sol.diag.a0_residual = t0.residual;
    TransportResult t1 = solve_transport_a1(coef, q, sol.a0, opts);
    sol.a1 = t1.a;
    sol.diag.a1_residual = t1.residual;

    RemainderResult rr = solve_remainder(coef, q, sol.a0, sol.a1, sol.a1_weight);
    sol.r = rr.r;
    sol.diag.remainder_l2 = rr.l2;
    sol.diag.remainder_scl = rr.scl;
    sol.diag.remainder_residual = rr.residual;
    sol.diag.remainder_iterations = rr.iterations;

    CVec amp = sol.a0.v + sol.a1_weight * sol.a1.v;
    sol.u = {g, cgo_phase(g, q).cwiseProduct(amp + sol.r.v)};

    // diagnostics on the region where the cutoff is 1, away from the edge
    const CVec chi = cgo_cutoff(g, q).v;
    std::vector<char> keep(g.size());
    for (std::size_t n = 0; n < g.size(); ++n)
        keep[n] = chi[static_cast<Eigen::Index>(n)].real() >= 1.0 - 1e-14 && in_margin(g, n, 3);
    const double base = masked_norm(g, apply_conjugated(coef, q, amp), keep);
    const double full = masked_norm(g, apply_conjugated(coef, q, amp + sol.r.v), keep);
    sol.diag.expansion_residual = base > 0 ? full / base : full;
    const double un = masked_norm(g, sol.u.v, keep);
    sol.diag.direct_residual =
        std::pow(q.h, 4) * masked_norm(g, apply_operator(coef, sol.u.v), keep) / un;
    return sol;
}

CGOSolution build_cgo(const CoefficientSet& c, const CGOParams& p, CGOSign sign, AmplitudeChoice b,
                      const DbarOptions& opts) {
    // the menu is defined with the original mu1, also for the adjoint
    return build_cgo(c, p, sign, amplitude_field(c.grid(), p, b), opts);
}

}  // namespace bihar
