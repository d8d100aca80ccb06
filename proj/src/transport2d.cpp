#include "bihar/transport2d.hpp"

#include "bihar/errors.hpp"
#include "bihar/fourier.hpp"
#include "bihar/stencil.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <algorithm>

namespace bihar {
namespace {

double interior_norm(const Grid& g, const CVec& v, int margin) {
    double acc = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto i = g.unravel(p);
        bool ok = true;
        for (int a = 0; a < g.dim; ++a)
            if (i[a] < margin || i[a] > g.n[a] - 1 - margin) ok = false;
        if (ok) acc += std::norm(v[static_cast<Eigen::Index>(p)]);
    }
    return std::sqrt(acc * g.cell_volume());
}

double relative_residual(const PlaneProblem& P, const CVec& a, int margin) {
    const Grid& g = P.sigma;
    CVec ca = P.c.v.cwiseProduct(a);
    CVec r = apply_dbar2(g, a, P.zeta0, P.zeta1) + ca - P.f.v;
    double scale = std::max(interior_norm(g, P.f.v, margin), interior_norm(g, ca, margin));
    double rn = interior_norm(g, r, margin);
    return scale > 0 ? rn / scale : rn;
}

// Inverse of the compact T^2 symbol, zero where the symbol vanishes.
CVec inverse_symbol(const Grid& g, cplx z0, cplx z1) {
    const double h0 = g.dx(0), h1 = g.dx(1);
    CVec sym(static_cast<Eigen::Index>(g.size()));
    for (std::size_t p = 0; p < g.size(); ++p) {
        Point k = wavevector(g, p);
        double s0 = std::sin(k[0] * h0 / 2), s1 = std::sin(k[1] * h1 / 2);
        cplx d2x = -4.0 / (h0 * h0) * s0 * s0;
        cplx d2y = -4.0 / (h1 * h1) * s1 * s1;
        cplx d1x(0.0, std::sin(k[0] * h0) / h0);
        cplx d1y(0.0, std::sin(k[1] * h1) / h1);
        sym[static_cast<Eigen::Index>(p)] = z0 * z0 * d2x + z1 * z1 * d2y + 2.0 * z0 * z1 * d1x * d1y;
    }
    const double cut = 1e-8 * sym.cwiseAbs().maxCoeff();
    CVec inv(sym.size());
    for (Eigen::Index p = 0; p < sym.size(); ++p)
        inv[p] = std::abs(sym[p]) > cut ? 1.0 / sym[p] : cplx(0.0);
    return inv;
}

CVec min_norm_solve(const PlaneProblem& P, int margin) {
    const Grid& g = P.sigma;
    SpMat M = P.zeta0 * P.zeta0 * d2_matrix(g, 0) + P.zeta1 * P.zeta1 * d2_matrix(g, 1) +
              2.0 * P.zeta0 * P.zeta1 * d11_matrix(g, 0, 1) + diag_matrix(P.c.v);
    std::vector<std::size_t> rows;
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto i = g.unravel(p);
        if (i[0] >= margin && i[0] <= g.n[0] - 1 - margin && i[1] >= margin &&
            i[1] <= g.n[1] - 1 - margin)
            rows.push_back(p);
    }
    SpMat R(static_cast<Eigen::Index>(rows.size()), M.rows());
    std::vector<Eigen::Triplet<cplx>> trip;
    for (std::size_t r = 0; r < rows.size(); ++r)
        trip.emplace_back(static_cast<int>(r), static_cast<int>(rows[r]), 1.0);
    R.setFromTriplets(trip.begin(), trip.end());
    SpMat Mr = R * M;
    CVec fr = R * P.f.v;
    SpMat normal = Mr * Mr.adjoint();
    Eigen::SimplicialLDLT<SpMat> ldlt(normal);
    if (ldlt.info() != Eigen::Success) throw SolverError("solve_dbar2: least-squares factorisation failed");
    CVec w = ldlt.solve(fr);
    return Mr.adjoint() * w;
}

}  // namespace

CVec apply_dbar2(const Grid& g, const CVec& a, cplx z0, cplx z1) {
    return z0 * z0 * d2(g, a, 0) + z1 * z1 * d2(g, a, 1) + 2.0 * z0 * z1 * d11(g, a, 0, 1);
}

DbarResult solve_dbar2(const PlaneProblem& P, const DbarOptions& opts) {
    const Grid& g = P.sigma;
    g.validate();
    if (g.dim != 2) throw ShapeError("solve_dbar2: plane grid must be two-dimensional");
    require_same_grid(g, P.c.grid, "solve_dbar2");
    require_same_grid(g, P.f.grid, "solve_dbar2");
    if (!std::isfinite(P.c.v.cwiseAbs().maxCoeff()))
        throw ParameterError("solve_dbar2: potential is not finite");

    const CVec inv = inverse_symbol(g, P.zeta0, P.zeta1);
    const double zz = std::norm(P.zeta0) + std::norm(P.zeta1);
    const double tc = 0.5 * (g.lo[0] + g.hi[0]), sc = 0.5 * (g.lo[1] + g.hi[1]);
    const ScalarField Q = ScalarField::sample(g, [&](const Point& x) {
        cplx w = std::conj(P.zeta0) * (x[0] - tc) + std::conj(P.zeta1) * (x[1] - sc);
        return w * w / (2.0 * zz * zz);
    });

    DbarResult out;
    CVec a = CVec::Zero(P.f.v.size());
    const double N = static_cast<double>(g.size());
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
        CVec rhs = P.f.v - P.c.v.cwiseProduct(a);
        cplx kappa = rhs.sum() / N;
        rhs.array() -= kappa;
        CVec F = fft(g, rhs);
        CVec next = ifft(g, F.cwiseProduct(inv)) + kappa * Q.v;
        const double step = (next - a).norm(), size = next.norm();
        a = std::move(next);
        out.iterations = it;
        if (!std::isfinite(size) || size > 1e12 * (1.0 + P.f.v.norm())) break;
        if (step <= 1e-13 * std::max(1.0, size)) {
            converged = true;
            break;
        }
    }
    out.a = {g, a};
    out.residual = converged ? relative_residual(P, a, opts.margin) : INFINITY;
    if (out.residual <= opts.tol) return out;

    if (opts.allow_fallback) {
        CVec b = min_norm_solve(P, opts.margin);
        double res = relative_residual(P, b, opts.margin);
        if (res <= opts.tol) {
            out.a = {g, b};
            out.residual = res;
            out.used_fallback = true;
            return out;
        }
    }
    throw SolverError("solve_dbar2: no solution within tolerance (residual " +
                      std::to_string(out.residual) + ")");
}

AmplitudeCGO build_cgo_amplitude(const PlaneProblem& P, const ScalarField& b0,
                                 const PlanePhase& phase, double tau, const DbarOptions& opts) {
    if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("build_cgo_amplitude: tau must lie in (0,1)");
    const Grid& g = P.sigma;
    require_same_grid(g, b0.grid, "build_cgo_amplitude");
    if (b0.v.cwiseAbs().minCoeff() == 0.0)
        throw ParameterError("build_cgo_amplitude: b0 must not vanish on the plane");

    // holomorphic coordinate w with T w = 0; w = t + i s for zeta = (1, i)
    const cplx ratio = P.zeta0 / P.zeta1;
    const double tc = 0.5 * (g.lo[0] + g.hi[0]), sc = 0.5 * (g.lo[1] + g.hi[1]);
    const cplx ab(phase.a, -phase.b);
    CVec expo(b0.v.size());
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t p = 0; p < g.size(); ++p) {
        Point x = g.point(p);
        cplx w = (x[0] - tc) - ratio * (x[1] - sc);
        cplx e = ab * w / tau;
        expo[static_cast<Eigen::Index>(p)] = e;
        lo = std::min(lo, e.real());
        hi = std::max(hi, e.real());
    }
    if (hi - lo > 600.0)
        throw IllConditionedError("build_cgo_amplitude: exponential weight overflows; use tau >= " +
                                  std::to_string(tau * (hi - lo) / 600.0));

    PlaneProblem rp = P;
    rp.f = {g, -(apply_dbar2(g, b0.v, P.zeta0, P.zeta1) + P.c.v.cwiseProduct(b0.v))};
    DbarResult r = solve_dbar2(rp, opts);

    AmplitudeCGO out;
    out.b0 = b0;
    out.rho = r.a;
    out.tau = tau;
    out.a0 = {g, expo.array().exp().matrix().cwiseProduct(b0.v + r.a.v)};
    out.rho_norm = l2_norm(r.a);
    CVec ca = P.c.v.cwiseProduct(out.a0.v);
    CVec t2 = apply_dbar2(g, out.a0.v, P.zeta0, P.zeta1);
    double scale = interior_norm(g, t2, opts.margin) + interior_norm(g, ca, opts.margin);
    double rn = interior_norm(g, t2 + ca, opts.margin);
    out.residual = scale > 0 ? rn / scale : rn;
    return out;
}

SliceLayout slice_layout(const Grid& g, const Point& mu1, const Point& mu2) {
    auto dot = [](const Point& x, const Point& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; };
    if (std::abs(dot(mu1, mu1) - 1.0) > 1e-12 || std::abs(dot(mu2, mu2) - 1.0) > 1e-12 ||
        std::abs(dot(mu1, mu2)) > 1e-12)
        throw ParameterError("slice_layout: mu1, mu2 must be orthonormal");
    if (g.dim == 2 && (mu1[2] != 0.0 || mu2[2] != 0.0))
        throw ParameterError("slice_layout: directions must lie in the plane of a 2-D grid");
    SliceLayout L;
    auto axis_of = [](const Point& m, int& axis, double& sign) {
        int nz = 0;
        for (int a = 0; a < 3; ++a)
            if (m[a] != 0.0) {
                ++nz;
                axis = a;
                sign = m[a] > 0 ? 1.0 : -1.0;
            }
        return nz == 1;
    };
    L.axis_aligned = axis_of(mu1, L.axis_t, L.sign_t) && axis_of(mu2, L.axis_s, L.sign_s);
    if (L.axis_aligned) {
        L.axis_rest = 3 - L.axis_t - L.axis_s;
        L.count = g.dim == 3 ? static_cast<std::size_t>(g.n[L.axis_rest]) : 1;
    }
    return L;
}

namespace {

std::size_t slice_node(const Grid& g, const SliceLayout& L, int it, int is, int k) {
    std::array<int, 3> i{0, 0, 0};
    i[L.axis_t] = it;
    i[L.axis_s] = is;
    if (g.dim == 3) i[L.axis_rest] = k;
    return g.index(i);
}

Grid plane_grid(const Grid& g, const SliceLayout& L) {
    Grid s;
    s.dim = 2;
    s.lo = {g.lo[L.axis_t], g.lo[L.axis_s], 0.0};
    s.hi = {g.hi[L.axis_t], g.hi[L.axis_s], 0.0};
    s.n = {g.n[L.axis_t], g.n[L.axis_s], 1};
    s.periodic = true;
    return s;
}

}  // namespace

std::vector<PlaneProblem> slice_problems(const ScalarField& c, const ScalarField& f,
                                         const SliceLayout& L) {
    const Grid& g = c.grid;
    require_same_grid(g, f.grid, "slice_problems");
    if (!L.axis_aligned) throw ParameterError("slice_problems: layout is not axis aligned");
    Grid s = plane_grid(g, L);
    std::vector<PlaneProblem> out;
    for (std::size_t k = 0; k < L.count; ++k) {
        PlaneProblem P{s, ScalarField::zeros(s), ScalarField::zeros(s), L.sign_t, cplx(0.0, L.sign_s)};
        for (int it = 0; it < s.n[0]; ++it)
            for (int is = 0; is < s.n[1]; ++is) {
                auto q = static_cast<Eigen::Index>(slice_node(g, L, it, is, static_cast<int>(k)));
                auto p = static_cast<Eigen::Index>(s.index(it, is));
                P.c.v[p] = c.v[q];
                P.f.v[p] = f.v[q];
            }
        out.push_back(std::move(P));
    }
    return out;
}

cplx interpolate(const ScalarField& f, const Point& x) {
    const Grid& g = f.grid;
    std::array<int, 3> i0{0, 0, 0};
    std::array<double, 3> w{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        double u = (x[a] - g.lo[a]) / g.dx(a);
        if (u < -1e-9 || u > g.n[a] - 1 + 1e-9) return 0.0;
        int k = std::clamp(static_cast<int>(std::floor(u)), 0, g.n[a] - 2);
        i0[a] = k;
        w[a] = std::clamp(u - k, 0.0, 1.0);
    }
    cplx acc = 0.0;
    const int corners = 1 << g.dim;
    for (int m = 0; m < corners; ++m) {
        std::array<int, 3> i = i0;
        double weight = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            int bit = (m >> a) & 1;
            i[a] += bit;
            weight *= bit ? w[a] : 1.0 - w[a];
        }
        if (weight != 0.0) acc += weight * f.v[static_cast<Eigen::Index>(g.index(i))];
    }
    return acc;
}

SliceSolution lift_to_slices(const ScalarField& c, const ScalarField& f, const Point& mu1,
                             const Point& mu2, const DbarOptions& opts) {
    const Grid& g = c.grid;
    g.validate();
    SliceLayout L = slice_layout(g, mu1, mu2);
    SliceSolution out;
    if (L.axis_aligned) {
        out.a = ScalarField::zeros(g);
        auto probs = slice_problems(c, f, L);
        for (std::size_t k = 0; k < probs.size(); ++k) {
            DbarResult r = solve_dbar2(probs[k], opts);
            out.residuals.push_back(r.residual);
            out.max_residual = std::max(out.max_residual, r.residual);
            const Grid& s = probs[k].sigma;
            for (int it = 0; it < s.n[0]; ++it)
                for (int is = 0; is < s.n[1]; ++is)
                    out.a.v[static_cast<Eigen::Index>(slice_node(g, L, it, is, static_cast<int>(k)))] =
                        r.a.v[static_cast<Eigen::Index>(s.index(it, is))];
        }
        return out;
    }

    // rotated frame e0 = mu1, e1 = mu2, e2 = mu1 x mu2, centred on the box
    std::array<Point, 3> e{mu1, mu2,
                           Point{mu1[1] * mu2[2] - mu1[2] * mu2[1], mu1[2] * mu2[0] - mu1[0] * mu2[2],
                                 mu1[0] * mu2[1] - mu1[1] * mu2[0]}};
    Point centre{0, 0, 0};
    double radius = 0.0, h = INFINITY;
    for (int a = 0; a < g.dim; ++a) {
        centre[a] = 0.5 * (g.lo[a] + g.hi[a]);
        radius += std::pow(0.5 * (g.hi[a] - g.lo[a]), 2);
        h = std::min(h, g.dx(a));
    }
    radius = std::sqrt(radius);
    const int n = 2 * static_cast<int>(std::ceil(radius / h)) + 1;
    Grid r = Grid::cube(g.dim, -radius, radius, n);
    r.periodic = true;
    auto to_world = [&](const Point& y) {
        Point x = centre;
        for (int a = 0; a < g.dim; ++a)
            for (int b = 0; b < g.dim; ++b) x[b] += y[a] * e[a][b];
        return x;
    };
    ScalarField cr = ScalarField::sample(r, [&](const Point& y) { return interpolate(c, to_world(y)); });
    ScalarField fr = ScalarField::sample(r, [&](const Point& y) { return interpolate(f, to_world(y)); });
    SliceSolution rot = lift_to_slices(cr, fr, Point{1, 0, 0}, Point{0, 1, 0}, opts);
    out.a = ScalarField::sample(g, [&](const Point& x) {
        Point y{0, 0, 0};
        for (int a = 0; a < g.dim; ++a)
            for (int b = 0; b < g.dim; ++b) y[a] += (x[b] - centre[b]) * e[a][b];
        return interpolate(rot.a, y);
    });
    out.residuals = std::move(rot.residuals);
    out.max_residual = rot.max_residual;
    out.resampled = true;
    return out;
}
}  // namespace bihar
