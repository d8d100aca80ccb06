#include "bihar/stencil.hpp"

#include "bihar/errors.hpp"

#include <vector>

namespace bihar {
namespace {

struct Weights {
    int offset;  // first node relative to centre
    std::vector<double> w;
};

// Stencil for node i on a line of n nodes; order 1 or 2.
Weights line_stencil(int i, int n, int order, double h) {
    if (order == 1) {
        double s = 1.0 / (2.0 * h);
        if (i == 0) return {0, {-3 * s, 4 * s, -1 * s}};
        if (i == n - 1) return {-2, {1 * s, -4 * s, 3 * s}};
        return {-1, {-s, 0.0, s}};
    }
    double s = 1.0 / (h * h);
    if (i == 0) return {0, {2 * s, -5 * s, 4 * s, -1 * s}};
    if (i == n - 1) return {-3, {-1 * s, 4 * s, -5 * s, 2 * s}};
    return {-1, {s, -2 * s, s}};
}

void check_axis(const Grid& g, int axis) {
    if (axis < 0 || axis >= g.dim) throw ShapeError("stencil: axis out of range");
}

CVec apply_line(const Grid& g, const CVec& f, int axis, int order) {
    check_axis(g, axis);
    if (static_cast<std::size_t>(f.size()) != g.size())
        throw ShapeError("stencil: field size does not match grid");
    const int n = g.n[axis];
    const std::ptrdiff_t st = static_cast<std::ptrdiff_t>(g.stride(axis));
    const double h = g.dx(axis);
    std::vector<Weights> ws;
    ws.reserve(n);
    for (int i = 0; i < n; ++i) ws.push_back(line_stencil(i, n, order, h));
    CVec out(f.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        int i = g.unravel(p)[axis];
        const Weights& w = ws[i];
        cplx acc = 0.0;
        for (std::size_t t = 0; t < w.w.size(); ++t)
            acc += w.w[t] * f[static_cast<std::ptrdiff_t>(p) + (w.offset + static_cast<int>(t)) * st];
        out[p] = acc;
    }
    return out;
}

SpMat line_matrix(const Grid& g, int axis, int order) {
    check_axis(g, axis);
    const int n = g.n[axis];
    const std::ptrdiff_t st = static_cast<std::ptrdiff_t>(g.stride(axis));
    const double h = g.dx(axis);
    std::vector<Eigen::Triplet<cplx>> tr;
    tr.reserve(g.size() * 4);
    for (std::size_t p = 0; p < g.size(); ++p) {
        int i = g.unravel(p)[axis];
        Weights w = line_stencil(i, n, order, h);
        for (std::size_t t = 0; t < w.w.size(); ++t) {
            if (w.w[t] == 0.0) continue;
            std::ptrdiff_t q = static_cast<std::ptrdiff_t>(p) + (w.offset + static_cast<int>(t)) * st;
            tr.emplace_back(static_cast<int>(p), static_cast<int>(q), w.w[t]);
        }
    }
    SpMat m(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
}

}  // namespace

CVec d1(const Grid& g, const CVec& f, int axis) { return apply_line(g, f, axis, 1); }
CVec d2(const Grid& g, const CVec& f, int axis) { return apply_line(g, f, axis, 2); }

CVec d11(const Grid& g, const CVec& f, int a, int b) {
    if (a == b) return d2(g, f, a);
    return d1(g, d1(g, f, b), a);
}

CVec d111(const Grid& g, const CVec& f, int a, int b, int c) {
    if (a == b) return d11(g, d1(g, f, c), a, a);
    if (a == c) return d11(g, d1(g, f, b), a, a);
    if (b == c) return d11(g, d1(g, f, a), b, b);
    return d1(g, d1(g, d1(g, f, c), b), a);
}

CVec laplacian(const Grid& g, const CVec& f) {
    CVec out = d2(g, f, 0);
    for (int a = 1; a < g.dim; ++a) out += d2(g, f, a);
    return out;
}

CVec bilaplacian(const Grid& g, const CVec& f) { return laplacian(g, laplacian(g, f)); }

ScalarField laplacian(const ScalarField& f) { return {f.grid, laplacian(f.grid, f.v)}; }
ScalarField bilaplacian(const ScalarField& f) { return {f.grid, bilaplacian(f.grid, f.v)}; }
ScalarField partial(const ScalarField& f, int axis) { return {f.grid, d1(f.grid, f.v, axis)}; }

ScalarField directional_derivative(const ScalarField& f, const CPoint& mu) {
    bool nonzero = false;
    for (int a = 0; a < f.grid.dim; ++a)
        if (mu[a] != 0.0) nonzero = true;
    if (!nonzero) throw ParameterError("directional_derivative: direction is zero");
    ScalarField out = ScalarField::zeros(f.grid);
    for (int a = 0; a < f.grid.dim; ++a)
        if (mu[a] != 0.0) out.v += mu[a] * d1(f.grid, f.v, a);
    return out;
}

SpMat identity_matrix(const Grid& g) {
    SpMat m(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
    m.setIdentity();
    return m;
}

SpMat d1_matrix(const Grid& g, int axis) { return line_matrix(g, axis, 1); }
SpMat d2_matrix(const Grid& g, int axis) { return line_matrix(g, axis, 2); }

SpMat d11_matrix(const Grid& g, int a, int b) {
    if (a == b) return d2_matrix(g, a);
    return SpMat(d1_matrix(g, a) * d1_matrix(g, b));
}

SpMat laplacian_matrix(const Grid& g) {
    SpMat m = d2_matrix(g, 0);
    for (int a = 1; a < g.dim; ++a) m += d2_matrix(g, a);
    return m;
}

SpMat diag_matrix(const CVec& d) {
    SpMat m(d.size(), d.size());
    std::vector<Eigen::Triplet<cplx>> tr;
    tr.reserve(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] != 0.0) tr.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
}

}  // namespace bihar
