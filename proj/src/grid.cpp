#include "bihar/grid.hpp"

#include "bihar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bihar {

Grid Grid::cube(int dim, double lo, double hi, int n) {
    Grid g;
    g.dim = dim;
    for (int a = 0; a < 3; ++a) {
        bool used = a < dim;
        g.lo[a] = used ? lo : 0.0;
        g.hi[a] = used ? hi : 0.0;
        g.n[a] = used ? n : 1;
    }
    g.validate();
    return g;
}

std::size_t Grid::size() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2];
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx(a);
    return v;
}

std::array<int, 3> Grid::unravel(std::size_t node) const {
    std::array<int, 3> i{};
    i[2] = static_cast<int>(node % n[2]);
    node /= n[2];
    i[1] = static_cast<int>(node % n[1]);
    i[0] = static_cast<int>(node / n[1]);
    return i;
}

Point Grid::point(std::size_t node) const {
    auto i = unravel(node);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = lo[a] + i[a] * dx(a);
    return x;
}

std::size_t Grid::stride(int axis) const {
    if (axis == 0) return static_cast<std::size_t>(n[1]) * n[2];
    if (axis == 1) return static_cast<std::size_t>(n[2]);
    return 1;
}

void Grid::validate() const {
    if (dim != 2 && dim != 3) throw ShapeError("grid: dim must be 2 or 3");
    for (int a = 0; a < 3; ++a) {
        if (a < dim) {
            if (n[a] < 8)
                throw ShapeError("grid: axis " + std::to_string(a) + " needs at least 8 nodes");
            if (!(hi[a] > lo[a]))
                throw ShapeError("grid: axis " + std::to_string(a) + " has empty extent");
        } else if (n[a] != 1) {
            throw ShapeError("grid: unused axis must have a single node");
        }
    }
}

bool Grid::operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && lo == o.lo && hi == o.hi;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw ShapeError(std::string(what) + ": fields live on different grids");
}

ScalarField ScalarField::zeros(const Grid& g) {
    return {g, CVec::Zero(static_cast<Eigen::Index>(g.size()))};
}

ScalarField ScalarField::sample(const Grid& g, const std::function<cplx(const Point&)>& f) {
    ScalarField s = zeros(g);
    for (std::size_t p = 0; p < g.size(); ++p) s.v[p] = f(g.point(p));
    return s;
}

VectorField VectorField::zeros(const Grid& g) {
    VectorField f;
    f.grid = g;
    for (auto& c : f.c) c = CVec::Zero(static_cast<Eigen::Index>(g.size()));
    return f;
}

int SymMatrixField::slot(int j, int k) {
    static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[j][k];
}

SymMatrixField SymMatrixField::zeros(const Grid& g) {
    SymMatrixField f;
    f.grid = g;
    for (auto& c : f.c) c = CVec::Zero(static_cast<Eigen::Index>(g.size()));
    return f;
}

int SymTensor3Field::slot(int j, int k, int l) {
    std::array<int, 3> s{j, k, l};
    std::sort(s.begin(), s.end());
    // multisets of {0,1,2} of size 3 in lexicographic order
    static constexpr int table[3][3][3] = {
        {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}},
        {{-1, -1, -1}, {-1, 6, 7}, {-1, -1, 8}},
        {{-1, -1, -1}, {-1, -1, -1}, {-1, -1, 9}}};
    return table[s[0]][s[1]][s[2]];
}

SymTensor3Field SymTensor3Field::zeros(const Grid& g) {
    SymTensor3Field f;
    f.grid = g;
    for (auto& c : f.c) c = CVec::Zero(static_cast<Eigen::Index>(g.size()));
    return f;
}

std::vector<std::size_t> DomainMask::inside_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < inside.size(); ++p)
        if (inside[p]) out.push_back(p);
    return out;
}

std::vector<std::size_t> DomainMask::boundary_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < boundary.size(); ++p)
        if (boundary[p]) out.push_back(p);
    return out;
}

DomainMask box_mask(const Grid& g, int margin) {
    g.validate();
    DomainMask m;
    m.grid = g;
    m.is_box = true;
    for (int a = 0; a < g.dim; ++a) {
        m.box_lo[a] = margin;
        m.box_hi[a] = g.n[a] - 1 - margin;
        if (m.box_hi[a] - m.box_lo[a] < 6)
            throw ShapeError("box_mask: margin leaves fewer than 5 inside layers");
    }
    const std::size_t N = g.size();
    m.inside.assign(N, 0);
    m.boundary.assign(N, 0);
    m.normal.assign(N, Point{0, 0, 0});
    m.normal_axis.assign(N, -1);
    for (std::size_t p = 0; p < N; ++p) {
        auto i = g.unravel(p);
        int faces = 0, axis = -1, sign = 0;
        bool within = true;
        for (int a = 0; a < g.dim; ++a) {
            if (i[a] < m.box_lo[a] || i[a] > m.box_hi[a]) within = false;
            if (i[a] == m.box_lo[a]) { ++faces; axis = a; sign = -1; }
            if (i[a] == m.box_hi[a]) { ++faces; axis = a; sign = +1; }
        }
        if (!within) continue;
        if (faces == 0) {
            m.inside[p] = 1;
        } else if (faces == 1) {
            m.boundary[p] = 1;
            m.normal_axis[p] = axis;
            m.normal[p][axis] = sign;
        }
    }
    return m;
}

DomainMask ball_mask(const Grid& g, const Point& c, double r) {
    g.validate();
    DomainMask m;
    m.grid = g;
    const std::size_t N = g.size();
    m.inside.assign(N, 0);
    m.boundary.assign(N, 0);
    m.normal.assign(N, Point{0, 0, 0});
    m.normal_axis.assign(N, -1);
    auto dist = [&](std::size_t p) {
        Point x = g.point(p);
        double s = 0;
        for (int a = 0; a < g.dim; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
        return std::sqrt(s);
    };
    for (std::size_t p = 0; p < N; ++p) {
        auto i = g.unravel(p);
        bool edge = false;
        for (int a = 0; a < g.dim; ++a)
            if (i[a] < 2 || i[a] > g.n[a] - 3) edge = true;
        if (!edge && dist(p) < r) m.inside[p] = 1;
    }
    for (std::size_t p = 0; p < N; ++p) {
        if (m.inside[p]) continue;
        auto i = g.unravel(p);
        bool touches = false;
        for (int a = 0; a < g.dim; ++a) {
            if (i[a] > 0 && m.inside[p - g.stride(a)]) touches = true;
            if (i[a] < g.n[a] - 1 && m.inside[p + g.stride(a)]) touches = true;
        }
        if (!touches) continue;
        m.boundary[p] = 1;
        Point x = g.point(p);
        double d = dist(p);
        for (int a = 0; a < g.dim; ++a) m.normal[p][a] = (x[a] - c[a]) / d;
    }
    return m;
}

double l2_norm(const Grid& g, const CVec& f) {
    return std::sqrt(f.squaredNorm() * g.cell_volume());
}

double l2_norm(const ScalarField& f) { return l2_norm(f.grid, f.v); }

cplx l2_inner(const Grid& g, const CVec& f, const CVec& h) {
    return (f.array() * h.array().conjugate()).sum() * g.cell_volume();
}

}  // namespace bihar
