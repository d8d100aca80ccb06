#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace bihar {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using Point = std::array<double, 3>;
using CPoint = std::array<cplx, 3>;

// Uniform node-centred tensor grid.  Node i on axis a sits at lo[a] + i*dx(a),
// so both end points are nodes.  Storage is row-major with axis 0 slowest,
// which is also the layout FFTW expects.  Unused axes (dim 2) have n = 1.
//
// When a field is treated as periodic (Fourier operations) the period on
// axis a is n[a]*dx(a), one spacing longer than hi - lo.
struct Grid {
    int dim = 2;
    Point lo{0.0, 0.0, 0.0};
    Point hi{1.0, 1.0, 0.0};
    std::array<int, 3> n{1, 1, 1};
    bool periodic = true;

    static Grid cube(int dim, double lo, double hi, int n);

    double dx(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
    double period(int axis) const { return n[axis] * dx(axis); }
    std::size_t size() const;
    double cell_volume() const;

    std::size_t index(int i0, int i1, int i2 = 0) const {
        return (static_cast<std::size_t>(i0) * n[1] + i1) * n[2] + i2;
    }
    std::size_t index(const std::array<int, 3>& i) const { return index(i[0], i[1], i[2]); }
    std::array<int, 3> unravel(std::size_t node) const;
    Point point(std::size_t node) const;
    std::size_t stride(int axis) const;

    // Throws ShapeError unless dim is 2 or 3, every used axis has >= 8 nodes
    // and hi > lo.
    void validate() const;

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

struct ScalarField {
    Grid grid;
    CVec v;

    static ScalarField zeros(const Grid& g);
    static ScalarField sample(const Grid& g, const std::function<cplx(const Point&)>& f);
};

struct VectorField {
    Grid grid;
    std::array<CVec, 3> c;

    static VectorField zeros(const Grid& g);
    ScalarField component(int j) const { return {grid, c[j]}; }
};

// Symmetric dim x dim field, one stored component per unordered pair, so
// values[j][k] == values[k][j] holds by construction.
struct SymMatrixField {
    Grid grid;
    std::array<CVec, 6> c;

    static int slot(int j, int k);
    static SymMatrixField zeros(const Grid& g);
    CVec& at(int j, int k) { return c[slot(j, k)]; }
    const CVec& at(int j, int k) const { return c[slot(j, k)]; }
};

// Fully symmetric 3-tensor field, one stored component per multiset {j,k,l}.
struct SymTensor3Field {
    Grid grid;
    std::array<CVec, 10> c;

    static int slot(int j, int k, int l);
    static SymTensor3Field zeros(const Grid& g);
    CVec& at(int j, int k, int l) { return c[slot(j, k, l)]; }
    const CVec& at(int j, int k, int l) const { return c[slot(j, k, l)]; }
};

// Discrete domain: `inside` nodes carry unknowns, `boundary` nodes carry
// traces.  For a box the boundary layer consists of face nodes only (edges and
// corners are never touched by the star stencils used on inside nodes).
struct DomainMask {
    Grid grid;
    std::vector<char> inside;
    std::vector<char> boundary;
    std::vector<Point> normal;       // unit outward normal on boundary nodes
    std::vector<int> normal_axis;    // axis for box faces, -1 otherwise
    bool is_box = false;
    std::array<int, 3> box_lo{0, 0, 0};  // index of the boundary planes
    std::array<int, 3> box_hi{0, 0, 0};

    std::vector<std::size_t> inside_nodes() const;
    std::vector<std::size_t> boundary_nodes() const;
};

// Box Omega whose boundary planes sit `margin` nodes in from the grid edge.
DomainMask box_mask(const Grid& g, int margin);
// Ball of radius r; boundary = outside nodes with an inside star neighbour.
DomainMask ball_mask(const Grid& g, const Point& centre, double r);

double l2_norm(const Grid& g, const CVec& f);
double l2_norm(const ScalarField& f);
cplx l2_inner(const Grid& g, const CVec& f, const CVec& h);  // sum f conj(h) dV

}  // namespace bihar
