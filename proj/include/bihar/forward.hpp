#pragma once

#include "bihar/grid.hpp"
#include "bihar/stencil.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace bihar {

// Coefficients of L = (-Laplace)^2 + sum A_jk D_j D_k + sum B_j D_j + q with
// D_j = -i d/dx_j.
struct CoefficientSet {
    SymMatrixField A;
    VectorField B;
    ScalarField q;

    static CoefficientSet zeros(const Grid& g);
    const Grid& grid() const { return q.grid; }
    double max_abs() const;
};

// Throws ExtentError if any coefficient is nonzero on a node that is not an
// inside node of `mask`.
void check_support(const CoefficientSet& c, const DomainMask& mask);

// L_h on every grid node: laplacian_matrix^2 plus the lower-order part.
SpMat assemble_operator(const CoefficientSet& c);
// sum A_jk D_j D_k + sum B_j D_j + q as a sparse matrix.
SpMat lower_order_matrix(const CoefficientSet& c);
CVec apply_operator(const CoefficientSet& c, const CVec& u);

// Navier data on the boundary nodes of a mask, in boundary_nodes() order:
// f0 = u, f1 = -Laplace u.
struct NavierBoundaryData {
    CVec f0;
    CVec f1;
};

// Coupled second-order system for (u, w = -Laplace u) on the inside nodes.
// The factorisation is built once; solve() may be called repeatedly but is not
// safe to call concurrently on one instance.
class NavierSolver {
public:
    NavierSolver(const CoefficientSet& c, const DomainMask& mask);
    ~NavierSolver();
    NavierSolver(const NavierSolver&) = delete;
    NavierSolver& operator=(const NavierSolver&) = delete;

    struct Solution {
        ScalarField u;  // inside values, boundary data f0, zero elsewhere
        ScalarField w;  // -Laplace u with boundary data f1
    };
    Solution solve(const NavierBoundaryData& bc, const ScalarField& rhs) const;

    const DomainMask& mask() const { return mask_; }
    std::size_t unknowns() const { return 2 * inside_.size(); }

private:
    struct Impl;
    DomainMask mask_;
    std::vector<std::size_t> inside_, boundary_;
    std::vector<long> slot_;       // grid node -> inside index or -1
    std::vector<long> bslot_;      // grid node -> boundary index or -1
    SpMat couple_u_bnd_;           // rows 2*Ni, columns = boundary nodes (f0)
    SpMat couple_w_bnd_;           // same for f1
    std::unique_ptr<Impl> impl_;
};

ScalarField solve_navier(const CoefficientSet& c, const DomainMask& mask,
                         const NavierBoundaryData& bc, const ScalarField& rhs);

// Navier data sampled from a field that is defined on the whole grid.
NavierBoundaryData navier_traces(const DomainMask& mask, const CVec& u);

// Second-order one-sided normal derivative on each boundary node (box masks).
CVec normal_derivative(const DomainMask& mask, const CVec& f);

// Columns are (d_nu u_k, d_nu w_k) stacked over the boundary nodes.
struct DNMatrix {
    Eigen::MatrixXcd m;
    std::vector<std::size_t> boundary;  // grid node of each boundary row
};
DNMatrix dn_map(const CoefficientSet& c, const DomainMask& mask,
                const std::vector<NavierBoundaryData>& basis);

// Smooth boundary data sin(k pi s) products on each face, vanishing on box
// edges; `count` modes per face for f0 and f1 each.
std::vector<NavierBoundaryData> sine_mode_basis(const DomainMask& mask, int count);

// <f, g>_X = sum over boundary of (f0 * g1 + f1 * g0) dS (bilinear).
cplx boundary_pairing(const DomainMask& mask, const CVec& f0, const CVec& f1,
                      const CVec& g0, const CVec& g1);

// A# = conj(A), B#_k = conj(B_k) + 2 sum_j D_j conj(A_jk),
// q# = conj(q) + sum_jk D_j D_k conj(A_jk) + sum_j D_j conj(B_j).
CoefficientSet adjoint_coefficients(const CoefficientSet& c);

// Zero extension to a grid with the same spacing whose nodes contain the
// original ones.  Throws ExtentError when the small grid is not a sub-lattice.
CoefficientSet extend_coefficients(const CoefficientSet& c, const Grid& bigger);
CoefficientSet restrict_coefficients(const CoefficientSet& c, const Grid& smaller);

}  // namespace bihar
