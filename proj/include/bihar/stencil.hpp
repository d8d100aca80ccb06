#pragma once

#include "bihar/grid.hpp"

#include <Eigen/SparseCore>

namespace bihar {

using SpMat = Eigen::SparseMatrix<cplx>;

// Second-order finite differences.  Interior nodes use the centred stencils
// (f[i+1]-f[i-1])/2dx and (f[i+1]-2f[i]+f[i-1])/dx^2; the two end nodes of each
// line use second-order one-sided stencils.  The periodic flag of the grid is
// ignored here: only Fourier operations wrap around.
CVec d1(const Grid& g, const CVec& f, int axis);
CVec d2(const Grid& g, const CVec& f, int axis);
// d_a d_b f, using d2 when a == b and d1 composed otherwise.
CVec d11(const Grid& g, const CVec& f, int a, int b);
// d_a d_b d_c f built from the same compositions (d1*d2 for repeated indices).
CVec d111(const Grid& g, const CVec& f, int a, int b, int c);
CVec laplacian(const Grid& g, const CVec& f);
CVec bilaplacian(const Grid& g, const CVec& f);

ScalarField laplacian(const ScalarField& f);
ScalarField bilaplacian(const ScalarField& f);
ScalarField partial(const ScalarField& f, int axis);

// (mu . grad) f for a complex direction mu; throws ParameterError for mu = 0.
ScalarField directional_derivative(const ScalarField& f, const CPoint& mu);

// Sparse versions over every grid node, row p = stencil centred at node p.
SpMat identity_matrix(const Grid& g);
SpMat d1_matrix(const Grid& g, int axis);
SpMat d2_matrix(const Grid& g, int axis);
SpMat d11_matrix(const Grid& g, int a, int b);
SpMat laplacian_matrix(const Grid& g);
SpMat diag_matrix(const CVec& d);

}  // namespace bihar
