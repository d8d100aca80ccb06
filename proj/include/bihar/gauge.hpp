#pragma once

#include "bihar/grid.hpp"
#include "bihar/jet.hpp"

#include <functional>

namespace bihar {

// Coefficients of M = (-Laplace)^2 + sum C_jkl d_j d_k d_l + sum A_jk d_j d_k
// + sum B_j d_j + q.  Unlike L, M is written with plain partial derivatives.
struct MCoefficients {
    SymTensor3Field C;
    SymMatrixField A;
    VectorField B;
    ScalarField q;

    static MCoefficients zeros(const Grid& g);
    const Grid& grid() const { return q.grid; }
};

// Gauge domain is the whole grid box.  A GaugeFunction built by gauge_bump is
// Phi = alpha * eta^4 * exp(k.x) with eta = prod_a (x_a-lo_a)(hi_a-x_a)/(L_a/2)^2,
// which vanishes to fourth order on every face.
struct GaugeFunction {
    ScalarField phi;
    bool analytic = false;
    double alpha = 0.0;
    Point k{0, 0, 0};
};

GaugeFunction gauge_bump(const Grid& g, double alpha, const Point& k);
GaugeFunction gauge_from_samples(const ScalarField& phi);
// Phi evaluated along x0 + s*dir as a Taylor jet (analytic gauges only).
Jet<4> gauge_jet(const GaugeFunction& phi, const Point& x0, const Point& dir);

// Throws GaugeDomainError unless Phi vanishes on the outer face nodes and
// decays like distance^4 towards them: on every face line the first inner
// value must be at most 1/8 of the second (the ratio is 1/16 for d^4).
void validate_gauge_function(const GaugeFunction& phi);

enum class GaugeConvention {
    // M' = e^Phi M e^-Phi, so M'(u e^Phi) = e^Phi M u exactly.
    conjugation,
    // The coefficient list as it is usually displayed; kept for comparison.
    displayed,
};

// Contractions: <C,g>_jk = C_jkl g_l, <C,H>_j = C_jkl H_kl,
// <C,g g>_j = C_jkl g_k g_l, <C,T> = C_jkl T_jkl, <C,H g> = C_jkl H_jk g_l.
// Derivatives of Phi are taken with the finite-difference stencils.
MCoefficients gauge_transform(const MCoefficients& m, const GaugeFunction& phi,
                              GaugeConvention conv = GaugeConvention::conjugation);

CVec apply_M(const MCoefficients& m, const CVec& u);

// || M'(u e^Phi) || / || u e^Phi || over nodes at least `margin` from the grid
// edge, M' from gauge_transform.  For Phi = 0 this is ||M u|| / ||u||.
double verify_conjugation_identity(const ScalarField& u, const MCoefficients& m,
                                   const GaugeFunction& phi, int margin = 3,
                                   GaugeConvention conv = GaugeConvention::conjugation);

// True iff ||grad Phi|| <= tol forces ||Phi|| <= tol * diam.  Phi is rebuilt by
// integrating d_0 Phi along grid lines starting from its boundary values, so a
// constant that does not vanish on the boundary is reported as false.
bool verify_no_gauge_when_C_zero(const GaugeFunction& phi, double tol = 1e-10);

// Exact normal traces (u, d_nu u, d_nu^2 u, d_nu^3 u) on the outer face nodes
// for a closed-form u given as a jet-valued function of the coordinates.
using JetField = std::function<Jet<4>(const std::array<Jet<4>, 3>&)>;
// Differences are relative to the largest trace of u of the same order.
struct TraceComparison {
    double max_relative = 0.0;          // max over nodes and orders
    std::array<double, 4> per_order{};  // max relative difference per order
    std::size_t nodes = 0;
};
TraceComparison compare_gauge_traces(const GaugeFunction& phi, const JetField& u);

// Same comparison with one-sided differences of the sampled fields u and
// u*e^Phi; converges with the grid instead of being exact.
TraceComparison compare_gauge_traces_discrete(const GaugeFunction& phi, const ScalarField& u);

// Nodes on the faces of the grid box (edges and corners included).
std::vector<std::size_t> outer_face_nodes(const Grid& g);

}  // namespace bihar
