#pragma once

#include "bihar/forward.hpp"
#include "bihar/transport2d.hpp"

#include <array>

namespace bihar {

struct CGOParams {
    Point mu1{1, 0, 0};
    Point mu2{0, 1, 0};
    double h = 0.25;
    double tau = 0.5;       // parameter of the amplitude phase factor
    Point xi{0, 0, 0};
    PlanePhase amp_phase{}; // (a, b) of e^{(phi~ - i psi~)/tau}; zero means no factor
    // The transport right-hand sides and the remainder source are multiplied
    // by a product cutoff that is 1 for |x_a - centre_a| <= cut_inner * half
    // width and 0 beyond cut_outer * half width.
    double cut_inner = 0.5;
    double cut_outer = 0.9;
    bool h_on_adjoint_a1 = true;  // v uses a0 + h a1 + r (false: a0 + a1 + r)
    // Spacing floor: h >= h_floor_factor * dx * (|mu1| + |mu2|) / 2.
    double h_floor_factor = 8.0;
};

// Throws ParameterError for non-orthonormal directions, xi not orthogonal to
// both, nonzero xi on a 2-D grid, h outside (0, 0.5] or below the floor.
void validate_params(const Grid& g, const CGOParams& p);

// (| |grad phi|^2 - |grad psi|^2 |, |grad phi . grad psi|) for phi = mu1.x,
// psi = mu2.x.
std::pair<double, double> eikonal_check(const CGOParams& p);

// Amplitudes of the reconstruction menu, x measured from the grid centre.
enum class AmplitudeChoice { one, plane_wave, linear_plane_wave, linear };
// 1, e^{-i x.xi}, (mu1.x) e^{-i x.xi}, mu1.x
ScalarField amplitude_field(const Grid& g, const CGOParams& p, AmplitudeChoice b);

// zeta = mu1 + i mu2 and the contractions used by the transport equations.
CPoint zeta_of(const CGOParams& p);
// c = -(A zeta . zeta) / 4
ScalarField transport_potential(const CoefficientSet& c, const CGOParams& p);
ScalarField cgo_cutoff(const Grid& g, const CGOParams& p);

struct TransportResult {
    ScalarField a;
    ScalarField rho;            // correction added to the base amplitude (a0 only)
    double rho_norm = 0.0;
    double residual = 0.0;      // relative residual of the n-D equation, interior
    double max_slice_residual = 0.0;
    double potential_max = 0.0;
};

// (zeta.grad)^2 a0 + c a0 = 0 with a0 = e^{(phi~ - i psi~)/tau} (b + rho).
TransportResult solve_transport_a0(const CoefficientSet& c, const CGOParams& p, const ScalarField& b,
                                   const DbarOptions& opts = {});
TransportResult solve_transport_a0(const CoefficientSet& c, const CGOParams& p, AmplitudeChoice b,
                                   const DbarOptions& opts = {});

// 4 T^2 a1 - (A zeta.zeta) a1 = chi (-2 (Lap T + T Lap) a0 + 2 (A zeta).grad a0 + i (B.zeta) a0).
TransportResult solve_transport_a1(const CoefficientSet& c, const CGOParams& p, const ScalarField& a0,
                                   const DbarOptions& opts = {});

// e^{-(phi + i psi)/h} h^4 L e^{(phi + i psi)/h} written out in powers of h:
// h^4 Lap^2 + 2h^3 (Lap T + T Lap) + 4h^2 T^2 - h^2 A zeta.zeta - 2h^3 (A zeta).grad
// - h^4 A:grad^2 - i h^3 B.zeta - i h^4 B.grad + h^4 q.
CVec apply_conjugated(const CoefficientSet& c, const CGOParams& p, const CVec& v);

struct RemainderResult {
    ScalarField r;
    double l2 = 0.0;
    std::array<double, 5> scl{};   // ||r||_{H^s_scl}, s = 0..4
    int iterations = 0;
    double residual = 0.0;         // ||P r - F|| / ||F||, 3 nodes in from the edge
    double source_norm = 0.0;      // ||F||
};

// Solves P r = F, F = -chi P(a0 + w a1) (w = h, or 1 for the unscaled adjoint
// variant).  The constant-coefficient part of P is inverted with FFTs on the
// Bloch-shifted lattice xi + (pi/period) e_a (a = axis of mu1), where its
// discrete symbol has no zeros; the variable part is handled by Neumann
// iteration.  mu1 must be a coordinate axis.  Throws IllConditionedError if
// the iteration does not contract.
RemainderResult solve_remainder(const CoefficientSet& c, const CGOParams& p, const ScalarField& a0,
                                const ScalarField& a1, double a1_weight);

struct CGODiagnostics {
    std::pair<double, double> eikonal{0, 0};
    double potential_max = 0.0;
    double rho_norm = 0.0;
    double a0_residual = 0.0;
    double a1_residual = 0.0;
    double remainder_l2 = 0.0;
    std::array<double, 5> remainder_scl{};
    double remainder_residual = 0.0;
    int remainder_iterations = 0;
    // ||P(a0 + w a1 + r)|| / ||P(a0 + w a1)|| where the cutoff is 1.
    double expansion_residual = 0.0;
    // ||h^4 L_h u|| / ||u|| where the cutoff is 1, with the plain stencils of L.
    // Limited by the O(dx^2/h^2) phase error of the stencils.
    double direct_residual = 0.0;
};

struct CGOSolution {
    CGOParams params;         // as used (mu1 already negated for the adjoint)
    bool adjoint = false;
    ScalarField a0, a1, r, u;
    double a1_weight = 0.0;
    CGODiagnostics diag;
};

enum class CGOSign { plus, minus };

// plus: u for L with phase (mu1 + i mu2).x / h.  minus: v for the adjoint
// coefficients with phase (-mu1 + i mu2).x / h.
CGOSolution build_cgo(const CoefficientSet& c, const CGOParams& p, CGOSign sign, const ScalarField& b,
                      const DbarOptions& opts = {});
CGOSolution build_cgo(const CoefficientSet& c, const CGOParams& p, CGOSign sign, AmplitudeChoice b,
                      const DbarOptions& opts = {});

// e^{(phi + i psi)/h} on the grid, x from the grid centre.
CVec cgo_phase(const Grid& g, const CGOParams& p);

}  // namespace bihar
