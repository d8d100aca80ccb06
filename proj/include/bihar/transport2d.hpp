#pragma once

#include "bihar/grid.hpp"

#include <vector>

namespace bihar {

// T = zeta0 d_t + zeta1 d_s on a plane grid.  The default zeta = (1, i) is the
// usual second-order dbar operator; slices of an n-D problem may flip signs.
struct PlaneProblem {
    Grid sigma;    // dim 2, periodic
    ScalarField c; // potential
    ScalarField f; // source
    cplx zeta0{1.0, 0.0};
    cplx zeta1{0.0, 1.0};
};

// Compact stencil for T^2: zeta0^2 D_tt + zeta1^2 D_ss + 2 zeta0 zeta1 D_t D_s.
CVec apply_dbar2(const Grid& g, const CVec& a, cplx zeta0, cplx zeta1);

struct DbarOptions {
    int max_iter = 500;
    double tol = 1e-6;     // relative residual required on return
    int margin = 2;        // residual measured this many nodes in from the edge
    bool allow_fallback = true;
};

struct DbarResult {
    ScalarField a;
    double residual = 0.0;  // ||T^2 a + c a - f|| / max(||f||, ||c a||), interior
    int iterations = 0;
    bool used_fallback = false;
};

// Solves T^2 a + c a = f.  Neumann iteration a <- S(f - c a - k) + k Q with S
// the periodic Fourier inverse of the T^2 symbol, k the mean of the bracket and
// Q = (conj(zeta).x)^2 / (2|zeta|^4) (T^2 Q = 1 exactly).  When the iteration
// stalls, a minimum-norm least-squares solve of the stencil system is tried.
// Throws SolverError if neither reaches opts.tol.
DbarResult solve_dbar2(const PlaneProblem& prob, const DbarOptions& opts = {});

// phi~ = a t + b s, psi~ = b t - a s (conjugate harmonic pair).
struct PlanePhase {
    double a = 0.0;
    double b = 0.0;
    double phi(double t, double s) const { return a * t + b * s; }
    double psi(double t, double s) const { return b * t - a * s; }
};

struct AmplitudeCGO {
    ScalarField b0;
    ScalarField rho;
    double tau = 0.0;
    ScalarField a0;          // e^{(phi~ - i psi~)/tau} (b0 + rho)
    double rho_norm = 0.0;   // L2 over the plane grid
    double residual = 0.0;   // relative residual of T^2 a0 + c a0 on interior nodes
};

// rho solves (T^2 + c) rho = -(T^2 + c) b0.  The phase factor is annihilated
// by T, so tau enters only through that factor.  Throws IllConditionedError if
// (max phi~ - min phi~)/tau would overflow the exponential.
AmplitudeCGO build_cgo_amplitude(const PlaneProblem& prob, const ScalarField& b0,
                                 const PlanePhase& phase, double tau,
                                 const DbarOptions& opts = {});

// Linear map between the grid and the plane coordinates of a transport
// problem: t = mu1.(x - centre), s = mu2.(x - centre).
struct SliceLayout {
    bool axis_aligned = false;
    int axis_t = 0, axis_s = 1, axis_rest = 2;  // valid when axis_aligned
    double sign_t = 1.0, sign_s = 1.0;
    std::size_t count = 1;                      // number of slices
};

// Throws ParameterError unless mu1, mu2 are orthonormal (and lie in the grid
// plane for dim 2).
SliceLayout slice_layout(const Grid& g, const Point& mu1, const Point& mu2);

struct SliceSolution {
    ScalarField a;                  // n-D field on the input grid
    std::vector<double> residuals;  // one per slice
    double max_residual = 0.0;
    bool resampled = false;
};

// Solves ((mu1 + i mu2).grad)^2 a + c a = f slice by slice.  Axis-aligned
// directions reuse the grid lines directly; any other orthonormal pair is
// handled by resampling c and f onto a grid aligned with (mu1, mu2, mu1 x mu2)
// with multilinear interpolation and interpolating the result back.
SliceSolution lift_to_slices(const ScalarField& c, const ScalarField& f, const Point& mu1,
                             const Point& mu2, const DbarOptions& opts = {});

// Individual plane problems for an axis-aligned layout (slice k holds the
// nodes with index k along axis_rest).
std::vector<PlaneProblem> slice_problems(const ScalarField& c, const ScalarField& f,
                                         const SliceLayout& layout);

// Multilinear interpolation of a grid field at an arbitrary point; zero
// outside the grid box.
cplx interpolate(const ScalarField& f, const Point& x);

enum class CarlemanPart { real, imag };

struct CarlemanOptions {
    int nodes = 36;      // per axis, including the zero band
    double side = 1.0;   // side length of the square plane domain
    int band = 3;        // nodes forced to zero on each side
    // Angle of the grid axes relative to (t, s).  Negative selects the
    // characteristic frame of the principal part: pi/4 for the real part
    // (d_t^2 - d_s^2), 0 for the imaginary part (d_t d_s).
    double frame_angle = -1.0;
};

struct CarlemanSample {
    double tau;
    double sigma_min;
};

// Smallest singular value of the real or imaginary part of
// e^{-phi~/tau} tau^2 (d_t + i d_s)^2 e^{phi~/tau}, plus tau^2 times the real
// (resp. imaginary) part of c when c is given, on fields vanishing in the band.
std::vector<CarlemanSample> carleman_sigma_min(CarlemanPart part, const PlanePhase& phase,
                                               const std::vector<double>& taus,
                                               const std::function<cplx(const Point&)>& c = {},
                                               const CarlemanOptions& opts = {});

}  // namespace bihar
