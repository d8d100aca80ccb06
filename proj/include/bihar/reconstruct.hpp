#pragma once

#include "bihar/cgo.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>

namespace bihar {

// Coefficient differences L - L~ (A - A~, B - B~, q - q~).
struct CoefficientDelta {
    SymMatrixField dA;
    VectorField dB;
    ScalarField dq;

    static CoefficientDelta zeros(const Grid& g);
    static CoefficientDelta between(const CoefficientSet& L, const CoefficientSet& R);
    const Grid& grid() const { return dq.grid; }
};

// Amplitude with its first and second derivatives.
struct Amplitude {
    ScalarField value;
    VectorField grad;
    SymMatrixField hess;
};
// Closed-form derivatives of the menu amplitudes (x from the grid centre),
// multiplied by `scale`.
Amplitude menu_amplitude(const Grid& g, const CGOParams& p, AmplitudeChoice b, double scale = 1.0);
// Derivatives by finite differences.
Amplitude amplitude_from_field(const ScalarField& f);

// Coefficient of h^-2, h^-1, h^0 in <(L - L~) u~, v> for u~ = e^{zeta.x/h} b~,
// v = e^{(-mu1 + i mu2).x/h} b#, zeta = mu1 + i mu2:
//   h^-2: -int (zeta.dA zeta) b~ conj(b#)
//   h^-1: -2 int (dA zeta).grad b~ conj(b#) - i int (dB.zeta) b~ conj(b#)
//   h^0 :  int (dA:DD b~ + dB.D b~ + dq b~) conj(b#),  D = -i grad
enum class MomentOrder { h_minus2, h_minus1, h0 };

// Trapezoidal quadrature over the grid.  Throws ParameterError unless xi is
// orthogonal to mu1 and mu2.
cplx moment_volume(const CoefficientDelta& d, const CGOParams& p, const Amplitude& b_tilde,
                   const Amplitude& b_sharp, MomentOrder order);

// h^-2 M_-2 + h^-1 M_-1 + M_0 for the menu amplitudes; what the boundary
// moment should approach up to O(h).
cplx moment_volume_total(const CoefficientDelta& d, const CGOParams& p, const Amplitude& b_tilde,
                         const Amplitude& b_sharp);

struct BoundaryMoment {
    cplx value;          // sum over inside nodes of (L_h z) conj(v) dV, z = u~ - u
    cplx green;          // the same through the boundary form of Green's identity
    cplx oracle;         // moment_volume_total for the same amplitudes
    int margin = 0;      // box margin used for the Navier problem
    CGODiagnostics u_tilde_diag;
    CGODiagnostics v_diag;
};

// u~ is the CGO for R with amplitude b~; u solves L u = 0 with the Navier
// traces of u~ on a box inside the region where the CGO cutoff is 1; v is the
// adjoint CGO for L with amplitude b#.  L - R must vanish near the box faces.
BoundaryMoment moment_boundary(const CoefficientSet& L, const CoefficientSet& R, const CGOParams& p,
                               AmplitudeChoice b_tilde, AmplitudeChoice b_sharp, double sharp_scale = 1.0);

// Symmetric 2-tensor S = F + dV, div F = 0, dV = (d_j V_k + d_k V_j)/2.
struct TensorDecomposition {
    SymMatrixField F;
    VectorField V;
    ScalarField d_sharp;  // d^(xi) = tr F^(xi) / (n - 1)
    ScalarField p;        // p^(xi) = (d^(xi) - i xi.V^(xi)) / |xi|^2, exact when S = d I + Hess p
};
// Spectral, with symbol i xi (Nyquist bins zero) and the zero mode left in F.
TensorDecomposition tensor_decompose(const SymMatrixField& S);
SymMatrixField symmetric_gradient(const VectorField& V);  // spectral dV
VectorField divergence(const SymMatrixField& F);          // spectral div

// d (I - xi xi^T / |xi|^2)
Eigen::Matrix3cd projection_symbol(cplx d, const Point& xi, int dim);
// Riesz transform R_j with symbol xi_j / (i |xi|), zero at xi = 0.
ScalarField riesz(const ScalarField& f, int j);
// d delta_jk + R_j R_k d
SymMatrixField riesz_projection(const ScalarField& d);

// Orthonormal frame (mu1, mu2, xi/|xi|).  mu1 is the coordinate axis with
// the smallest |xi_a| (lowest index on ties) orthogonalised against xi; for
// xi = 0 the frame is (e0, e1, e2).
struct XiFrame {
    Point xi, mu1, mu2;
};
XiFrame frame_for(const Point& xi);

// Dual-grid bins with |xi| <= Nyquist/2 (the minimum over axes).
std::vector<std::size_t> xi_bins(const Grid& g);

struct RecoveryOptions {
    double consistency_tol = 1e-6;  // relative to the largest moment magnitude
    bool strict = true;             // throw InconsistencyError on a failed check
};

// Fourier tables over xi_bins; entries outside are zero.
struct SecondOrderResult {
    ScalarField d_sharp, p;
    SymMatrixField dA;            // d_sharp I + Hess p
    double eigen_violation = 0.0; // max |M_-2(e^{-ix.xi}, 1)| over bins and both signs, relative
    double p_norm = 0.0;          // ||p|| / ||d_sharp|| (or absolute when d_sharp = 0)
    bool eigen_ok = true, p_ok = true;
};
struct FirstOrderResult {
    VectorField dB;
    ScalarField Phi;
    double curl_violation = 0.0;  // max |mu.dB^| over frame vectors, relative
    bool curl_ok = true;
    double curl_field = 0.0;      // max |d_j B_k - d_k B_j| of the recovered field
};

// Moments of a delta over the xi grid, computed with FFTs of x-weighted
// fields; equals moment_volume with the menu amplitudes.
class MomentTable {
public:
    explicit MomentTable(const CoefficientDelta& d);
    const Grid& grid() const { return g_; }
    // zeta = mu1 + s i mu2 with s = +1 or -1
    cplx m2(std::size_t bin, const XiFrame& f, int s, AmplitudeChoice bt, AmplitudeChoice bs) const;
    cplx m1(std::size_t bin, const XiFrame& f, int s, AmplitudeChoice bt, AmplitudeChoice bs,
            double sharp_scale = 1.0) const;
    cplx m0(std::size_t bin, const XiFrame& f) const;  // b~ = e^{-ix.xi}, b# = 1
    double scale() const { return scale_; }

private:
    cplx ft(const CVec& F, std::size_t bin) const;  // centred transform value
    // int dA_jk (mu1.x)^deg e^{-ix.xi}, deg <= 2
    cplx a_hat(std::size_t bin, int j, int k, int deg, const Point& mu1) const;
    // int dB_j (mu1.x)^deg e^{-ix.xi}, deg <= 1
    cplx b_hat(std::size_t bin, int j, int deg, const Point& mu1) const;
    Grid g_;
    std::array<CVec, 6> A_;       // FT of dA_jk
    std::array<CVec, 18> Ax_;     // FT of dA_jk x_a
    std::array<CVec, 54> Axx_;    // FT of dA_jk x_a x_b
    std::array<CVec, 3> B_;
    std::array<CVec, 9> Bx_;
    CVec q_;
    double scale_ = 0.0;
};

// p from the h^-2 moments with b~ = (mu1.x) e^{-ix.xi}, b# = mu1.x, and the
// eigen-structure check.  d_sharp is invisible at this order (zeta is a null
// vector) and is filled in by recover_zeroth_order.  Throws InconsistencyError
// (strict) on an eigen violation and ParameterError on a 2-D table.
SecondOrderResult recover_second_order(const MomentTable& t, const RecoveryOptions& o = {});
// mu1, mu2 components of dB^ from the b~ = e^{-ix.xi}, b# = 1 moments (their
// vanishing is the curl test) and Phi from b# = -mu1.x.
FirstOrderResult recover_first_order(const MomentTable& t, const SecondOrderResult& s,
                                     const RecoveryOptions& o = {});
// d_sharp from the h^-1 moment with b~ = (mu1.x) e^{-ix.xi} once the dB part
// is stripped (also completes s.dA and s.p_norm), then dq from the h^0 moment.
ScalarField recover_zeroth_order(const MomentTable& t, SecondOrderResult& s, const FirstOrderResult& f,
                                 const RecoveryOptions& o = {});

struct StageError {
    std::string stage;
    double rel_l2 = 0.0;
    bool passed = true;
};

struct ReconstructionReport {
    std::string mode;
    SecondOrderResult second;
    FirstOrderResult first;
    ScalarField dq;
    std::vector<StageError> errors;   // d_sharp, p, dB, dq against the truth
    std::map<std::string, double> timings;
    // boundary mode: per-moment comparison against the volume oracle
    std::vector<std::pair<Point, BoundaryMoment>> boundary;
};

enum class PipelineMode { oracle, boundary };

struct PipelineOptions {
    RecoveryOptions recovery{};
    double h = 0.25;
    int boundary_xi_max = 0;   // boundary mode: xi = k e_2 * (2 pi / period), 0 <= k <= this
    double stage_tol = 0.05;   // relative L2 bound used for StageError::passed
};

// oracle: moments from MomentTable, all three stages, errors against the
// truth (d_sharp and p truths must be given for the second-order stage).
// boundary: the delta is realised as L = truth, R = 0 and the moments for
// b~ = e^{-ix.xi}, b# = 1 at xi along e_2 are computed with moment_boundary
// and compared against the volume oracle.
ReconstructionReport full_pipeline(const CoefficientDelta& truth, const ScalarField& d_sharp_truth,
                                   const ScalarField& p_truth, PipelineMode mode,
                                   const PipelineOptions& o = {});

double relative_l2(const CVec& got, const CVec& want);

}  // namespace bihar
