#include "bihar/errors.hpp"
#include "bihar/transport2d.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>

namespace bihar {

// The operators are assembled densely on a square whose axes may be rotated
// against (t, s).  For the real part with |a| = |b| the principal symbol
// factors along t - s and t + s; on an axis-aligned grid the centred
// difference D (x) I - I (x) D then has an exact kernel that the continuous
// operator does not have, so the default frame follows the characteristics.
std::vector<CarlemanSample> carleman_sigma_min(CarlemanPart part, const PlanePhase& phase,
                                               const std::vector<double>& taus,
                                               const std::function<cplx(const Point&)>& c,
                                               const CarlemanOptions& opts) {
    if (phase.a == 0.0 && phase.b == 0.0) throw ParameterError("carleman_sigma_min: phase (a,b) = (0,0)");
    const int m = opts.nodes - 2 * opts.band;
    if (m < 4) throw ParameterError("carleman_sigma_min: zero band leaves too few unknowns");
    const double h = opts.side / (opts.nodes - 1);
    double theta = opts.frame_angle;
    if (theta < 0) theta = part == CarlemanPart::real ? std::numbers::pi / 4 : 0.0;
    const double ct = std::cos(theta), st = std::sin(theta);

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) {
        D(i, i + 1) = 0.5 / h;
        D(i + 1, i) = -0.5 / h;
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd Du = Eigen::kroneckerProduct(D, I);
    const Eigen::MatrixXd Dv = Eigen::kroneckerProduct(I, D);
    const Eigen::MatrixXd Dt = ct * Du - st * Dv;
    const Eigen::MatrixXd Ds = st * Du + ct * Dv;
    const Eigen::Index N = static_cast<Eigen::Index>(m) * m;

    Eigen::VectorXd pot = Eigen::VectorXd::Zero(N);
    if (c) {
        const double first = -0.5 * opts.side + opts.band * h;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double u = first + i * h, v = first + j * h;
                cplx val = c(Point{ct * u - st * v, st * u + ct * v, 0.0});
                pot[static_cast<Eigen::Index>(i) * m + j] = part == CarlemanPart::real ? val.real() : val.imag();
            }
    }

    std::vector<CarlemanSample> out;
    for (double tau : taus) {
        if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("carleman_sigma_min: tau must lie in (0,1)");
        Eigen::MatrixXd Pt = tau * Dt;
        Pt.diagonal().array() += phase.a;
        Eigen::MatrixXd Ps = tau * Ds;
        Ps.diagonal().array() += phase.b;
        Eigen::MatrixXd M = part == CarlemanPart::real ? Eigen::MatrixXd(Pt * Pt - Ps * Ps)
                                                       : Eigen::MatrixXd(2.0 * Pt * Ps);
        M.diagonal() += tau * tau * pot;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
        out.push_back({tau, svd.singularValues().minCoeff()});
    }
    return out;
}

}  // namespace bihar
