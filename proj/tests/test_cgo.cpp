#include "bihar/cgo.hpp"
#include "bihar/errors.hpp"
#include "bihar/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bihar;

namespace {

Grid plane(int n = 48) { return Grid::cube(2, -0.59, 0.59, n); }

CVec gauss(const Grid& g, double a, double w2 = 0.125) {
    return ScalarField::sample(g, [=](const Point& x) {
        double r2 = 0.0;
        for (int k = 0; k < g.dim; ++k) r2 += x[k] * x[k];
        return cplx(a * std::exp(-r2 / w2));
    }).v;
}

}  // namespace

TEST(Eikonal, OrthonormalPairsAreExact) {
    CGOParams p;
    auto e = eikonal_check(p);
    EXPECT_EQ(e.first, 0.0);
    EXPECT_EQ(e.second, 0.0);
    const double s = std::sqrt(0.5);
    p.mu2 = {0, s, s};
    e = eikonal_check(p);
    EXPECT_LE(e.first, 1e-14);
    EXPECT_LE(e.second, 1e-14);
}

TEST(Eikonal, NonOrthogonalPairFlagged) {
    CGOParams p;
    p.mu2 = {0.6, 0.8, 0};
    EXPECT_GT(eikonal_check(p).second, 0.1);
    EXPECT_THROW(validate_params(plane(), p), ParameterError);
}

TEST(Params, ValidationRules) {
    const Grid g = plane();
    CGOParams p;
    EXPECT_NO_THROW(validate_params(g, p));
    p.h = 0.6;
    EXPECT_THROW(validate_params(g, p), ParameterError);
    p.h = 0.05;  // below the spacing floor
    EXPECT_THROW(validate_params(g, p), ParameterError);
    p.h = 0.25;
    p.xi = {0, 0, 1};  // nonzero xi on a plane grid
    EXPECT_THROW(validate_params(g, p), ParameterError);
    const Grid g3 = Grid::cube(3, -0.59, 0.59, 24);
    p.xi = {1, 0, 0};  // not orthogonal to mu1
    EXPECT_THROW(validate_params(g3, p), ParameterError);
}

TEST(Transport, IsotropicAGivesZeroPotential) {
    const Grid g = Grid::cube(3, -0.5, 0.5, 16);
    CoefficientSet c = CoefficientSet::zeros(g);
    for (int j = 0; j < 3; ++j) c.A.at(j, j) = gauss(g, 0.7);
    CGOParams p;
    const double s = std::sqrt(0.5);
    p.mu1 = {0, s, s};
    p.mu2 = {1, 0, 0};
    EXPECT_LE(transport_potential(c, p).v.cwiseAbs().maxCoeff(), 1e-15);
    const TransportResult t = solve_transport_a0(c, p, AmplitudeChoice::one);
    EXPECT_LE(t.rho_norm, 1e-12);
}

TEST(Transport, AnisotropicAGivesNonzeroPotential) {
    const Grid g = plane();
    CoefficientSet c = CoefficientSet::zeros(g);
    c.A.at(0, 0) = gauss(g, 0.8);
    const CGOParams p;
    EXPECT_GT(transport_potential(c, p).v.cwiseAbs().maxCoeff(), 0.1);
    const TransportResult t = solve_transport_a0(c, p, AmplitudeChoice::one);
    EXPECT_GT(t.rho_norm, 0.0);
    EXPECT_LE(t.residual, 1e-4);
}

TEST(Transport, PlaneWaveAmplitudeAnnihilated) {
    const Grid g = Grid::cube(3, -0.5, 0.5, 16);
    CGOParams p;
    p.xi = {0, 0, 4.0};
    const ScalarField b = amplitude_field(g, p, AmplitudeChoice::plane_wave);
    const ScalarField d = directional_derivative(directional_derivative(b, zeta_of(p)), zeta_of(p));
    EXPECT_LE(d.v.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transport, ZeroCoefficientsGiveZeroA1) {
    const Grid g = plane();
    const CoefficientSet c = CoefficientSet::zeros(g);
    const CGOParams p;
    ScalarField a0 = ScalarField::zeros(g);
    a0.v.setOnes();
    EXPECT_LE(solve_transport_a1(c, p, a0).a.v.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transport, ConstantBSolvedBySubstitution) {
    const Grid g = plane();
    CoefficientSet c = CoefficientSet::zeros(g);
    c.B.c[0].setConstant(0.6);
    c.B.c[1].setConstant(-0.3);
    const CGOParams p;
    ScalarField a0 = ScalarField::zeros(g);
    a0.v.setOnes();
    const TransportResult t = solve_transport_a1(c, p, a0);
    EXPECT_GT(t.a.v.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(t.residual, 1e-4);
}

TEST(Transport, GeneralBumpsResidual) {
    const Grid g = plane();
    CoefficientSet c = CoefficientSet::zeros(g);
    c.A.at(0, 0) = gauss(g, 0.8);
    c.A.at(0, 1) = gauss(g, 0.3);
    c.B.c[0] = gauss(g, 0.5);
    c.q.v = gauss(g, 1.0);
    const CGOParams p;
    const TransportResult a0 = solve_transport_a0(c, p, AmplitudeChoice::one);
    EXPECT_LE(solve_transport_a1(c, p, a0.a).residual, 1e-3);
}

TEST(Remainder, ZeroCoefficientsGiveZeroRemainder) {
    const Grid g = plane();
    const CGOSolution s = build_cgo(CoefficientSet::zeros(g), CGOParams{}, CGOSign::plus, AmplitudeChoice::one);
    EXPECT_LE(s.r.v.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(s.a1.v.cwiseAbs().maxCoeff(), 1e-12);
    const CVec ph = cgo_phase(g, s.params);
    EXPECT_LE((s.u.v - ph).cwiseAbs().maxCoeff(), 1e-12 * ph.cwiseAbs().maxCoeff());
}

TEST(Remainder, DecaysLikeHSquared) {
    const ExperimentResult r = run_remainder_decay();
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_TRUE(r.checks[0].passed) << r.checks[0].value;
}

TEST(CGO, DiagnosticsOfAnisotropicRun) {
    const Grid g = plane();
    CoefficientSet c = CoefficientSet::zeros(g);
    c.A.at(0, 0) = gauss(g, 0.8);
    c.A.at(1, 1) = gauss(g, 0.2);
    c.q.v = gauss(g, 1.0);
    const CGOSolution s = build_cgo(c, CGOParams{}, CGOSign::plus, AmplitudeChoice::one);
    EXPECT_GT(s.diag.potential_max, 0.0);
    EXPECT_GT(s.diag.rho_norm, 0.0);
    EXPECT_LE(s.diag.remainder_residual, 1e-6);
    EXPECT_LE(s.diag.expansion_residual, 1e-3);
}

TEST(CGO, AdjointUsesReflectedDirection) {
    const Grid g = plane();
    CoefficientSet c = CoefficientSet::zeros(g);
    c.q.v = gauss(g, 1.0);
    const CGOSolution v = build_cgo(c, CGOParams{}, CGOSign::minus, AmplitudeChoice::one);
    EXPECT_TRUE(v.adjoint);
    EXPECT_EQ(v.params.mu1[0], -1.0);
}

TEST(CGO, SingleRunExperimentPasses) {
    const ExperimentResult r = run_single_cgo();
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " = " << c.value;
}
