#pragma once

#include "bihar/config.hpp"
#include "bihar/reconstruct.hpp"

#include "json.hpp"

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace bihar {

// One pass/fail line.  A check passes when lo <= value <= hi; NaN never passes.
struct Check {
    std::string name;
    double value = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool passed = false;
    std::string note;

    void evaluate() { passed = value >= lo && value <= hi; }
};

Check upper_check(const std::string& name, double value, double hi, std::string note = {});
Check window_check(const std::string& name, double value, double lo, double hi, std::string note = {});

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
    std::string kind;
    std::vector<Check> checks;
    std::vector<Table> tables;
    nlohmann::json data = nlohmann::json::object();
    std::map<std::string, double> timings;  // seconds, kept out of results.json

    bool passed() const;
    void merge(ExperimentResult other);
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- individual studies; the defaults are the acceptance settings ----

// Residual of M'(u e^Phi) for u = e^{k.x} and M u = 0, on grids with n nodes
// per axis; observed order between consecutive grids.
struct GaugeOrderParams {
    std::vector<int> dims{2, 3};
    std::vector<int> ns{32, 64};
    double lo = -0.5, hi = 0.5;
    double window_lo = 1.7, window_hi = 2.3;
};
ExperimentResult run_gauge_order(const GaugeOrderParams& p = {});

// Exact normal traces of u and u e^Phi on the outer faces.
struct GaugeTraceParams {
    int dim = 3;
    int n = 24;
    double lo = -0.5, hi = 0.5;
    double tol = 1e-12;
};
ExperimentResult run_gauge_traces(const GaugeTraceParams& p = {});

// ||rho|| against tau for the plane amplitude equation with b0 = 1.
struct AmplitudeDecayParams {
    int n = 64;
    double side = 1.0;
    std::vector<double> taus{0.4, 0.2, 0.1, 0.05};
    double bump_amplitude = 1.0;
    double bump_width = 0.15;
    double window_lo = 0.8, window_hi = 1.2;
};
ExperimentResult run_amplitude_decay(const AmplitudeDecayParams& p = {});

// ||r||_L2 against h for one CGO (amplitude 1).  Empty coefficients: the
// anisotropic Gaussian set used by the acceptance run.
struct RemainderDecayParams {
    int dim = 2;
    int n = 64;
    double lo = -0.59, hi = 0.59;
    std::vector<double> hs{0.4, 0.3, 0.2, 0.15};
    std::vector<CoefficientSpec> coefficients;
    double window_lo = 1.7, window_hi = 2.3;
};
ExperimentResult run_remainder_decay(const RemainderDecayParams& p = {});

// sigma_min(tau)/tau for both plane operators, with and without a potential.
struct CarlemanParams {
    std::vector<double> taus{0.05, 0.1, 0.2, 0.3, 0.5};
    double potential_re = 2.0, potential_im = 1.0, potential_width2 = 0.05;
    double ratio_max = 3.0;
    double degradation_max = 0.5;
    CarlemanOptions options{};
};
ExperimentResult run_carleman(const CarlemanParams& p = {});

// One CGO solution with its diagnostics.  Empty coefficients: a q bump.
struct SingleCGOParams {
    GridSpec grid{2, -0.59, 0.59, {48}};
    std::vector<CoefficientSpec> coefficients;
    double h = 0.25;
    double tau = 0.5;
    AmplitudeChoice amplitude = AmplitudeChoice::one;
    std::string write_fields;  // base path for u, a0, a1, r; empty = none
};
ExperimentResult run_single_cgo(const SingleCGOParams& p = {});

// The h^-2 moment of isotropic dA over every dual-grid bin and menu pair.
struct NullContractionParams {
    int n = 16;
    double tol = 1e-12;
};
ExperimentResult run_null_contraction(const NullContractionParams& p = {});

// Spectral decomposition round trip, div F, and a dense least-squares oracle.
struct TensorParams {
    int n = 16;
    int oracle_n = 8;
    double tol = 1e-8;
    double oracle_tol = 1e-6;
    unsigned seed = 7;
};
ExperimentResult run_tensor_decomposition(const TensorParams& p = {});

// Projection symbol identities and Riesz composition against the multiplier.
struct ProjectionParams {
    int n = 24;
    double tol = 1e-12;
};
ExperimentResult run_projection_identity(const ProjectionParams& p = {});

// Oracle-mode pipeline.  Empty coefficients: Gaussian d_sharp and dq.
struct OracleParams {
    int n = 48;
    double lo = -1.0, hi = 1.0;
    double tol = 0.05;
    std::vector<CoefficientSpec> coefficients;
};
ExperimentResult run_oracle_reconstruction(const OracleParams& p = {});

// Boundary moment for a dq-only perturbation against the volume oracle.
struct BoundaryParams {
    int n = 32;
    double side = 0.775;
    double radius = 0.14;
    double amplitude = 5.0;
    std::vector<double> hs{0.25, 0.2};
    int xi_max = 0;
    double tol = 0.10;
    // error(h_next) <= max(error(h), floor) counts as improving
    double improvement_floor = 1e-4;
};
ExperimentResult run_boundary_moment(const BoundaryParams& p = {});

// Manufactured u = e^{k.x} (complex k) on the box [-box_half, box_half]^dim,
// resolved with n nodes per axis (margin nodes outside the box), plus the
// Green-pairing symmetry defect of the DN map with a real q.  Empty
// coefficients: compact bumps in every A, B and q slot.
struct ForwardParams {
    int dim = 2;
    std::vector<int> ns{32, 64};
    double box_half = 0.4;
    int margin = 2;
    int modes = 4;  // sine modes per face for the DN map
    std::vector<CoefficientSpec> coefficients;
    bool order = true, symmetry = true;
    double window_lo = 1.7, window_hi = 2.3;
};
ExperimentResult run_forward_order(const ForwardParams& p = {});

// DN matrix on a sine-mode basis, written as a table, and its symmetry
// defect.  Empty coefficients: a real q bump.
struct DNParams {
    int dim = 2;
    int n = 32;
    double box_half = 0.4;
    int margin = 2;
    int modes = 4;
    std::vector<CoefficientSpec> coefficients;
    double symmetry_tol = 1e-2;
};
ExperimentResult run_dn_map(const DNParams& p = {});

// ---- config-driven runner ----

// Check groups each experiment kind understands, for `checks:` in a config.
std::vector<std::string> check_groups(ExperimentKind k);

// Runs the experiment, applies tolerance overrides and tol_scale, and
// evaluates every check.  Throws ConfigError for unusable settings.
ExperimentResult run_experiment(const ExperimentConfig& c);

// Widens [lo, hi] by `scale` (upper bounds are multiplied, windows are
// stretched about their centre) after applying overrides: "name" sets hi,
// "name.lo" sets lo.
void apply_tolerances(ExperimentResult& r, const std::map<std::string, double>& overrides, double scale);

// results.json (deterministic), timings.json, summary.txt and one CSV per table.
void write_outputs(const ExperimentResult& r, const std::string& dir);
std::string summary_text(const ExperimentResult& r);
nlohmann::json results_json(const ExperimentResult& r);

}  // namespace bihar
