#pragma once

#include "bihar/errors.hpp"
#include "bihar/forward.hpp"

#include <map>
#include <string>
#include <vector>

namespace bihar {

// Validation failure in a config file; the message starts with the field path.
struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

enum class ExperimentKind { forward, dn_map, gauge_check, carleman, cgo, reconstruct, decay_study };

struct ExperimentInfo {
    ExperimentKind kind;
    std::string name;
    std::string description;
};
const std::vector<ExperimentInfo>& experiment_catalog();
std::string kind_name(ExperimentKind k);

struct GridSpec {
    int dim = 3;
    double lo = -0.5;
    double hi = 0.5;
    std::vector<int> n;  // one entry per grid of a refinement study
    Grid grid(int nodes) const { return Grid::cube(dim, lo, hi, nodes); }
};

// One analytic family added into a coefficient set.
//   gaussian-bump     amplitude * exp(-|x-c|^2 / (2 width^2)), or with
//                     compact: true, amplitude * (1 - |x-c|^2 / width^2)_+^4
//   anisotropic-bump  A_jk += matrix_jk * bump
//   hessian           A_jk += d_j d_k bump
//   gradient-field    B_j += d_j bump
// target (gaussian-bump only): q, A (isotropic), A<j><k>, B<j>.
struct CoefficientSpec {
    std::string family;
    std::string target = "q";
    double amplitude = 1.0;
    double width = 0.2;
    Point centre{0, 0, 0};
    bool compact = false;
    std::array<std::array<double, 3>, 3> matrix{};
};

// Coefficients with the scalar potentials that generated them, used as the
// ground truth of reconstruction runs.
struct BuiltCoefficients {
    CoefficientSet c;
    ScalarField d_sharp;  // isotropic part of A
    ScalarField p;        // A = d_sharp I + Hess p when only those families are used
    ScalarField phi;      // B = grad phi for gradient fields
    bool structured = true;  // false once a family outside that structure is used
};
BuiltCoefficients build_coefficients(const Grid& g, const std::vector<CoefficientSpec>& specs);

struct SweepSpec {
    std::vector<double> h;
    std::vector<double> tau;
    int xi_max = 0;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::forward;
    std::string path;
    GridSpec grid;
    std::vector<CoefficientSpec> coefficients;
    SweepSpec sweep;
    std::string out_dir = "out";
    double tol_scale = 1.0;
    std::map<std::string, double> tolerances;  // overrides by check name
    std::vector<std::string> checks;           // subset of checks to run; empty = all
    std::map<std::string, double> params;      // experiment-specific numbers

    double param(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

// Throws ConfigError naming the offending field.
ExperimentConfig parse_config_text(const std::string& text, const std::string& path = "<string>");
ExperimentConfig load_config(const std::string& path);

}  // namespace bihar
