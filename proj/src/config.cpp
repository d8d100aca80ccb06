#include "bihar/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bihar {

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> cat{
        {ExperimentKind::forward, "forward",
         "Navier solver: manufactured-solution convergence order and Green-pairing symmetry"},
        {ExperimentKind::dn_map, "dn-map", "discrete DN map on a sine-mode boundary basis, written as CSV"},
        {ExperimentKind::gauge_check, "gauge-check",
         "gauge identity residual order and boundary-trace invariance of u e^Phi"},
        {ExperimentKind::carleman, "carleman",
         "sigma_min(tau)/tau of the conjugated plane operators, with and without a potential"},
        {ExperimentKind::cgo, "cgo", "one CGO solution with transport, remainder and residual diagnostics"},
        {ExperimentKind::reconstruct, "reconstruct",
         "null contraction, tensor decomposition, projection identity, oracle and boundary-moment recovery"},
        {ExperimentKind::decay_study, "decay-study",
         "amplitude correction norm against tau and remainder norm against h"},
    };
    return cat;
}

std::string kind_name(ExperimentKind k) {
    for (const auto& e : experiment_catalog())
        if (e.kind == k) return e.name;
    return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

double as_double(const YAML::Node& n, const std::string& path) {
    try {
        double v = n.as<double>();
        if (!std::isfinite(v)) fail(path, "expected a finite number");
        return v;
    } catch (const YAML::Exception&) {
        fail(path, "expected a number");
    }
}

int as_int(const YAML::Node& n, const std::string& path) {
    try {
        return n.as<int>();
    } catch (const YAML::Exception&) {
        fail(path, "expected an integer");
    }
}

std::string as_string(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(path, "expected a string");
    return n.as<std::string>();
}

bool as_bool(const YAML::Node& n, const std::string& path) {
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        fail(path, "expected true or false");
    }
}

std::vector<double> as_double_list(const YAML::Node& n, const std::string& path) {
    std::vector<double> out;
    if (n.IsScalar()) {
        out.push_back(as_double(n, path));
        return out;
    }
    if (!n.IsSequence()) fail(path, "expected a number or a list of numbers");
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
    if (out.empty()) fail(path, "list must not be empty");
    return out;
}

void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = n.begin(); it != n.end(); ++it) {
        const std::string k = it->first.as<std::string>();
        if (!allowed.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
    }
}

GridSpec parse_grid(const YAML::Node& n) {
    if (!n.IsMap()) fail("grid", "expected a mapping with dim, lo, hi, n");
    check_keys(n, "grid", {"dim", "lo", "hi", "n"});
    GridSpec g;
    if (!n["dim"]) fail("grid.dim", "missing required field");
    if (!n["n"]) fail("grid.n", "missing required field");
    g.dim = as_int(n["dim"], "grid.dim");
    if (g.dim != 2 && g.dim != 3) fail("grid.dim", "must be 2 or 3");
    if (n["lo"]) g.lo = as_double(n["lo"], "grid.lo");
    if (n["hi"]) g.hi = as_double(n["hi"], "grid.hi");
    if (!(g.hi > g.lo)) fail("grid.hi", "must exceed grid.lo");
    const YAML::Node nn = n["n"];
    if (nn.IsScalar()) {
        g.n.push_back(as_int(nn, "grid.n"));
    } else if (nn.IsSequence() && nn.size() > 0) {
        for (std::size_t i = 0; i < nn.size(); ++i) g.n.push_back(as_int(nn[i], "grid.n[" + std::to_string(i) + "]"));
    } else {
        fail("grid.n", "expected an integer or a nonempty list of integers");
    }
    for (int v : g.n)
        if (v < 8 || v > 512) fail("grid.n", "node counts must lie in [8, 512]");
    return g;
}

CoefficientSpec parse_coefficient(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) fail(path, "expected a mapping");
    check_keys(n, path, {"family", "target", "amplitude", "width", "centre", "compact", "matrix"});
    CoefficientSpec s;
    if (!n["family"]) fail(path + ".family", "missing required field");
    s.family = as_string(n["family"], path + ".family");
    static const std::set<std::string> families{"gaussian-bump", "anisotropic-bump", "hessian", "gradient-field"};
    if (!families.count(s.family))
        fail(path + ".family", "unknown family '" + s.family +
                                   "' (gaussian-bump, anisotropic-bump, hessian, gradient-field)");
    if (n["target"]) s.target = as_string(n["target"], path + ".target");
    if (n["amplitude"]) s.amplitude = as_double(n["amplitude"], path + ".amplitude");
    if (n["width"]) s.width = as_double(n["width"], path + ".width");
    if (!(s.width > 0.0)) fail(path + ".width", "must be positive");
    if (n["compact"]) s.compact = as_bool(n["compact"], path + ".compact");
    if (n["centre"]) {
        auto c = as_double_list(n["centre"], path + ".centre");
        if (c.size() < 2 || c.size() > 3) fail(path + ".centre", "expected 2 or 3 coordinates");
        for (std::size_t i = 0; i < c.size(); ++i) s.centre[i] = c[i];
    }
    if (s.family == "anisotropic-bump") {
        if (!n["matrix"]) fail(path + ".matrix", "missing required field for anisotropic-bump");
        const YAML::Node m = n["matrix"];
        if (!m.IsSequence() || m.size() < 2 || m.size() > 3) fail(path + ".matrix", "expected a 2x2 or 3x3 list");
        for (std::size_t i = 0; i < m.size(); ++i) {
            auto row = as_double_list(m[i], path + ".matrix[" + std::to_string(i) + "]");
            if (row.size() != m.size()) fail(path + ".matrix", "matrix must be square");
            for (std::size_t j = 0; j < row.size(); ++j) s.matrix[i][j] = row[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (s.matrix[i][j] != s.matrix[j][i]) fail(path + ".matrix", "matrix must be symmetric");
    } else if (n["matrix"]) {
        fail(path + ".matrix", "only anisotropic-bump takes a matrix");
    }
    if (s.family == "gaussian-bump") {
        const std::string& t = s.target;
        bool ok = t == "q" || t == "A";
        if (t.size() == 3 && t[0] == 'A' && t[1] >= '0' && t[1] <= '2' && t[2] >= '0' && t[2] <= '2') ok = true;
        if (t.size() == 2 && t[0] == 'B' && t[1] >= '0' && t[1] <= '2') ok = true;
        if (!ok) fail(path + ".target", "expected q, A, A<j><k> or B<j>");
    }
    return s;
}

SweepSpec parse_sweep(const YAML::Node& n) {
    if (!n.IsMap()) fail("sweep", "expected a mapping");
    check_keys(n, "sweep", {"h", "tau", "xi_max"});
    SweepSpec s;
    if (n["h"]) {
        s.h = as_double_list(n["h"], "sweep.h");
        for (double h : s.h)
            if (!(h > 0.0 && h <= 0.5)) fail("sweep.h", "values must lie in (0, 0.5]");
    }
    if (n["tau"]) {
        s.tau = as_double_list(n["tau"], "sweep.tau");
        for (double t : s.tau)
            if (!(t > 0.0)) fail("sweep.tau", "values must be positive");
    }
    if (n["xi_max"]) {
        s.xi_max = as_int(n["xi_max"], "sweep.xi_max");
        if (s.xi_max < 0) fail("sweep.xi_max", "must be nonnegative");
    }
    return s;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("<yaml>: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("<root>: expected a mapping");
    check_keys(root, "", {"experiment", "grid", "coefficients", "sweep", "output", "tol_scale", "tolerances",
                          "checks", "params"});
    ExperimentConfig c;
    c.path = path;
    if (!root["experiment"]) fail("experiment", "missing required field");
    const std::string kind = as_string(root["experiment"], "experiment");
    bool found = false;
    for (const auto& e : experiment_catalog())
        if (e.name == kind) {
            c.kind = e.kind;
            found = true;
        }
    if (!found) fail("experiment", "unknown experiment kind '" + kind + "'");

    if (!root["grid"]) fail("grid", "missing required field");
    c.grid = parse_grid(root["grid"]);

    if (root["coefficients"]) {
        const YAML::Node cs = root["coefficients"];
        if (!cs.IsSequence()) fail("coefficients", "expected a list");
        for (std::size_t i = 0; i < cs.size(); ++i)
            c.coefficients.push_back(parse_coefficient(cs[i], "coefficients[" + std::to_string(i) + "]"));
    }
    if (root["sweep"]) c.sweep = parse_sweep(root["sweep"]);
    if (root["output"]) c.out_dir = as_string(root["output"], "output");
    if (root["tol_scale"]) {
        c.tol_scale = as_double(root["tol_scale"], "tol_scale");
        if (!(c.tol_scale > 0.0)) fail("tol_scale", "must be positive");
    }
    if (root["tolerances"]) {
        const YAML::Node t = root["tolerances"];
        if (!t.IsMap()) fail("tolerances", "expected a mapping");
        for (auto it = t.begin(); it != t.end(); ++it) {
            const std::string k = it->first.as<std::string>();
            c.tolerances[k] = as_double(it->second, "tolerances." + k);
        }
    }
    if (root["checks"]) {
        const YAML::Node t = root["checks"];
        if (!t.IsSequence() || t.size() == 0) fail("checks", "expected a nonempty list of names");
        for (std::size_t i = 0; i < t.size(); ++i)
            c.checks.push_back(as_string(t[i], "checks[" + std::to_string(i) + "]"));
    }
    if (root["params"]) {
        const YAML::Node t = root["params"];
        if (!t.IsMap()) fail("params", "expected a mapping");
        for (auto it = t.begin(); it != t.end(); ++it) {
            const std::string k = it->first.as<std::string>();
            c.params[k] = as_double(it->second, "params." + k);
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

// ---- coefficient families ----

namespace {

struct BumpDerivs {
    double f = 0.0;
    Point g{0, 0, 0};
    double H[3][3]{};
};

BumpDerivs bump(const CoefficientSpec& s, const Point& x, int dim) {
    BumpDerivs d;
    Point y{0, 0, 0};
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        y[a] = x[a] - s.centre[a];
        r2 += y[a] * y[a];
    }
    const double w2 = s.width * s.width;
    if (!s.compact) {
        d.f = s.amplitude * std::exp(-r2 / (2.0 * w2));
        for (int j = 0; j < dim; ++j) {
            d.g[j] = -y[j] / w2 * d.f;
            for (int k = 0; k < dim; ++k) d.H[j][k] = (y[j] * y[k] / (w2 * w2) - (j == k ? 1.0 / w2 : 0.0)) * d.f;
        }
        return d;
    }
    const double t = 1.0 - r2 / w2;
    if (t <= 0.0) return d;
    // f = A t^4 with t = 1 - r^2/w^2
    d.f = s.amplitude * t * t * t * t;
    const double f1 = -4.0 * s.amplitude * t * t * t;  // df/ds, s = r^2 / w^2
    const double f2 = 12.0 * s.amplitude * t * t;
    for (int j = 0; j < dim; ++j) {
        d.g[j] = f1 * 2.0 * y[j] / w2;
        for (int k = 0; k < dim; ++k)
            d.H[j][k] = f2 * 4.0 * y[j] * y[k] / (w2 * w2) + (j == k ? f1 * 2.0 / w2 : 0.0);
    }
    return d;
}

}  // namespace

BuiltCoefficients build_coefficients(const Grid& g, const std::vector<CoefficientSpec>& specs) {
    BuiltCoefficients b{CoefficientSet::zeros(g), ScalarField::zeros(g), ScalarField::zeros(g),
                        ScalarField::zeros(g)};
    const int n = g.dim;
    for (const auto& s : specs) {
        for (std::size_t p = 0; p < g.size(); ++p) {
            const auto k = static_cast<Eigen::Index>(p);
            const BumpDerivs d = bump(s, g.point(p), n);
            if (d.f == 0.0 && d.g[0] == 0.0 && d.g[1] == 0.0 && d.g[2] == 0.0) continue;
            if (s.family == "gaussian-bump") {
                const std::string& t = s.target;
                if (t == "q") {
                    b.c.q.v[k] += d.f;
                } else if (t == "A") {
                    for (int j = 0; j < n; ++j) b.c.A.at(j, j)[k] += d.f;
                    b.d_sharp.v[k] += d.f;
                } else if (t[0] == 'A') {
                    b.c.A.at(t[1] - '0', t[2] - '0')[k] += d.f;
                } else {
                    b.c.B.c[t[1] - '0'][k] += d.f;
                }
            } else if (s.family == "anisotropic-bump") {
                for (int j = 0; j < n; ++j)
                    for (int l = j; l < n; ++l) b.c.A.at(j, l)[k] += s.matrix[j][l] * d.f;
            } else if (s.family == "hessian") {
                for (int j = 0; j < n; ++j)
                    for (int l = j; l < n; ++l) b.c.A.at(j, l)[k] += d.H[j][l];
                b.p.v[k] += d.f;
            } else if (s.family == "gradient-field") {
                for (int j = 0; j < n; ++j) b.c.B.c[j][k] += d.g[j];
                b.phi.v[k] += d.f;
            }
        }
        if (s.family == "anisotropic-bump" || (s.family == "gaussian-bump" && s.target != "q" && s.target != "A"))
            b.structured = false;
    }
    return b;
}

}  // namespace bihar
