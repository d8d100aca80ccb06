// Runs the eleven acceptance criteria at their pinned settings and prints one
// line per criterion.  Exit status is nonzero if any criterion fails.

#include "bihar/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace bihar;

namespace {

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<ExperimentResult()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "gauge identity order, 2-D and 3-D, 32 -> 64", 60, [] { return run_gauge_order(); }},
        {2, "gauge trace invariance <= 1e-12", 10, [] { return run_gauge_traces(); }},
        {3, "CGO amplitude ||rho|| ~ tau, slope in [0.8, 1.2]", 60, [] { return run_amplitude_decay(); }},
        {4, "remainder ||r|| ~ h^2, slope in [1.7, 2.3]", 300, [] { return run_remainder_decay(); }},
        {5, "Carleman sigma_min/tau ratio < 3, potential degradation < 50%", 120, [] { return run_carleman(); }},
        {6, "isotropic null contraction <= 1e-12", 10, [] { return run_null_contraction(); }},
        {7, "tensor decomposition round trip, div F, dense oracle", 60, [] { return run_tensor_decomposition(); }},
        {8, "projection symbol and Riesz composition", 10, [] { return run_projection_identity(); }},
        {9, "oracle reconstruction d_sharp, dq within 5%, flags pass", 300,
         [] { return run_oracle_reconstruction(); }},
        {10, "boundary moment within 10% of the volume oracle, improving", 600,
         [] { return run_boundary_moment(); }},
        {11, "forward order in [1.7, 2.3], Green symmetry <= discretisation", 120,
         [] { return run_forward_order(); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        std::string detail;
        try {
            const ExperimentResult r = c.run();
            ok = r.passed();
            for (const auto& k : r.checks) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s%s=%.3g%s", detail.empty() ? "" : ", ", k.name.c_str(), k.value,
                              k.passed ? "" : "(!)");
                detail += buf;
            }
        } catch (const std::exception& e) {
            detail = std::string("error: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt <= c.budget_s;
        if (!in_time) detail += ", over the time budget";
        ok = ok && in_time;
        if (!ok) ++failed;
        std::printf("criterion %2d %s  %s  [%.1fs]  %s\n", c.id, ok ? "PASS" : "FAIL", c.title, dt, detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
