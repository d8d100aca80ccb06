#include "bihar/forward.hpp"

#include "bihar/errors.hpp"

#include <Eigen/UmfPackSupport>

#include <cmath>
#include <numbers>

namespace bihar {

namespace {
const cplx I1(0.0, 1.0);

CVec conj(const CVec& v) { return v.conjugate(); }

// D_j f = -i d_j f with the finite-difference stencils.
CVec Dj(const Grid& g, const CVec& f, int j) { return -I1 * d1(g, f, j); }
}  // namespace

CoefficientSet CoefficientSet::zeros(const Grid& g) {
    return {SymMatrixField::zeros(g), VectorField::zeros(g), ScalarField::zeros(g)};
}

double CoefficientSet::max_abs() const {
    const int n = grid().dim;
    double m = q.v.cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j) {
        m = std::max(m, B.c[j].cwiseAbs().maxCoeff());
        for (int k = j; k < n; ++k) m = std::max(m, A.at(j, k).cwiseAbs().maxCoeff());
    }
    return m;
}

void check_support(const CoefficientSet& c, const DomainMask& mask) {
    require_same_grid(c.grid(), mask.grid, "check_support");
    const int n = c.grid().dim;
    const double tol = 1e-12 * std::max(1.0, c.max_abs());
    for (std::size_t p = 0; p < c.grid().size(); ++p) {
        if (mask.inside[p]) continue;
        double m = std::abs(c.q.v[p]);
        for (int j = 0; j < n; ++j) {
            m = std::max(m, std::abs(c.B.c[j][p]));
            for (int k = j; k < n; ++k) m = std::max(m, std::abs(c.A.at(j, k)[p]));
        }
        if (m > tol) throw ExtentError("coefficients do not vanish outside the domain mask");
    }
}

SpMat lower_order_matrix(const CoefficientSet& c) {
    const Grid& g = c.grid();
    SpMat L = diag_matrix(c.q.v);
    for (int j = 0; j < g.dim; ++j) {
        if (c.B.c[j].cwiseAbs().maxCoeff() > 0)
            L += diag_matrix(-I1 * c.B.c[j]) * d1_matrix(g, j);
        for (int k = 0; k < g.dim; ++k) {
            const CVec& a = c.A.at(j, k);
            if (a.cwiseAbs().maxCoeff() > 0) L += diag_matrix(-a) * d11_matrix(g, j, k);
        }
    }
    return L;
}

SpMat assemble_operator(const CoefficientSet& c) {
    SpMat lap = laplacian_matrix(c.grid());
    SpMat L = lap * lap;
    L += lower_order_matrix(c);
    return L;
}

CVec apply_operator(const CoefficientSet& c, const CVec& u) {
    const Grid& g = c.grid();
    CVec out = bilaplacian(g, u) + c.q.v.cwiseProduct(u);
    for (int j = 0; j < g.dim; ++j) {
        out += (-I1 * c.B.c[j]).cwiseProduct(d1(g, u, j));
        for (int k = 0; k < g.dim; ++k) out -= c.A.at(j, k).cwiseProduct(d11(g, u, j, k));
    }
    return out;
}

struct NavierSolver::Impl {
    SpMat m;  // UmfPackLU keeps pointers into the matrix it factorised
    Eigen::UmfPackLU<SpMat> lu;
};

NavierSolver::NavierSolver(const CoefficientSet& c, const DomainMask& mask)
    : mask_(mask), impl_(std::make_unique<Impl>()) {
    const Grid& g = mask.grid;
    require_same_grid(c.grid(), g, "NavierSolver");
    check_support(c, mask);
    inside_ = mask.inside_nodes();
    boundary_ = mask.boundary_nodes();
    slot_.assign(g.size(), -1);
    bslot_.assign(g.size(), -1);
    for (std::size_t i = 0; i < inside_.size(); ++i) slot_[inside_[i]] = static_cast<long>(i);
    for (std::size_t i = 0; i < boundary_.size(); ++i) bslot_[boundary_[i]] = static_cast<long>(i);

    const long Ni = static_cast<long>(inside_.size());
    const long Nb = static_cast<long>(boundary_.size());
    SpMat lap = laplacian_matrix(g);
    SpMat low = lower_order_matrix(c);
    SpMat lapR = SpMat(lap.transpose());  // rows as columns for fast row access
    SpMat lowR = SpMat(low.transpose());

    std::vector<Eigen::Triplet<cplx>> tr, tu, tw;
    for (long i = 0; i < Ni; ++i) {
        const auto p = static_cast<Eigen::Index>(inside_[i]);
        // row i:      -Lap u - w = 0
        // row Ni + i: -Lap w + low(u) = rhs
        for (SpMat::InnerIterator it(lapR, p); it; ++it) {
            const auto q = static_cast<std::size_t>(it.row());
            if (slot_[q] >= 0) {
                tr.emplace_back(i, slot_[q], -it.value());
                tr.emplace_back(Ni + i, Ni + slot_[q], -it.value());
            } else if (bslot_[q] >= 0) {
                tu.emplace_back(i, bslot_[q], -it.value());
                tw.emplace_back(Ni + i, bslot_[q], -it.value());
            } else {
                throw ShapeError("NavierSolver: Laplace stencil leaves the domain mask");
            }
        }
        tr.emplace_back(i, Ni + i, -1.0);
        for (SpMat::InnerIterator it(lowR, p); it; ++it) {
            if (it.value() == 0.0) continue;
            const auto q = static_cast<std::size_t>(it.row());
            if (slot_[q] >= 0)
                tr.emplace_back(Ni + i, slot_[q], it.value());
            else if (bslot_[q] >= 0)
                tu.emplace_back(Ni + i, bslot_[q], it.value());
            else
                throw ExtentError("coefficients must vanish next to the boundary layer");
        }
    }
    SpMat M(2 * Ni, 2 * Ni);
    M.setFromTriplets(tr.begin(), tr.end());
    couple_u_bnd_.resize(2 * Ni, Nb);
    couple_u_bnd_.setFromTriplets(tu.begin(), tu.end());
    couple_w_bnd_.resize(2 * Ni, Nb);
    couple_w_bnd_.setFromTriplets(tw.begin(), tw.end());

    M.makeCompressed();
    impl_->m = std::move(M);
    impl_->lu.compute(impl_->m);
    // UMFPACK reports an exactly singular pivot as a warning, which Eigen maps
    // to NumericalIssue.
    if (impl_->lu.info() != Eigen::Success)
        throw SolverError("Navier system is singular: zero is a discrete eigenvalue");
}

NavierSolver::~NavierSolver() = default;

NavierSolver::Solution NavierSolver::solve(const NavierBoundaryData& bc,
                                           const ScalarField& rhs) const {
    const Grid& g = mask_.grid;
    require_same_grid(rhs.grid, g, "NavierSolver::solve");
    const long Ni = static_cast<long>(inside_.size());
    if (bc.f0.size() != static_cast<Eigen::Index>(boundary_.size()) ||
        bc.f1.size() != static_cast<Eigen::Index>(boundary_.size()))
        throw ShapeError("NavierSolver::solve: boundary data has the wrong length");
    CVec b = CVec::Zero(2 * Ni);
    for (long i = 0; i < Ni; ++i) b[Ni + i] = rhs.v[static_cast<Eigen::Index>(inside_[i])];
    b -= couple_u_bnd_ * bc.f0;
    b -= couple_w_bnd_ * bc.f1;
    CVec x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("Navier solve failed");
    Solution s{ScalarField::zeros(g), ScalarField::zeros(g)};
    for (long i = 0; i < Ni; ++i) {
        s.u.v[static_cast<Eigen::Index>(inside_[i])] = x[i];
        s.w.v[static_cast<Eigen::Index>(inside_[i])] = x[Ni + i];
    }
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
        s.u.v[static_cast<Eigen::Index>(boundary_[i])] = bc.f0[static_cast<Eigen::Index>(i)];
        s.w.v[static_cast<Eigen::Index>(boundary_[i])] = bc.f1[static_cast<Eigen::Index>(i)];
    }
    return s;
}

ScalarField solve_navier(const CoefficientSet& c, const DomainMask& mask,
                         const NavierBoundaryData& bc, const ScalarField& rhs) {
    NavierSolver s(c, mask);
    return s.solve(bc, rhs).u;
}

NavierBoundaryData navier_traces(const DomainMask& mask, const CVec& u) {
    const Grid& g = mask.grid;
    CVec w = -laplacian(g, u);
    auto nodes = mask.boundary_nodes();
    NavierBoundaryData d{CVec(nodes.size()), CVec(nodes.size())};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        d.f0[static_cast<Eigen::Index>(i)] = u[static_cast<Eigen::Index>(nodes[i])];
        d.f1[static_cast<Eigen::Index>(i)] = w[static_cast<Eigen::Index>(nodes[i])];
    }
    return d;
}

CVec normal_derivative(const DomainMask& mask, const CVec& f) {
    if (!mask.is_box) throw ParameterError("normal_derivative: only box masks are supported");
    const Grid& g = mask.grid;
    auto nodes = mask.boundary_nodes();
    CVec out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t p = nodes[i];
        const int a = mask.normal_axis[p];
        const int s = mask.normal[p][a] > 0 ? 1 : -1;
        const auto st = static_cast<std::ptrdiff_t>(g.stride(a)) * s;
        const auto pp = static_cast<std::ptrdiff_t>(p);
        out[static_cast<Eigen::Index>(i)] = (3.0 * f[pp] - 4.0 * f[pp - st] + f[pp - 2 * st]) / (2.0 * g.dx(a));
    }
    return out;
}

DNMatrix dn_map(const CoefficientSet& c, const DomainMask& mask,
                const std::vector<NavierBoundaryData>& basis) {
    NavierSolver solver(c, mask);
    DNMatrix dn;
    dn.boundary = mask.boundary_nodes();
    const auto Nb = static_cast<Eigen::Index>(dn.boundary.size());
    dn.m.resize(2 * Nb, static_cast<Eigen::Index>(basis.size()));
    ScalarField zero = ScalarField::zeros(mask.grid);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        auto s = solver.solve(basis[k], zero);
        dn.m.col(static_cast<Eigen::Index>(k)) << normal_derivative(mask, s.u.v),
            normal_derivative(mask, s.w.v);
    }
    return dn;
}

std::vector<NavierBoundaryData> sine_mode_basis(const DomainMask& mask, int count) {
    if (!mask.is_box) throw ParameterError("sine_mode_basis: only box masks are supported");
    const Grid& g = mask.grid;
    auto nodes = mask.boundary_nodes();
    const auto Nb = static_cast<Eigen::Index>(nodes.size());
    // mode list (k1, k2) ordered by k1 + k2
    std::vector<std::array<int, 2>> modes;
    for (int s = 1; static_cast<int>(modes.size()) < count; ++s) {
        if (g.dim == 2) {
            modes.push_back({s, 0});
            continue;
        }
        for (int k1 = 1; k1 <= s && static_cast<int>(modes.size()) < count; ++k1)
            if (s + 1 - k1 >= 1) modes.push_back({k1, s + 1 - k1});
    }
    std::vector<NavierBoundaryData> out;
    for (int a = 0; a < g.dim; ++a) {
        for (int side : {-1, 1}) {
            for (auto mode : modes) {
                CVec v = CVec::Zero(Nb);
                for (Eigen::Index i = 0; i < Nb; ++i) {
                    const std::size_t p = nodes[static_cast<std::size_t>(i)];
                    if (mask.normal_axis[p] != a || (mask.normal[p][a] > 0 ? 1 : -1) != side) continue;
                    auto idx = g.unravel(p);
                    double val = 1.0;
                    int m = 0;
                    for (int b = 0; b < g.dim; ++b) {
                        if (b == a) continue;
                        double t = double(idx[b] - mask.box_lo[b]) / (mask.box_hi[b] - mask.box_lo[b]);
                        val *= std::sin(mode[m++] * std::numbers::pi * t);
                    }
                    v[i] = val;
                }
                out.push_back({v, CVec::Zero(Nb)});
                out.push_back({CVec::Zero(Nb), v});
            }
        }
    }
    return out;
}

cplx boundary_pairing(const DomainMask& mask, const CVec& f0, const CVec& f1,
                      const CVec& g0, const CVec& g1) {
    const Grid& g = mask.grid;
    auto nodes = mask.boundary_nodes();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t p = nodes[i];
        double ds = 1.0;
        for (int b = 0; b < g.dim; ++b)
            if (b != mask.normal_axis[p]) ds *= g.dx(b);
        const auto k = static_cast<Eigen::Index>(i);
        acc += (f0[k] * g1[k] + f1[k] * g0[k]) * ds;
    }
    return acc;
}

CoefficientSet adjoint_coefficients(const CoefficientSet& c) {
    const Grid& g = c.grid();
    CoefficientSet s = CoefficientSet::zeros(g);
    for (int j = 0; j < g.dim; ++j)
        for (int k = j; k < g.dim; ++k) s.A.at(j, k) = conj(c.A.at(j, k));
    s.q.v = conj(c.q.v);
    for (int k = 0; k < g.dim; ++k) {
        s.B.c[k] = conj(c.B.c[k]);
        for (int j = 0; j < g.dim; ++j) s.B.c[k] += 2.0 * Dj(g, conj(c.A.at(j, k)), j);
    }
    for (int j = 0; j < g.dim; ++j) {
        s.q.v += Dj(g, conj(c.B.c[j]), j);
        for (int k = 0; k < g.dim; ++k) s.q.v += -d11(g, conj(c.A.at(j, k)), j, k);
    }
    return s;
}

namespace {

// offset of grid `small` inside `big` in nodes, or throws.
std::array<int, 3> lattice_offset(const Grid& small, const Grid& big) {
    if (small.dim != big.dim) throw ExtentError("grids have different dimension");
    std::array<int, 3> off{0, 0, 0};
    for (int a = 0; a < small.dim; ++a) {
        const double h = big.dx(a);
        if (std::abs(small.dx(a) - h) > 1e-12 * h) throw ExtentError("grids have different spacing");
        const double o = (small.lo[a] - big.lo[a]) / h;
        off[a] = static_cast<int>(std::lround(o));
        if (std::abs(o - off[a]) > 1e-9) throw ExtentError("grid nodes are not aligned");
        if (off[a] < 0 || off[a] + small.n[a] > big.n[a])
            throw ExtentError("smaller grid is not contained in the bigger one");
    }
    return off;
}

CVec copy_into(const Grid& from, const Grid& to, const CVec& v, const std::array<int, 3>& off,
               bool extend) {
    CVec out = CVec::Zero(static_cast<Eigen::Index>(to.size()));
    const Grid& small = extend ? from : to;
    for (std::size_t p = 0; p < small.size(); ++p) {
        auto i = small.unravel(p);
        std::size_t q = (extend ? to : from).index(i[0] + off[0], i[1] + off[1], i[2] + off[2]);
        if (extend)
            out[static_cast<Eigen::Index>(q)] = v[static_cast<Eigen::Index>(p)];
        else
            out[static_cast<Eigen::Index>(p)] = v[static_cast<Eigen::Index>(q)];
    }
    return out;
}

CoefficientSet transfer(const CoefficientSet& c, const Grid& target, bool extend) {
    const Grid& from = c.grid();
    auto off = extend ? lattice_offset(from, target) : lattice_offset(target, from);
    CoefficientSet s = CoefficientSet::zeros(target);
    for (auto& v : s.A.c) v = CVec::Zero(static_cast<Eigen::Index>(target.size()));
    for (int j = 0; j < from.dim; ++j) {
        s.B.c[j] = copy_into(from, target, c.B.c[j], off, extend);
        for (int k = j; k < from.dim; ++k) s.A.at(j, k) = copy_into(from, target, c.A.at(j, k), off, extend);
    }
    s.q.v = copy_into(from, target, c.q.v, off, extend);
    return s;
}

}  // namespace

CoefficientSet extend_coefficients(const CoefficientSet& c, const Grid& bigger) {
    return transfer(c, bigger, true);
}

CoefficientSet restrict_coefficients(const CoefficientSet& c, const Grid& smaller) {
    return transfer(c, smaller, false);
}

}  // namespace bihar
