#include "qfdiv/dmin_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qfdiv {

namespace {

using cd = std::complex<double>;

constexpr std::array<std::pair<SolverPath, std::string_view>, 8> kPathNames{{
    {SolverPath::infinite, "infinite"},
    {SolverPath::commuting_classical, "commuting_classical"},
    {SolverPath::closed_form_f2, "closed_form_f2"},
    {SolverPath::closed_form_fidelity, "closed_form_fidelity"},
    {SolverPath::closed_form_tv, "closed_form_tv"},
    {SolverPath::pure_state, "pure_state"},
    {SolverPath::generic_gradient, "generic_gradient"},
    {SolverPath::swapped_generic, "swapped_generic"},
}};

ScalarMap conj_map(const DivergenceGenerator& f)
{
    return {[f](double t) { return f.conj(t); }, [f](double t) { return f.conj_prime(t); }, f.conj_domain()};
}

DensityOperator compress(const DensityOperator& r, const Matrix& iso)
{
    return DensityOperator(hermitian_part(iso.adjoint() * r.matrix() * iso));
}

Matrix join_columns(const Matrix& a, const Matrix& b)
{
    Matrix u(a.rows(), a.cols() + b.cols());
    u << a, b;
    return u;
}

double frob_inner(const Matrix& a, const Matrix& b)
{
    // tr(A B) for Hermitian A, B
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

DivergenceResult infinite_result()
{
    DivergenceResult r;
    r.value = kInf;
    r.finite = false;
    r.path = SolverPath::infinite;
    return r;
}

DivergenceResult finite_result(double value, SolverPath path)
{
    DivergenceResult r;
    r.value = value;
    r.finite = true;
    r.path = path;
    return r;
}

std::string num(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// ---- commuting inputs ----------------------------------------------------

Matrix joint_eigenbasis(const DensityOperator& rho1, const DensityOperator& rho2)
{
    const Spectrum& s2 = rho2.spectrum();
    const Eigen::Index n = rho2.dim();
    Matrix basis(n, n);
    const double gap = 1e-9 * std::max(1.0, rho2.max_eigenvalue());
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && s2.values(end) - s2.values(end - 1) <= gap) ++end;
        Matrix block = s2.vectors.middleCols(start, end - start);
        if (end - start == 1) {
            basis.col(start) = block.col(0);
        } else {
            Spectrum inner = hermitian_spectrum(hermitian_part(block.adjoint() * rho1.matrix() * block));
            basis.middleCols(start, end - start) = block * inner.vectors;
        }
        start = end;
    }
    return basis;
}

std::pair<DiscreteMeasure, DiscreteMeasure> diagonal_measures(const Matrix& basis, const DensityOperator& rho1,
                                                              const DensityOperator& rho2)
{
    std::vector<double> p(basis.cols()), q(basis.cols());
    for (Eigen::Index k = 0; k < basis.cols(); ++k) {
        p[k] = std::max(0.0, (basis.col(k).adjoint() * rho1.matrix() * basis.col(k))(0).real());
        q[k] = std::max(0.0, (basis.col(k).adjoint() * rho2.matrix() * basis.col(k))(0).real());
    }
    return {DiscreteMeasure(std::move(p)), DiscreteMeasure(std::move(q))};
}

DivergenceResult solve_commuting(const DivergenceGenerator& f, const DensityOperator& rho1,
                                 const DensityOperator& rho2)
{
    Matrix basis = joint_eigenbasis(rho1, rho2);
    auto [p, q] = diagonal_measures(basis, rho1, rho2);
    double v = classical_df(f, p, q);
    DivergenceResult r = std::isinf(v) && v > 0 ? infinite_result() : finite_result(v, SolverPath::commuting_classical);
    r.optimal_basis = basis;
    return r;
}

// ---- closed forms ----------------------------------------------------------

DivergenceResult solve_f2(const DensityOperator& rho1, const DensityOperator& rho2)
{
    DivergenceResult r = finite_result(chi2_closed_form(rho1, rho2), SolverPath::closed_form_f2);
    if (!support_contained(rho1, rho2)) return infinite_result();
    HermitianOperator t0 = solve_sylvester_symmetric(rho2, HermitianOperator(4.0 * rho1.matrix()));
    r.optimal_basis = t0.spectrum().vectors;
    r.optimizer_T = t0;
    return r;
}

DivergenceResult solve_fidelity(const DensityOperator& rho1, const DensityOperator& rho2)
{
    DivergenceResult r = finite_result(-fidelity(rho1, rho2), SolverPath::closed_form_fidelity);
    if (rho1.full_rank() && rho2.full_rank()) {
        // M rho2 M = rho1, and T0 = -M^{-1}/2
        Matrix s = rho2.power(0.5);
        Matrix si = rho2.power(-0.5);
        DensityOperator inner(hermitian_part(s * rho1.matrix() * s));
        Matrix m = hermitian_part(si * inner.power(0.5) * si);
        Spectrum ms = hermitian_spectrum(m);
        r.optimal_basis = ms.vectors;
        r.optimizer_T = HermitianOperator(hermitian_part(apply_function(ms, [](double x) { return -0.5 / x; })));
    }
    return r;
}

DivergenceResult solve_tv(const DensityOperator& rho1, const DensityOperator& rho2)
{
    HermitianOperator diff(rho1.matrix() - rho2.matrix());
    Spectrum s = diff.spectrum();
    DivergenceResult r = finite_result(s.values.cwiseAbs().sum(), SolverPath::closed_form_tv);
    r.optimal_basis = s.vectors;
    r.optimizer_T = HermitianOperator(hermitian_part(apply_function(s, [](double x) {
        return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    })));
    return r;
}

DivergenceResult solve_rank_one(const DivergenceGenerator& f, const DensityOperator& rho1,
                                const DensityOperator& rho2)
{
    const Eigen::Index n = rho1.dim();
    Vector phi = rho1.eigenvectors().col(n - 1);
    double c = rho1.eigenvalues()(n - 1);
    double q = std::max(0.0, (phi.adjoint() * rho2.matrix() * phi)(0).real());
    double v = g_eval(f, c, q) + f.f_at_zero() * (rho2.trace() - q);
    DivergenceResult r = std::isinf(v) && v > 0 ? infinite_result() : finite_result(v, SolverPath::pure_state);
    r.optimal_basis = rho1.eigenvectors();
    return r;
}

// ---- projected gradient ascent -------------------------------------------------

struct AscentOutcome {
    Spectrum t;
    double value = 0;
    double residual = 0;
    double grad_norm = 0;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;
};

AscentOutcome projected_ascent(const DivergenceGenerator& f, const DensityOperator& rho1,
                               const DensityOperator& rho2, double lo, double hi, const SolveOptions& opts)
{
    const ScalarMap h = conj_map(f);
    const Eigen::Index n = rho1.dim();

    struct Point {
        Spectrum s;
        Matrix t;
        double value;
        Matrix grad;
    };

    auto project = [&](const Matrix& x) {
        Spectrum s = hermitian_spectrum(hermitian_part(x));
        for (Eigen::Index i = 0; i < n; ++i) s.values(i) = std::clamp(s.values(i), lo, hi);
        return s;
    };
    auto evaluate = [&](Spectrum s) {
        const Matrix& v = s.vectors;
        Matrix r1e = v.adjoint() * rho1.matrix() * v;
        Matrix r2e = v.adjoint() * rho2.matrix() * v;
        double value = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            value += s.values(i) * r1e(i, i).real() - f.conj(s.values(i)) * r2e(i, i).real();
        RealMatrix dd = divided_differences(h, s.values);
        Matrix ge = r1e - r2e.cwiseProduct(dd.cast<cd>());
        Point p{s, compose(s), value, hermitian_part(v * ge * v.adjoint())};
        return p;
    };

    double start = std::clamp(f.f_prime_at_one(), lo, hi);
    Point cur = evaluate(project(start * Matrix::Identity(n, n)));

    // f*'' by a one-sided difference of f*' that stays inside [lo, hi]
    auto second = [&](double t) {
        double d = 1e-6 * (1 + std::abs(t));
        double a = t + d <= hi ? t : t - d;
        return (f.conj_prime(a + d) - f.conj_prime(a)) / d;
    };
    // Newton-like direction: gradient entries divided by the diagonal of the Hessian in T's eigenbasis
    auto scaled_direction = [&](const Point& p, Matrix& dir) {
        const RealVector& t = p.s.values;
        const Matrix& v = p.s.vectors;
        Matrix ge = v.adjoint() * p.grad * v;
        Matrix r2e = v.adjoint() * rho2.matrix() * v;
        RealVector d1(n), d2(n);
        for (Eigen::Index i = 0; i < n; ++i) d1(i) = f.conj_prime(t(i)), d2(i) = second(t(i));
        auto dd2 = [&](Eigen::Index i, Eigen::Index j) {
            // h[t_i, t_i, t_j]
            double gap = t(j) - t(i);
            if (std::abs(gap) < 1e-7 * (1 + std::abs(t(i)) + std::abs(t(j)))) return 0.25 * (d2(i) + d2(j));
            return ((f.conj(t(j)) - f.conj(t(i))) / gap - d1(i)) / gap;
        };
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) {
                double c = i == j ? r2e(i, i).real() * d2(i)
                                  : r2e(i, i).real() * dd2(i, j) + r2e(j, j).real() * dd2(j, i);
                if (!std::isfinite(c) || c <= 0) return false;
                ge(i, j) /= c;
                if (i != j) ge(j, i) = std::conj(ge(i, j));
            }
        dir = hermitian_part(v * ge * v.adjoint());
        return dir.allFinite();
    };
    auto armijo = [&](const Point& from, const Matrix& dir, double a, int tries, Point& to) {
        double slack = 1e-14 * (1 + std::abs(from.value));
        for (int k = 0; k < tries; ++k) {
            to = evaluate(project(from.t + a * dir));
            double lin = frob_inner(from.grad, to.t - from.t);
            if (lin >= 0 && to.value >= from.value + 1e-4 * lin - slack) return true;
            a *= 0.5;
        }
        return false;
    };

    AscentOutcome out;
    double step = 1.0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        Spectrum full = project(cur.t + cur.grad);
        out.residual = (compose(full) - cur.t).norm();
        if (out.residual <= opts.tol) {
            out.converged = true;
            break;
        }
        Point next;
        Matrix dir;
        bool accepted = scaled_direction(cur, dir) && armijo(cur, dir, 1.0, 30, next) && next.value > cur.value;
        if (!accepted) accepted = armijo(cur, cur.grad, step, 80, next);
        if (!accepted) {
            out.stalled = true;
            break;
        }
        Matrix ds = next.t - cur.t;
        Matrix dy = next.grad - cur.grad;
        double sy = -frob_inner(ds, dy);
        double ss = ds.squaredNorm();
        step = (sy > 0 && ss > 0) ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
        cur = std::move(next);
    }
    if (!out.converged && !out.stalled) {
        Spectrum full = project(cur.t + cur.grad);
        out.residual = (compose(full) - cur.t).norm();
        out.converged = out.residual <= opts.tol;
    }
    out.t = cur.s;
    out.value = cur.value;
    out.grad_norm = cur.grad.norm();
    out.iterations = it;
    return out;
}

double box_end(const DivergenceGenerator& f, double end, bool is_lower)
{
    const Interval& dom = f.conj_domain();
    double dom_end = is_lower ? dom.lower : dom.upper;
    bool dom_closed = is_lower ? dom.lower_closed : dom.upper_closed;
    if (end != dom_end) return end;
    if (!std::isfinite(end)) return end;
    double d = f.conj_prime(end);
    if (dom_closed && std::isfinite(d)) return end;
    double eps = 1e-8 * (1 + std::abs(end));
    return is_lower ? end + eps : end - eps;
}

// Generic solve on a problem whose joint support is the whole space.
DivergenceResult generic_on_joint_support(const DivergenceGenerator& f, const DensityOperator& rho1,
                                          const DensityOperator& rho2, const SolveOptions& opts)
{
    DensityOperator r1 = rho1;
    DensityOperator r2 = rho2;
    double constant = 0;
    std::optional<Matrix> iso;
    if (!rho1.full_rank() && kernel_hypotheses_hold(f)) {
        KernelReduction kr = kernel_reduce(f, rho1, rho2);
        r1 = kr.rho1;
        r2 = kr.rho2;
        constant = kr.constant;
        iso = kr.isometry;
    }

    DivergenceResult res = finite_result(0.0, SolverPath::generic_gradient);

    if (r2.rank() == 0) {
        // nothing of rho2 survives: only the recession term remains
        res.value = g_eval(f, r1.trace(), 0.0) + constant;
        if (std::isinf(res.value)) return infinite_result();
        return res;
    }

    SpectralBounds b = spectral_bounds(f, r1, r2);
    const Interval& dom = f.conj_domain();
    double lo = box_end(f, std::max(b.t_star_prime, dom.lower), true);
    double hi = box_end(f, std::min(b.t_star, dom.upper), false);
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw PreconditionError("solve_generic: spectral box is unbounded; the supremum is not attained");
    if (lo > hi) lo = hi;

    if (!r2.full_rank())
        res.warnings.push_back("rho2 has a kernel: generic path without an optimality certificate");

    AscentOutcome a = projected_ascent(f, r1, r2, lo, hi, opts);
    res.value = a.value + constant;
    res.iterations = a.iterations;
    res.gradient_residual = a.residual;
    res.converged = a.converged;
    if (!a.converged)
        res.warnings.push_back("projected gradient ascent did not converge (residual " + num(a.residual) + ")");

    // value identity f = f** at an interior stationary point
    bool interior = a.grad_norm <= 1e-6;
    for (Eigen::Index i = 0; i < a.t.values.size() && interior; ++i) {
        double t = a.t.values(i);
        interior = (!dom.bounded_below() || t > dom.lower + 1e-8 * (1 + std::abs(dom.lower))) &&
                   (!dom.bounded_above() || t < dom.upper - 1e-8 * (1 + std::abs(dom.upper)));
    }
    if (interior) {
        Matrix r2e = a.t.vectors.adjoint() * r2.matrix() * a.t.vectors;
        double alt = 0;
        for (Eigen::Index i = 0; i < a.t.values.size(); ++i)
            alt += f.f(f.conj_prime(a.t.values(i))) * r2e(i, i).real();
        res.value_identity_gap = std::abs(alt - a.value);
        if (*res.value_identity_gap > 1e-7 * std::max(1.0, std::abs(a.value)))
            res.warnings.push_back("value identity check off by " + num(*res.value_identity_gap));
    }

    if (iso) {
        Matrix k = rho1.kernel_basis();
        res.optimal_basis = join_columns(*iso * a.t.vectors, k);
    } else {
        res.optimal_basis = a.t.vectors;
        res.optimizer_T = HermitianOperator(hermitian_part(compose(a.t)));
    }
    return res;
}

// ---- dispatch ------------------------------------------------------------------

DivergenceResult dispatch(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                          const SolveOptions& opts, bool allow_swap);

DivergenceResult from_swapped(const DivergenceGenerator& f, DivergenceResult inner)
{
    DivergenceResult r = std::move(inner);
    r.swapped = true;
    if (r.path == SolverPath::generic_gradient) r.path = SolverPath::swapped_generic;
    if (r.optimizer_T) {
        // S0 of the reversed problem maps back through T = -hat(f)*(S)
        DivergenceGenerator fh = hat(f);
        Spectrum s = r.optimizer_T->spectrum();
        bool ok = true;
        for (Eigen::Index i = 0; i < s.values.size(); ++i) {
            double v = -fh.conj(s.values(i));
            ok = ok && std::isfinite(v);
            s.values(i) = v;
        }
        r.optimizer_T.reset();
        if (ok) r.optimizer_T = HermitianOperator(hermitian_part(compose(s)));
    }
    return r;
}

DivergenceResult swap_solve(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                            const SolveOptions& opts, bool generic_only)
{
    DivergenceGenerator fh = hat(f);
    SolveOptions inner_opts = opts;
    inner_opts.force_path.reset();
    DivergenceResult inner = generic_only ? generic_on_joint_support(fh, rho2, rho1, inner_opts)
                                          : dispatch(fh, rho2, rho1, inner_opts, false);
    return from_swapped(f, std::move(inner));
}

void require(bool ok, const std::string& msg)
{
    if (!ok) throw PreconditionError(msg);
}

DivergenceResult forced(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                        const SolveOptions& opts)
{
    const std::string name(to_string(*opts.force_path));
    switch (*opts.force_path) {
    case SolverPath::commuting_classical:
        require(commuting(rho1, rho2), "force_path " + name + ": inputs do not commute");
        return solve_commuting(f, rho1, rho2);
    case SolverPath::closed_form_f2:
        if (families::is_renyi(f, 2.0)) return solve_f2(rho1, rho2);
        require(families::is_renyi(f, -1.0), "force_path " + name + ": family is not renyi(2) or renyi(-1)");
        return from_swapped(f, solve_f2(rho2, rho1));
    case SolverPath::closed_form_fidelity:
        require(families::is_renyi(f, 0.5), "force_path " + name + ": family is not renyi(0.5)");
        return solve_fidelity(rho1, rho2);
    case SolverPath::closed_form_tv:
        require(f.name() == "tv", "force_path " + name + ": family is not tv");
        return solve_tv(rho1, rho2);
    case SolverPath::pure_state:
        require(rho1.rank() == 1 && kernel_hypotheses_hold(f),
                "force_path " + name + ": needs rank-one rho1 and the kernel-reduction hypotheses");
        return solve_rank_one(f, rho1, rho2);
    case SolverPath::generic_gradient:
        require(f.cond_I(), "force_path " + name + ": family does not satisfy cond_I");
        return generic_on_joint_support(f, rho1, rho2, opts);
    case SolverPath::swapped_generic:
        require(f.cond_II(), "force_path " + name + ": family does not satisfy cond_II");
        return swap_solve(f, rho1, rho2, opts, true);
    case SolverPath::infinite:
        break;
    }
    throw PreconditionError("force_path " + name + " cannot be forced");
}

DivergenceResult dispatch(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                          const SolveOptions& opts, bool allow_swap)
{
    if (opts.force_path) return forced(f, rho1, rho2, opts);

    if (commuting(rho1, rho2)) return solve_commuting(f, rho1, rho2);

    if (families::is_renyi(f, 2.0)) return solve_f2(rho1, rho2);
    if (families::is_renyi(f, -1.0)) return from_swapped(f, solve_f2(rho2, rho1));
    if (families::is_renyi(f, 0.5)) return solve_fidelity(rho1, rho2);
    if (f.name() == "tv") return solve_tv(rho1, rho2);

    if (rho1.rank() == 1 && kernel_hypotheses_hold(f)) return solve_rank_one(f, rho1, rho2);

    if (f.cond_I()) {
        if (allow_swap && !rho2.full_rank() && f.cond_II() && kernel_hypotheses_hold(hat(f)))
            return swap_solve(f, rho1, rho2, opts, false);
        DivergenceResult r = generic_on_joint_support(f, rho1, rho2, opts);
        if (!r.converged && allow_swap && f.cond_II()) {
            // flat f* far out (e.g. renyi alpha < 0) stalls the direct ascent; the reversed problem is a lower bound too
            DivergenceResult s = swap_solve(f, rho1, rho2, opts, false);
            if (s.converged || s.value > r.value) {
                s.warnings.insert(s.warnings.begin(), "direct ascent did not converge (value " + num(r.value) +
                                                          "); reported the reversed problem");
                return s;
            }
        }
        return r;
    }
    if (f.cond_II() && allow_swap) return swap_solve(f, rho1, rho2, opts, false);
    throw UnsupportedFamilyError("family '" + f.name() + "' satisfies neither cond_I nor cond_II");
}

void lift(DivergenceResult& r, const Matrix& iso, const Matrix& complement)
{
    if (r.optimal_basis) r.optimal_basis = join_columns(iso * *r.optimal_basis, complement);
    if (r.optimizer_T) {
        Spectrum s = r.optimizer_T->spectrum();
        double fill = s.values.size() ? s.values.minCoeff() : 0.0;
        Matrix t = iso * r.optimizer_T->matrix() * iso.adjoint() +
                   fill * complement * complement.adjoint();
        r.optimizer_T = HermitianOperator(hermitian_part(t));
    }
}

void check_dims(const DensityOperator& rho1, const DensityOperator& rho2)
{
    if (rho1.dim() != rho2.dim())
        throw InputError("rho1 and rho2 have different dimensions (" + std::to_string(rho1.dim()) + " vs " +
                         std::to_string(rho2.dim()) + ")");
}

template <class Fn>
DivergenceResult on_joint_support(const DensityOperator& rho1, const DensityOperator& rho2, Fn&& fn)
{
    DensityOperator sum(rho1.matrix() + rho2.matrix());
    if (sum.rank() == 0) {
        DivergenceResult r = finite_result(0.0, SolverPath::commuting_classical);
        r.optimal_basis = Matrix::Identity(rho1.dim(), rho1.dim());
        return r;
    }
    if (sum.full_rank()) return fn(rho1, rho2);
    Matrix iso = sum.support_basis();
    DivergenceResult r = fn(compress(rho1, iso), compress(rho2, iso));
    lift(r, iso, sum.kernel_basis());
    return r;
}

} // namespace

std::string_view to_string(SolverPath p)
{
    for (const auto& [k, v] : kPathNames)
        if (k == p) return v;
    return "unknown";
}

std::optional<SolverPath> path_from_string(std::string_view s)
{
    for (const auto& [k, v] : kPathNames)
        if (v == s) return k;
    return std::nullopt;
}

std::string_view to_string(SupportRelation r)
{
    switch (r) {
    case SupportRelation::equal: return "equal";
    case SupportRelation::one_in_two: return "one_in_two";
    case SupportRelation::two_in_one: return "two_in_one";
    case SupportRelation::incomparable: return "incomparable";
    }
    return "unknown";
}

bool support_contained(const DensityOperator& a, const DensityOperator& b)
{
    if (a.rank() == 0) return true;
    Matrix k = b.kernel_basis();
    if (k.cols() == 0) return true;
    double leak = (k.adjoint() * a.matrix() * k).trace().real();
    return leak <= static_cast<double>(a.dim()) * 1e-10 * a.max_eigenvalue();
}

SupportRelation support_relation(const DensityOperator& rho1, const DensityOperator& rho2)
{
    check_dims(rho1, rho2);
    bool a = support_contained(rho1, rho2);
    bool b = support_contained(rho2, rho1);
    if (a && b) return SupportRelation::equal;
    if (a) return SupportRelation::one_in_two;
    if (b) return SupportRelation::two_in_one;
    return SupportRelation::incomparable;
}

bool commuting(const DensityOperator& rho1, const DensityOperator& rho2)
{
    check_dims(rho1, rho2);
    Matrix c = rho1.matrix() * rho2.matrix() - rho2.matrix() * rho1.matrix();
    return c.size() == 0 || c.cwiseAbs().maxCoeff() <= 1e-10;
}

bool finiteness_check(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2)
{
    // For canonical f, inf f* = -f(0); so "f*(-inf) > -inf" reads f(0) < inf.
    const bool bounded_1 = std::isfinite(f.f_at_zero());
    const bool bounded_2 = f.conj_domain().bounded_above();
    switch (support_relation(rho1, rho2)) {
    case SupportRelation::equal: return true;
    case SupportRelation::one_in_two: return bounded_1;
    case SupportRelation::two_in_one: return bounded_2;
    case SupportRelation::incomparable: return bounded_1 && bounded_2;
    }
    return false;
}

SpectralBounds spectral_bounds(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2)
{
    SupportRelation rel = support_relation(rho1, rho2);
    double bs = kInf, bsp = 0.0;
    if (rel == SupportRelation::equal || rel == SupportRelation::one_in_two) {
        Matrix si = rho2.power(-0.5);
        bs = rho2.rank() == 0 ? 0.0
                              : hermitian_spectrum(hermitian_part(si * rho1.matrix() * si)).values.maxCoeff();
    }
    if (rel == SupportRelation::equal || rel == SupportRelation::two_in_one) {
        // largest b with rho1 - b rho2 >= 0
        Matrix si = rho1.power(-0.5);
        double top = rho1.rank() == 0 ? 0.0
                                      : hermitian_spectrum(hermitian_part(si * rho2.matrix() * si)).values.maxCoeff();
        bsp = top > 0 ? 1.0 / top : kInf;
    }
    bsp = std::min(bsp, bs);
    const Interval& dom = f.conj_domain();
    double ts = std::isfinite(bs) ? f.f_prime_right(bs) : dom.upper;
    double tsp = bsp > 0 ? f.f_prime_left(bsp) : dom.lower;
    tsp = std::min(tsp, ts);
    return {bs, bsp, ts, tsp};
}

KernelReduction kernel_reduce(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2)
{
    check_dims(rho1, rho2);
    if (!kernel_hypotheses_hold(f))
        throw PreconditionError("kernel_reduce: '" + f.name() +
                                "' needs to be canonical with cond_I, dom f* unbounded below and f(0) finite; "
                                "use the generic or swapped path");
    const Eigen::Index n = rho1.dim();
    if (rho1.full_rank()) return {rho1, rho2, 0.0, Matrix::Identity(n, n)};
    Matrix iso = rho1.support_basis();
    DensityOperator r2 = compress(rho2, iso);
    double rest = rho2.trace() - r2.trace();
    double f0 = f.f_at_zero();
    return {compress(rho1, iso), r2, f0 == 0 ? 0.0 : f0 * rest, iso};
}

double pure_state_value(const DivergenceGenerator& f, const Vector& phi1, const DensityOperator& rho2)
{
    if (!kernel_hypotheses_hold(f))
        throw PreconditionError("pure_state_value: kernel-reduction hypotheses do not hold for '" + f.name() + "'");
    if (phi1.size() != rho2.dim()) throw InputError("pure_state_value: dimension mismatch");
    if (std::abs(phi1.norm() - 1.0) > 1e-10) throw InputError("pure_state_value: phi1 is not a unit vector");
    double q = std::max(0.0, (phi1.adjoint() * rho2.matrix() * phi1)(0).real());
    return g_eval(f, 1.0, q) + f.f_at_zero() * (rho2.trace() - q);
}

double concave_objective(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                         const HermitianOperator& t)
{
    check_dims(rho1, rho2);
    HermitianOperator ft = op_func(conj_map(f), t);
    return (rho1.matrix() * t.matrix()).trace().real() - (rho2.matrix() * ft.matrix()).trace().real();
}

double chi2_closed_form(const DensityOperator& rho1, const DensityOperator& rho2)
{
    check_dims(rho1, rho2);
    if (!support_contained(rho1, rho2)) return kInf;
    const Spectrum& s = rho2.spectrum();
    Matrix r1e = s.vectors.adjoint() * rho1.matrix() * s.vectors;
    double v = 0;
    for (Eigen::Index i = 0; i < rho2.dim(); ++i)
        for (Eigen::Index j = 0; j < rho2.dim(); ++j)
            if (rho2.in_support(i) && rho2.in_support(j))
                v += 2.0 * std::norm(r1e(i, j)) / (s.values(i) + s.values(j));
    return v;
}

DivergenceResult solve_generic(const DivergenceGenerator& f, const DensityOperator& rho1,
                               const DensityOperator& rho2, const SolveOptions& opts)
{
    check_dims(rho1, rho2);
    if (!f.cond_I())
        throw PreconditionError("solve_generic: '" + f.name() + "' does not satisfy cond_I; solve the reversed problem");
    if (!finiteness_check(f, rho1, rho2)) return infinite_result();
    return on_joint_support(rho1, rho2, [&](const DensityOperator& a, const DensityOperator& b) {
        return generic_on_joint_support(f, a, b, opts);
    });
}

DivergenceResult solve(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                       const SolveOptions& opts)
{
    check_dims(rho1, rho2);
    if (!finiteness_check(f, rho1, rho2)) return infinite_result();
    return on_joint_support(rho1, rho2, [&](const DensityOperator& a, const DensityOperator& b) {
        return dispatch(f, a, b, opts, true);
    });
}

} // namespace qfdiv
