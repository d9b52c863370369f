#include "qfdiv/measurement_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qfdiv/dmin_solver.hpp"

namespace qfdiv {

namespace {

using cd = std::complex<double>;

Matrix hermitian_from_params(const Eigen::VectorXd& x, Eigen::Index n)
{
    Matrix h = Matrix::Zero(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = x(k++);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            h(i, j) = cd(x(k), x(k + 1));
            h(j, i) = std::conj(h(i, j));
            k += 2;
        }
    return h;
}

Matrix expi(const Matrix& h)
{
    Spectrum s = hermitian_spectrum(h);
    Eigen::VectorXcd ph(s.values.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, s.values(i));
    return s.vectors * ph.asDiagonal() * s.vectors.adjoint();
}

double basis_value(const DivergenceGenerator& f, const Matrix& u, const DensityOperator& rho1,
                   const DensityOperator& rho2)
{
    std::vector<double> p(u.cols()), q(u.cols());
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        p[k] = std::max(0.0, (u.col(k).adjoint() * rho1.matrix() * u.col(k))(0).real());
        q[k] = std::max(0.0, (u.col(k).adjoint() * rho2.matrix() * u.col(k))(0).real());
    }
    double v = classical_df(f, DiscreteMeasure(std::move(p)), DiscreteMeasure(std::move(q)));
    return std::isnan(v) ? -kInf : v;
}

// Nelder-Mead maximization of phi near x0.
struct NmResult {
    Eigen::VectorXd x;
    double value;
    int evaluations;
};

template <class Fn>
NmResult nelder_mead_max(Fn&& phi, const Eigen::VectorXd& x0, double step, int max_eval)
{
    const Eigen::Index m = x0.size();
    std::vector<Eigen::VectorXd> pts(m + 1, x0);
    std::vector<double> val(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) pts[i + 1](i) += step;
    int evals = 0;
    for (Eigen::Index i = 0; i <= m; ++i) {
        val[i] = phi(pts[i]);
        ++evals;
    }
    std::vector<Eigen::Index> order(m + 1);
    while (evals < max_eval) {
        for (Eigen::Index i = 0; i <= m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] > val[b]; });
        const Eigen::Index best = order[0], worst = order[m], second = order[m - 1];

        double spread = val[best] - val[worst];
        double diam = 0;
        for (Eigen::Index i = 1; i <= m; ++i) diam = std::max(diam, (pts[order[i]] - pts[best]).cwiseAbs().maxCoeff());
        if ((std::isfinite(spread) && spread <= 1e-14 * (1 + std::abs(val[best]))) && diam <= 1e-9) break;
        if (diam <= 1e-12) break;

        Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i) c += pts[order[i]];
        c /= static_cast<double>(m);

        Eigen::VectorXd xr = c + (c - pts[worst]);
        double vr = phi(xr);
        ++evals;
        if (vr > val[best]) {
            Eigen::VectorXd xe = c + 2.0 * (c - pts[worst]);
            double ve = phi(xe);
            ++evals;
            if (ve > vr) {
                pts[worst] = xe;
                val[worst] = ve;
            } else {
                pts[worst] = xr;
                val[worst] = vr;
            }
        } else if (vr > val[second]) {
            pts[worst] = xr;
            val[worst] = vr;
        } else {
            bool outside = vr > val[worst];
            Eigen::VectorXd xc = outside ? Eigen::VectorXd(c + 0.5 * (xr - c)) : Eigen::VectorXd(c + 0.5 * (pts[worst] - c));
            double vc = phi(xc);
            ++evals;
            if (vc > (outside ? vr : val[worst])) {
                pts[worst] = xc;
                val[worst] = vc;
            } else {
                for (Eigen::Index i = 1; i <= m; ++i) {
                    Eigen::Index k = order[i];
                    pts[k] = pts[best] + 0.5 * (pts[k] - pts[best]);
                    val[k] = phi(pts[k]);
                    ++evals;
                }
            }
        }
    }
    Eigen::Index b = std::max_element(val.begin(), val.end()) - val.begin();
    return {pts[b], val[b], evals};
}

} // namespace

Measurement::Measurement(std::vector<Matrix> effects) : effects_(std::move(effects))
{
    if (effects_.empty()) throw InputError("Measurement: no effects");
    const Eigen::Index n = effects_.front().rows();
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < effects_.size(); ++k) {
        const Matrix& e = effects_[k];
        if (e.rows() != n || e.cols() != n)
            throw InputError("Measurement: effect " + std::to_string(k) + " has the wrong shape");
        if (hermiticity_defect(e) > 1e-10)
            throw InputError("Measurement: effect " + std::to_string(k) + " is not Hermitian");
        if (hermitian_spectrum(hermitian_part(e)).values(0) < -1e-10)
            throw InputError("Measurement: effect " + std::to_string(k) + " is not positive semidefinite");
        sum += e;
    }
    if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
        throw InputError("Measurement: effects do not sum to the identity");
}

Measurement Measurement::from_basis(const Matrix& u)
{
    std::vector<Matrix> e;
    e.reserve(u.cols());
    for (Eigen::Index k = 0; k < u.cols(); ++k) e.push_back(u.col(k) * u.col(k).adjoint());
    return Measurement(std::move(e));
}

std::pair<DiscreteMeasure, DiscreteMeasure> induced_distributions(const Measurement& m, const DensityOperator& rho1,
                                                                  const DensityOperator& rho2)
{
    if (m.dim() != rho1.dim() || m.dim() != rho2.dim())
        throw InputError("induced_distributions: dimension mismatch");
    std::vector<double> p, q;
    auto clamp = [](double x) {
        if (x < -1e-14) throw InputError("induced_distributions: negative outcome probability");
        return std::max(x, 0.0);
    };
    for (const Matrix& e : m.effects()) {
        p.push_back(clamp((rho1.matrix() * e).trace().real()));
        q.push_back(clamp((rho2.matrix() * e).trace().real()));
    }
    return {DiscreteMeasure(std::move(p)), DiscreteMeasure(std::move(q))};
}

double measured_value(const DivergenceGenerator& f, const Measurement& m, const DensityOperator& rho1,
                      const DensityOperator& rho2)
{
    auto [p, q] = induced_distributions(m, rho1, rho2);
    return classical_df(f, p, q);
}

Matrix random_unitary(Eigen::Index dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix h(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) h(i, j) = cd(g(rng), g(rng));
    return expi(hermitian_part(h));
}

PvmSearchResult pvm_search(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                           const PvmSearchOptions& opts)
{
    if (rho1.dim() != rho2.dim()) throw InputError("pvm_search: dimension mismatch");
    const Eigen::Index n = rho1.dim();

    std::vector<Matrix> refs = opts.warm_starts;
    if (commuting(rho1, rho2)) {
        // joint eigenbasis via a generic combination
        refs.push_back(hermitian_spectrum(hermitian_part(rho2.matrix() + M_SQRT2 * rho1.matrix())).vectors);
    }
    if (opts.solver_warm_start) {
        try {
            DivergenceResult r = solve(f, rho1, rho2);
            if (r.optimal_basis) refs.push_back(*r.optimal_basis);
        } catch (const std::exception&) {
            // unsupported family: random starts only
        }
    }
    std::mt19937_64 master(opts.seed);
    for (int k = 0; k < opts.restarts; ++k) {
        std::mt19937_64 rng(master());
        refs.push_back(random_unitary(n, rng));
    }

    PvmSearchResult best{-kInf, Measurement::from_basis(Matrix::Identity(n, n)), Matrix::Identity(n, n), 0};
    const Eigen::Index m = n * n;
    for (const Matrix& ref : refs) {
        auto phi = [&](const Eigen::VectorXd& x) { return basis_value(f, expi(hermitian_from_params(x, n)) * ref, rho1, rho2); };
        Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
        double step = 0.3;
        double v = -kInf;
        for (int round = 0; round < 10; ++round) {
            NmResult r = nelder_mead_max(phi, x, step, 1000 * static_cast<int>(m));
            best.evaluations += r.evaluations;
            bool improved = r.value > v + 1e-13 * (1 + std::abs(v));
            x = r.x;
            v = r.value;
            if (!improved && round > 0) break;
            step = std::max(step * 0.3, 1e-4);
        }
        if (v > best.value) {
            Matrix u = expi(hermitian_from_params(x, n)) * ref;
            best.value = v;
            best.basis = u;
            best.best = Measurement::from_basis(u);
        }
    }
    return best;
}

double two_outcome_check(const DivergenceGenerator& f, const Vector& phi1, const DensityOperator& rho2)
{
    if (std::abs(phi1.norm() - 1.0) > 1e-10) throw InputError("two_outcome_check: phi1 is not a unit vector");
    if (phi1.size() != rho2.dim()) throw InputError("two_outcome_check: dimension mismatch");
    double q = std::max(0.0, (phi1.adjoint() * rho2.matrix() * phi1)(0).real());
    DiscreteMeasure p({1.0, 0.0});
    DiscreteMeasure qq({q, std::max(0.0, rho2.trace() - q)});
    return classical_df(f, p, qq);
}

Measurement random_refinement(const Measurement& m, int k, std::mt19937_64& rng)
{
    const Eigen::Index n = m.dim();
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Matrix> raw;
    Matrix s = Matrix::Zero(n, n);
    for (int j = 0; j < k; ++j) {
        Matrix a(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) a(r, c) = cd(g(rng), g(rng));
        raw.push_back(a * a.adjoint());
        s += raw.back();
    }
    Matrix si = DensityOperator(s).power(-0.5);
    std::vector<Matrix> out;
    for (const Matrix& e : m.effects()) {
        Matrix er = DensityOperator(hermitian_part(e)).power(0.5);
        for (const Matrix& r : raw) out.push_back(hermitian_part(er * si * r * si * er));
    }
    // absorb round-off so the effects sum to the identity exactly enough
    Matrix total = Matrix::Zero(n, n);
    for (const Matrix& e : out) total += e;
    Matrix fix = DensityOperator(hermitian_part(total)).power(-0.5);
    for (Matrix& e : out) e = hermitian_part(fix * e * fix);
    return Measurement(std::move(out));
}

} // namespace qfdiv
