#include "qfdiv/fisher_info.hpp"

#include <cmath>
#include <sstream>

namespace qfdiv {

namespace {

using cd = std::complex<double>;

void require_hypotheses(const DivergenceGenerator& f, const DensityOperator& rho)
{
    double f2 = f.f_second_at_one();
    if (!(std::isfinite(f2) && f2 > 0))
        throw PreconditionError("second_order_check: f''(1) must be finite and positive for '" + f.name() + "'");
    // the leakage term only exists when rho has a kernel
    if (rho.full_rank()) return;
    if (!f.cond_I() || f.conj_domain().bounded_below())
        throw PreconditionError("second_order_check: '" + f.name() +
                                "' needs cond_I and dom f* unbounded below");
}

void require_same_rank(const DensityOperator& a, const DensityOperator& b, const char* where)
{
    if (a.rank() != b.rank()) {
        std::ostringstream os;
        os << "rank changes along the family (" << a.rank() << " vs " << b.rank() << " at " << where << ")";
        throw RankChangeError(os.str());
    }
}

double excess(const DivergenceGenerator& f, const DensityOperator& base, const DensityOperator& moved,
              const SolveOptions& opts)
{
    DivergenceResult r = solve(f, base, moved, opts);
    if (!r.finite) throw PreconditionError("second_order_check: divergence is infinite along the family");
    return r.value - f.f_at_one() * base.trace();
}

SecondOrderReport assemble(const DivergenceGenerator& f, const SldComponents& c, double lhs, double lhs_coarse)
{
    SecondOrderWeights w = second_order_weights(f);
    SecondOrderReport rep{};
    rep.lhs = lhs;
    rep.lhs_coarse = lhs_coarse;
    rep.rhs = w.support * c.J1 + w.leakage * c.J2;
    rep.gap = std::abs(rep.lhs - rep.rhs);
    rep.naive = w.support * c.J_S;
    rep.J_S = c.J_S;
    rep.J1 = c.J1;
    rep.J2 = c.J2;
    rep.J2_literal = c.J2_literal;
    return rep;
}

} // namespace

HermitianOperator sld(const StatePair1Jet& jet)
{
    const DensityOperator& rho = jet.rho;
    if (rho.dim() != jet.drho.dim()) throw InputError("sld: dimension mismatch");
    const Spectrum& s = rho.spectrum();
    Matrix de = s.vectors.adjoint() * jet.drho.matrix() * s.vectors;
    const Eigen::Index n = rho.dim();
    Matrix le = Matrix::Zero(n, n);
    double kk = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            bool si = rho.in_support(i), sj = rho.in_support(j);
            if (!si && !sj) {
                kk = std::max(kk, std::abs(de(i, j)));
                continue;
            }
            le(i, j) = 2.0 * de(i, j) / (s.values(i) + s.values(j));
        }
    if (kk > 1e-8) {
        std::ostringstream os;
        os << "sld: kernel-kernel block of drho is " << kk << ", the rank is not constant";
        throw RankChangeError(os.str());
    }
    return HermitianOperator(hermitian_part(s.vectors * le * s.vectors.adjoint()));
}

SldComponents sld_components(const StatePair1Jet& jet)
{
    HermitianOperator l = sld(jet);
    const Matrix pi = jet.rho.support_projector();
    const Eigen::Index n = jet.rho.dim();
    const Matrix q = Matrix::Identity(n, n) - pi;
    const Matrix& rho = jet.rho.matrix();
    Matrix l1 = jet.rho.full_rank() ? l.matrix() : hermitian_part(pi * l.matrix() * pi);
    Matrix l2 = jet.rho.full_rank() ? Matrix::Zero(n, n) : Matrix(q * l.matrix() * pi);
    double js = (rho * l.matrix() * l.matrix()).trace().real();
    double j1 = (rho * l1 * l1).trace().real();
    double j2 = (rho * l2.adjoint() * l2).trace().real();
    double j2_lit = (rho * l2 * l2).trace().real();
    return {l, HermitianOperator(l1), l2, js, j1, j2, j2_lit};
}

SecondOrderWeights second_order_weights(const DivergenceGenerator& f)
{
    return {0.5 * f.f_second_at_one(), 0.25 * (f.f_prime_at_one() - f.f_at_one() + f.f_at_zero())};
}

SecondOrderReport second_order_check(const DivergenceGenerator& f, const StateFamily& family, double eta0,
                                     const SecondOrderOptions& opts)
{
    const double h = opts.h, hd = opts.h_d;
    DensityOperator rho0 = family(eta0);
    require_hypotheses(f, rho0);
    DensityOperator rh = family(eta0 + h);
    DensityOperator rh2 = family(eta0 + 0.5 * h);
    DensityOperator rdp = family(eta0 + hd);
    DensityOperator rdm = family(eta0 - hd);
    require_same_rank(rho0, rh, "eta0 + h");
    require_same_rank(rho0, family(eta0 - h), "eta0 - h");
    require_same_rank(rho0, rdp, "eta0 + h_d");
    require_same_rank(rho0, rdm, "eta0 - h_d");

    HermitianOperator drho(hermitian_part((rdp.matrix() - rdm.matrix()) / (2 * hd)));
    SldComponents c = sld_components({rho0, drho});

    double lhs_h = excess(f, rho0, rh, opts.solve) / (h * h);
    double lhs_h2 = excess(f, rho0, rh2, opts.solve) / (0.25 * h * h);
    return assemble(f, c, 2 * lhs_h2 - lhs_h, lhs_h);
}

SecondOrderReport second_order_from_samples(const DivergenceGenerator& f, const DensityOperator& minus,
                                            const DensityOperator& center, const DensityOperator& plus, double h,
                                            const SolveOptions& solve_opts)
{
    require_hypotheses(f, center);
    if (!(h > 0)) throw InputError("second_order_from_samples: step must be positive");
    require_same_rank(center, plus, "eta0 + h");
    require_same_rank(center, minus, "eta0 - h");
    // a rotating support leaves an O(h^2) kernel-kernel block in the difference quotient; the rank check above
    // is the rank-change test here
    Matrix d = hermitian_part((plus.matrix() - minus.matrix()) / (2 * h));
    if (!center.full_rank()) {
        Matrix k = center.kernel_basis();
        d -= k * (k.adjoint() * d * k) * k.adjoint();
    }
    HermitianOperator drho(hermitian_part(d));
    SldComponents c = sld_components({center, drho});
    // the odd h^3 terms cancel between the two sides
    double up = excess(f, center, plus, solve_opts) / (h * h);
    double down = excess(f, center, minus, solve_opts) / (h * h);
    return assemble(f, c, 0.5 * (up + down), up);
}

std::vector<std::string> builtin_family_names() { return {"binary-mixture", "rotating-qubit", "rank2-in-3d"}; }

StateFamily builtin_family(const std::string& name, double param)
{
    if (name == "binary-mixture") {
        return [](double eta) {
            Matrix m = Matrix::Zero(2, 2);
            m(0, 0) = 1 - eta;
            m(1, 1) = eta;
            return DensityOperator(m);
        };
    }
    if (name == "rotating-qubit") {
        if (!(param >= 0 && param <= 1)) throw InputError("rotating-qubit: radius must lie in [0, 1]");
        const double r = param;
        return [r](double eta) {
            Matrix m(2, 2);
            double x = r * std::sin(2 * eta), z = r * std::cos(2 * eta);
            m << 0.5 * (1 + z), 0.5 * x, 0.5 * x, 0.5 * (1 - z);
            return DensityOperator(m);
        };
    }
    if (name == "rank2-in-3d") {
        // support rotates inside itself and leaks into the kernel direction
        return [](double eta) {
            Matrix g = Matrix::Zero(3, 3);
            g(0, 1) = cd(0.0, -0.4);
            g(1, 0) = cd(0.0, 0.4);
            g(0, 2) = 1.0;
            g(2, 0) = 1.0;
            g(1, 2) = 0.6;
            g(2, 1) = 0.6;
            Spectrum s = hermitian_spectrum(g);
            Eigen::VectorXcd ph(3);
            for (int i = 0; i < 3; ++i) ph(i) = std::polar(1.0, -eta * s.values(i));
            Matrix u = s.vectors * ph.asDiagonal() * s.vectors.adjoint();
            double p = 0.6 + 0.3 * std::sin(2 * eta);
            Matrix d = Matrix::Zero(3, 3);
            d(0, 0) = p;
            d(1, 1) = 1 - p;
            return DensityOperator(u * d * u.adjoint());
        };
    }
    throw InputError("unknown built-in family '" + name + "'");
}

} // namespace qfdiv
