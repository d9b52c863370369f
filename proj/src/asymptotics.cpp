#include "qfdiv/asymptotics.hpp"

#include <cmath>

namespace qfdiv {

namespace {

void check_alpha(double alpha)
{
    if (!std::isfinite(alpha) || alpha == 0.0 || alpha == 1.0)
        throw InputError("alpha must be finite and differ from 0 and 1");
}

double sign_of(double alpha) { return (alpha - 1) * alpha > 0 ? 1.0 : -1.0; }

// tr (a^p b a^p)^q with pseudo-powers of a
double power_trace(const DensityOperator& a, const DensityOperator& b, double p, double q)
{
    Matrix ap = a.power(p);
    // roundoff eigenvalues would survive a fractional power
    DensityOperator inner(hermitian_part(ap * b.matrix() * ap));
    double s = 0;
    for (Eigen::Index i = 0; i < inner.dim(); ++i)
        if (inner.in_support(i)) s += std::pow(inner.eigenvalues()(i), q);
    return s;
}

double direct_form(double alpha, const DensityOperator& rho1, const DensityOperator& rho2)
{
    if (alpha > 1 && !support_contained(rho1, rho2)) return kInf;
    return sign_of(alpha) * power_trace(rho2, rho1, (1 - alpha) / (2 * alpha), alpha);
}

double exchanged_form(double alpha, const DensityOperator& rho1, const DensityOperator& rho2)
{
    if (alpha < 0 && !support_contained(rho2, rho1)) return kInf;
    return sign_of(alpha) * power_trace(rho1, rho2, alpha / (2 * (1 - alpha)), 1 - alpha);
}

void check_pair(const DensityOperator& rho1, const DensityOperator& rho2)
{
    if (rho1.dim() != rho2.dim()) throw InputError("dimension mismatch between rho1 and rho2");
}

double unit_overlap(const Vector& phi1, const Vector& phi2)
{
    if (phi1.size() != phi2.size()) throw InputError("state vectors have different dimensions");
    if (std::abs(phi1.norm() - 1) > 1e-10 || std::abs(phi2.norm() - 1) > 1e-10)
        throw InputError("state vectors must have unit norm");
    return std::abs(phi1.dot(phi2));
}

} // namespace

double sandwiched_renyi(double alpha, const DensityOperator& rho1, const DensityOperator& rho2)
{
    check_alpha(alpha);
    check_pair(rho1, rho2);
    return alpha > 0 ? direct_form(alpha, rho1, rho2) : exchanged_form(alpha, rho1, rho2);
}

double asymptotic_renyi(double alpha, const DensityOperator& rho1, const DensityOperator& rho2)
{
    check_alpha(alpha);
    check_pair(rho1, rho2);
    return alpha >= 0.5 ? direct_form(alpha, rho1, rho2) : exchanged_form(alpha, rho1, rho2);
}

GapReport gap_report(double alpha, const DensityOperator& rho1, const DensityOperator& rho2, const SolveOptions& opts)
{
    check_alpha(alpha);
    check_pair(rho1, rho2);
    DivergenceResult single = solve(families::renyi(alpha), rho1, rho2, opts);
    double asym = asymptotic_renyi(alpha, rho1, rho2);
    if (!single.finite || std::isinf(asym))
        throw PreconditionError("gap_report: the measured or asymptotic value is infinite");
    GapReport g{};
    g.alpha = alpha;
    g.single_copy_value = single.value;
    g.asymptotic_value = asym;
    g.single_copy_log = std::log(std::abs(single.value));
    g.asymptotic_log = std::log(std::abs(asym));
    g.gap = sign_of(alpha) * (g.asymptotic_log - g.single_copy_log);
    g.commuting = commuting(rho1, rho2);
    return g;
}

double chernoff_pure(const Vector& phi1, const Vector& phi2)
{
    double ov = unit_overlap(phi1, phi2);
    if (ov == 0) return kInf;
    return -2 * std::log(ov);
}

double hoeffding_pure(const Vector& phi1, const Vector& phi2, double r)
{
    if (std::isnan(r)) throw InputError("hoeffding_pure: r is NaN");
    double c = chernoff_pure(phi1, phi2);
    return r <= c ? c : kInf;
}

} // namespace qfdiv
