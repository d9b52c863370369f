#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qfdiv::testing {

double chi2_by_kronecker(const Matrix& rho1, const Matrix& rho2)
{
    const Eigen::Index n = rho1.rows();
    Matrix id = Matrix::Identity(n, n);
    // vec(T A + A T) = (A^T kron I + I kron A) vec(T)
    Matrix k = Eigen::kroneckerProduct(rho2.transpose(), id).eval() + Eigen::kroneckerProduct(id, rho2).eval();
    Matrix rhs4 = 4.0 * rho1;
    Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(rhs4.data(), n * n);
    Eigen::VectorXcd v = k.fullPivLu().solve(b);
    Matrix t = Eigen::Map<Matrix>(v.data(), n, n);
    return 0.5 * (rho1 * t).trace().real();
}

double fidelity_by_schur(const Matrix& rho1, const Matrix& rho2)
{
    Matrix s = rho2.sqrt();
    Matrix inner = s * rho1 * s;
    return inner.sqrt().trace().real();
}

double trace_norm_by_svd(const Matrix& x)
{
    Eigen::BDCSVD<Matrix> svd(x);
    return svd.singularValues().sum();
}

double biconjugate(const DivergenceGenerator& f, double lambda)
{
    const Interval& d = f.conj_domain();
    double a = d.bounded_below() ? d.lower : -1e5;
    double b = d.bounded_above() ? d.upper : 1e5;
    auto psi = [&](double t) {
        double v = f.conj(t);
        return std::isfinite(v) ? lambda * t - v : -1e300;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = psi(c), fe = psi(e);
    for (int i = 0; i < 300 && b - a > 1e-13 * (1 + std::abs(a) + std::abs(b)); ++i) {
        if (fc >= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - gr * (b - a);
            fc = psi(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + gr * (b - a);
            fe = psi(e);
        }
    }
    return std::max({psi(a), psi(b), fc, fe});
}

double largest_b_below(const Matrix& rho1, const Matrix& rho2)
{
    auto ok = [&](double b) {
        Matrix m = rho1 - b * rho2;
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
        return es.eigenvalues()(0) >= -1e-13;
    };
    double lo = 0, hi = 1;
    while (ok(hi)) hi *= 2;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

Matrix frechet_by_differences(const std::function<double(double)>& h, const Matrix& t, const Matrix& x, double eps)
{
    auto apply = [&](const Matrix& m) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
        Eigen::VectorXcd v(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = h(es.eigenvalues()(i));
        return Matrix(es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint());
    };
    return (apply(t + eps * x) - apply(t - eps * x)) / (2 * eps);
}

} // namespace qfdiv::testing
