#include "qfdiv/matrix_calc.hpp"

#include <algorithm>
#include <sstream>

namespace qfdiv {

Spectrum hermitian_spectrum(const Matrix& a)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix compose(const Spectrum& s)
{
    return s.vectors * s.values.cast<std::complex<double>>().asDiagonal() * s.vectors.adjoint();
}

Matrix apply_function(const Spectrum& s, const std::function<double(double)>& h)
{
    RealVector v(s.values.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = h(s.values(i));
    return compose({v, s.vectors});
}

double hermiticity_defect(const Matrix& a)
{
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

namespace {

void require_hermitian(const Matrix& m, const char* what)
{
    if (m.rows() != m.cols())
        throw InputError(std::string(what) + ": matrix is not square (" + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ")");
    if (!m.allFinite()) throw InputError(std::string(what) + ": matrix has non-finite entries");
    double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
    double defect = hermiticity_defect(m);
    if (defect > 1e-12 * scale) {
        std::ostringstream os;
        os << what << ": matrix is not Hermitian (max |A - A^H| = " << defect << ")";
        throw InputError(os.str());
    }
}

} // namespace

HermitianOperator::HermitianOperator(Matrix m, std::optional<Interval> box) : box_(box)
{
    require_hermitian(m, "HermitianOperator");
    m_ = hermitian_part(m);
    if (box_) {
        auto s = hermitian_spectrum(m_);
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
            if (!box_->contains(s.values(i)))
                throw InputError("HermitianOperator: eigenvalue outside declared spectral box");
    }
}

DensityOperator::DensityOperator(Matrix m)
{
    require_hermitian(m, "DensityOperator");
    m_ = hermitian_part(m);
    spec_ = hermitian_spectrum(m_);
    const Eigen::Index n = m_.rows();
    double top = n ? spec_.values(n - 1) : 0.0;
    if (n && spec_.values(0) < -1e-10 * std::max(1.0, top)) {
        std::ostringstream os;
        os << "DensityOperator: not positive semidefinite (min eigenvalue " << spec_.values(0) << ")";
        throw InputError(os.str());
    }
    bool clamped = false;
    for (Eigen::Index i = 0; i < n; ++i)
        if (spec_.values(i) < 0) {
            spec_.values(i) = 0;
            clamped = true;
        }
    if (clamped) m_ = hermitian_part(compose(spec_));
    rank_tol_ = static_cast<double>(n) * 1e-10 * std::max(top, 0.0);
    rank_ = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (spec_.values(i) > rank_tol_) ++rank_;
}

double DensityOperator::max_eigenvalue() const
{
    return dim() ? spec_.values(dim() - 1) : 0.0;
}

Matrix DensityOperator::support_basis() const
{
    return spec_.vectors.rightCols(rank_);
}

Matrix DensityOperator::kernel_basis() const
{
    return spec_.vectors.leftCols(dim() - rank_);
}

Matrix DensityOperator::support_projector() const
{
    Matrix v = support_basis();
    return v * v.adjoint();
}

Matrix DensityOperator::power(double p) const
{
    RealVector v(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) v(i) = in_support(i) ? std::pow(spec_.values(i), p) : 0.0;
    return compose({v, spec_.vectors});
}

HermitianOperator op_func(const ScalarMap& h, const HermitianOperator& t)
{
    Spectrum s = t.spectrum();
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (!h.domain.contains(s.values(i))) {
            std::ostringstream os;
            os.precision(17);
            os << "op_func: eigenvalue " << s.values(i) << " outside the domain of h";
            throw DomainError(os.str());
        }
    return HermitianOperator(hermitian_part(apply_function(s, h.value)));
}

RealMatrix divided_differences(const ScalarMap& h, const RealVector& t)
{
    const Eigen::Index n = t.size();
    RealVector hv(n);
    for (Eigen::Index i = 0; i < n; ++i) hv(i) = h.value(t(i));
    RealMatrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = h.derivative(t(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            double a = t(i), b = t(j);
            double v;
            if (std::abs(a - b) < 1e-7 * (1 + std::abs(a) + std::abs(b)))
                v = h.derivative(0.5 * (a + b));
            else
                v = (hv(i) - hv(j)) / (a - b);
            d(i, j) = d(j, i) = v;
        }
    }
    return d;
}

HermitianOperator frechet_derivative(const ScalarMap& h, const HermitianOperator& t, const HermitianOperator& x)
{
    if (t.dim() != x.dim()) throw InputError("frechet_derivative: dimension mismatch");
    Spectrum s = t.spectrum();
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (!h.domain.contains(s.values(i)))
            throw DomainError("frechet_derivative: spectrum of T leaves the domain of h");
    RealMatrix dd = divided_differences(h, s.values);
    Matrix xe = s.vectors.adjoint() * x.matrix() * s.vectors;
    Matrix ye = xe.cwiseProduct(dd.cast<std::complex<double>>());
    return HermitianOperator(hermitian_part(s.vectors * ye * s.vectors.adjoint()));
}

HermitianOperator solve_sylvester_symmetric(const DensityOperator& a, const HermitianOperator& c)
{
    if (a.dim() != c.dim()) throw InputError("solve_sylvester_symmetric: dimension mismatch");
    Matrix pi = a.support_projector();
    Matrix cc = c.matrix();
    double scale = std::max(1.0, cc.size() ? cc.cwiseAbs().maxCoeff() : 0.0);
    if ((pi * cc * pi - cc).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InputError("solve_sylvester_symmetric: C is not supported on supp A");

    const Spectrum& s = a.spectrum();
    Matrix ce = s.vectors.adjoint() * cc * s.vectors;
    Matrix te = Matrix::Zero(a.dim(), a.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < a.dim(); ++j)
            if (a.in_support(i) && a.in_support(j))
                te(i, j) = ce(i, j) / (s.values(i) + s.values(j));
    return HermitianOperator(hermitian_part(s.vectors * te * s.vectors.adjoint()));
}

DensityOperator sqrtm_psd(const DensityOperator& a)
{
    return DensityOperator(hermitian_part(a.power(0.5)));
}

double trace_norm(const HermitianOperator& x)
{
    return x.spectrum().values.cwiseAbs().sum();
}

double fidelity(const DensityOperator& rho1, const DensityOperator& rho2)
{
    if (rho1.dim() != rho2.dim()) throw InputError("fidelity: dimension mismatch");
    // singular values of sqrt(rho1) sqrt(rho2) avoid square roots of round-off eigenvalues
    Matrix prod = rho1.power(0.5) * rho2.power(0.5);
    Eigen::JacobiSVD<Matrix> svd(prod);
    return svd.singularValues().sum();
}

} // namespace qfdiv
