#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "qfdiv/common.hpp"

namespace qfdiv {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Eigenvalues ascending, eigenvectors as columns.
struct Spectrum {
    RealVector values;
    Matrix vectors;
};

Spectrum hermitian_spectrum(const Matrix& a);
Matrix compose(const Spectrum& s);
Matrix apply_function(const Spectrum& s, const std::function<double(double)>& h);

class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m, std::optional<Interval> box = std::nullopt);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    const std::optional<Interval>& spectral_box() const { return box_; }
    Spectrum spectrum() const { return hermitian_spectrum(m_); }

private:
    Matrix m_;
    std::optional<Interval> box_;
};

// Positive semidefinite operator (not necessarily unit trace) with cached spectrum.
class DensityOperator {
public:
    explicit DensityOperator(Matrix m);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    const RealVector& eigenvalues() const { return spec_.values; }
    const Matrix& eigenvectors() const { return spec_.vectors; }
    const Spectrum& spectrum() const { return spec_; }
    double trace() const { return m_.trace().real(); }
    double max_eigenvalue() const;

    // eigenvalues at or below this count as kernel
    double rank_tolerance() const { return rank_tol_; }
    Eigen::Index rank() const { return rank_; }
    bool full_rank() const { return rank_ == dim(); }
    bool in_support(Eigen::Index i) const { return spec_.values(i) > rank_tol_; }

    Matrix support_basis() const;
    Matrix kernel_basis() const;
    Matrix support_projector() const;

    // pseudo-power on the support; kernel maps to 0
    Matrix power(double p) const;

private:
    Matrix m_;
    Spectrum spec_;
    double rank_tol_ = 0;
    Eigen::Index rank_ = 0;
};

// Real function with derivative and effective domain, applied spectrally.
struct ScalarMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    Interval domain;
};

HermitianOperator op_func(const ScalarMap& h, const HermitianOperator& t);

// Loewner matrix of first divided differences at the points t.
RealMatrix divided_differences(const ScalarMap& h, const RealVector& t);

HermitianOperator frechet_derivative(const ScalarMap& h, const HermitianOperator& t, const HermitianOperator& x);

// T with T A + A T = C, restricted to supp A.
HermitianOperator solve_sylvester_symmetric(const DensityOperator& a, const HermitianOperator& c);

DensityOperator sqrtm_psd(const DensityOperator& a);
double trace_norm(const HermitianOperator& x);
double fidelity(const DensityOperator& rho1, const DensityOperator& rho2);

double hermiticity_defect(const Matrix& a);
Matrix hermitian_part(const Matrix& a);

} // namespace qfdiv
