#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfdiv/convex_core.hpp"
#include "qfdiv/matrix_calc.hpp"

namespace qfdiv {

enum class SolverPath {
    infinite,
    commuting_classical,
    closed_form_f2,
    closed_form_fidelity,
    closed_form_tv,
    pure_state,
    generic_gradient,
    swapped_generic,
};

std::string_view to_string(SolverPath p);
std::optional<SolverPath> path_from_string(std::string_view s);

struct DivergenceResult {
    double value = kInf;
    bool finite = false;
    std::optional<HermitianOperator> optimizer_T;
    SolverPath path = SolverPath::infinite;
    int iterations = 0;
    std::optional<double> gradient_residual;  // generic paths only
    std::vector<std::string> warnings;

    bool converged = true;
    bool swapped = false;                    // value came from the reversed problem
    std::optional<Matrix> optimal_basis;     // columns: an optimal rank-one PVM, when known
    std::optional<double> value_identity_gap;
};

struct SpectralBounds {
    double b_star;
    double b_star_prime;
    double t_star;
    double t_star_prime;
};

enum class SupportRelation { equal, one_in_two, two_in_one, incomparable };
std::string_view to_string(SupportRelation r);

struct SolveOptions {
    double tol = 1e-9;
    int max_iter = 10000;
    std::optional<SolverPath> force_path;
};

struct KernelReduction {
    DensityOperator rho1;
    DensityOperator rho2;
    double constant;
    Matrix isometry;  // columns span supp rho1
};

SupportRelation support_relation(const DensityOperator& rho1, const DensityOperator& rho2);
bool support_contained(const DensityOperator& a, const DensityOperator& b);
bool commuting(const DensityOperator& rho1, const DensityOperator& rho2);

bool finiteness_check(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2);
SpectralBounds spectral_bounds(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2);
KernelReduction kernel_reduce(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2);
double pure_state_value(const DivergenceGenerator& f, const Vector& phi1, const DensityOperator& rho2);

// G(T) = tr rho1 T - tr rho2 f*(T)
double concave_objective(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                         const HermitianOperator& t);

double chi2_closed_form(const DensityOperator& rho1, const DensityOperator& rho2);

DivergenceResult solve_generic(const DivergenceGenerator& f, const DensityOperator& rho1,
                               const DensityOperator& rho2, const SolveOptions& opts = {});
DivergenceResult solve(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                       const SolveOptions& opts = {});

} // namespace qfdiv
