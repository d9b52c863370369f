#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qfdiv/convex_core.hpp"
#include "qfdiv/dmin_solver.hpp"
#include "qfdiv/matrix_calc.hpp"

namespace qfdiv {

struct StatePair1Jet {
    DensityOperator rho;
    HermitianOperator drho;
};

using StateFamily = std::function<DensityOperator(double)>;

struct SldComponents {
    HermitianOperator L;
    HermitianOperator L1;   // pi L pi
    Matrix L2;              // (1 - pi) L pi, not Hermitian
    double J_S;
    double J1;
    double J2;              // tr rho L2^dag L2
    double J2_literal;      // tr rho L2 L2, vanishes identically; kept for diagnostics
};

HermitianOperator sld(const StatePair1Jet& jet);
SldComponents sld_components(const StatePair1Jet& jet);

// Weights of the two Fisher components in the second-order expansion.
struct SecondOrderWeights {
    double support;  // f''(1)/2
    double leakage;  // (f'(1) - f(1) + f(0))/4
};
SecondOrderWeights second_order_weights(const DivergenceGenerator& f);

struct SecondOrderReport {
    double lhs;
    double rhs;
    double gap;
    double naive;       // f''(1)/2 * J_S
    double lhs_coarse;  // before extrapolation
    double J_S, J1, J2;
    double J2_literal;
};

struct SecondOrderOptions {
    double h = 1e-3;
    double h_d = 1e-5;
    SolveOptions solve;
};

SecondOrderReport second_order_check(const DivergenceGenerator& f, const StateFamily& family, double eta0,
                                     const SecondOrderOptions& opts = {});

// Three samples at eta0 - h, eta0, eta0 + h.
SecondOrderReport second_order_from_samples(const DivergenceGenerator& f, const DensityOperator& minus,
                                            const DensityOperator& center, const DensityOperator& plus, double h,
                                            const SolveOptions& solve_opts = {});

StateFamily builtin_family(const std::string& name, double param = 1.0);
std::vector<std::string> builtin_family_names();

} // namespace qfdiv
