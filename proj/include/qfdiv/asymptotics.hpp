#pragma once

#include "qfdiv/dmin_solver.hpp"
#include "qfdiv/matrix_calc.hpp"

namespace qfdiv {

struct GapReport {
    double alpha;
    double single_copy_log;
    double asymptotic_log;
    double gap;
    bool commuting;
    double single_copy_value;
    double asymptotic_value;
};

// sign((alpha-1) alpha) tr(rho2^{(1-alpha)/2alpha} rho1 rho2^{(1-alpha)/2alpha})^alpha;
// for alpha < 0 the alpha <-> 1-alpha form with the roles of the states exchanged.
double sandwiched_renyi(double alpha, const DensityOperator& rho1, const DensityOperator& rho2);

// Many-copy limit of the measured Renyi quantity: the sandwiched form for alpha >= 1/2,
// the exchanged form below.
double asymptotic_renyi(double alpha, const DensityOperator& rho1, const DensityOperator& rho2);

GapReport gap_report(double alpha, const DensityOperator& rho1, const DensityOperator& rho2,
                     const SolveOptions& opts = {});

double chernoff_pure(const Vector& phi1, const Vector& phi2);
double hoeffding_pure(const Vector& phi1, const Vector& phi2, double r);

} // namespace qfdiv
