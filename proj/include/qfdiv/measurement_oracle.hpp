#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qfdiv/convex_core.hpp"
#include "qfdiv/matrix_calc.hpp"

namespace qfdiv {

class Measurement {
public:
    explicit Measurement(std::vector<Matrix> effects);

    // rank-one PVM from the columns of a unitary
    static Measurement from_basis(const Matrix& u);

    std::size_t outcomes() const { return effects_.size(); }
    Eigen::Index dim() const { return effects_.empty() ? 0 : effects_.front().rows(); }
    const std::vector<Matrix>& effects() const { return effects_; }

private:
    std::vector<Matrix> effects_;
};

std::pair<DiscreteMeasure, DiscreteMeasure> induced_distributions(const Measurement& m, const DensityOperator& rho1,
                                                                  const DensityOperator& rho2);

double measured_value(const DivergenceGenerator& f, const Measurement& m, const DensityOperator& rho1,
                      const DensityOperator& rho2);

struct PvmSearchOptions {
    int restarts = 32;
    std::uint64_t seed = 0;
    bool solver_warm_start = true;   // eigenbasis of the solver's optimum
    std::vector<Matrix> warm_starts;  // extra reference bases
};

struct PvmSearchResult {
    double value;
    Measurement best;
    Matrix basis;
    int evaluations = 0;
};

PvmSearchResult pvm_search(const DivergenceGenerator& f, const DensityOperator& rho1, const DensityOperator& rho2,
                           const PvmSearchOptions& opts = {});

double two_outcome_check(const DivergenceGenerator& f, const Vector& phi1, const DensityOperator& rho2);

// Coarse-grainable refinement {E_i^{1/2} N_j E_i^{1/2}} of m by a random POVM N with k outcomes.
Measurement random_refinement(const Measurement& m, int k, std::mt19937_64& rng);

Matrix random_unitary(Eigen::Index dim, std::mt19937_64& rng);

} // namespace qfdiv
