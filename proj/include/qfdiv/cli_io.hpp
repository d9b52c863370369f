#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qfdiv/convex_core.hpp"
#include "qfdiv/matrix_calc.hpp"

namespace qfdiv {

struct FamilySpec {
    std::string family;
    std::optional<double> alpha;
};

DivergenceGenerator make_generator(const FamilySpec& spec);

struct ProblemSpec {
    std::optional<FamilySpec> family;
    Matrix rho1;
    Matrix rho2;
};

struct FisherSpec {
    FamilySpec family;
    Matrix minus;
    Matrix center;
    Matrix plus;
    double step;
};

ProblemSpec parse_problem(const std::string& text);
std::string serialize_problem(const ProblemSpec& spec);
FamilySpec parse_family(const std::string& text);
FisherSpec parse_fisher(const std::string& text);

enum class Command { compute, verify, fisher, compare };

struct RunFlags {
    double tol = 1e-9;
    int max_iter = 10000;
    std::optional<std::string> force_path;
    int restarts = 32;
    std::uint64_t seed = 0;
    double eta = 0.3;
    double step = 1e-3;
    std::optional<std::string> builtin;
    double builtin_param = 1.0;
    std::string divergence = R"({"family":"fidelity"})";
    std::optional<double> alpha;
};

struct RunOutcome {
    int exit_code;
    std::string report;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNoConvergence = 3;

// input_text is the -f document (ignored for `fisher --builtin`)
RunOutcome run(Command cmd, const std::string& input_text, const RunFlags& flags);

} // namespace qfdiv
