#include "qfdiv/cli_io.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qfdiv/asymptotics.hpp"
#include "qfdiv/dmin_solver.hpp"
#include "qfdiv/fisher_info.hpp"
#include "qfdiv/measurement_oracle.hpp"

namespace qfdiv {

using json = nlohmann::ordered_json;

namespace {

using cd = std::complex<double>;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw InputError("unknown field '" + (path.empty() ? it.key() : path + "." + it.key()) + "'");
}

const json& field(const json& obj, const std::string& key, const std::string& path)
{
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError("missing field '" + (path.empty() ? key : path + "." + key) + "'");
    return *it;
}

double read_number(const json& j, const std::string& path)
{
    if (!j.is_number()) throw InputError("field '" + path + "' must be a number");
    return j.get<double>();
}

Matrix read_matrix(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) throw InputError("field '" + path + "' must be a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array()) throw InputError("field '" + rp + "' must be an array");
        if (r == 0) cols = row.size();
        if (row.size() != cols) throw InputError("field '" + rp + "' has a different length from row 0");
    }
    if (rows != cols)
        throw InputError("field '" + path + "' is not square (" + std::to_string(rows) + "x" + std::to_string(cols) +
                         ")");
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const json& e = j[r][c];
            std::string ep = path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (!e.is_array() || e.size() != 2) throw InputError("field '" + ep + "' must be a [re, im] pair");
            m(r, c) = cd(read_number(e[0], ep + "[0]"), read_number(e[1], ep + "[1]"));
        }
    return m;
}

FamilySpec read_family(const json& j, const std::string& path)
{
    if (!j.is_object()) throw InputError("field '" + path + "' must be an object");
    reject_unknown(j, {"family", "alpha"}, path);
    const json& name = field(j, "family", path);
    if (!name.is_string()) throw InputError("field '" + path + ".family' must be a string");
    FamilySpec spec{name.get<std::string>(), std::nullopt};
    if (j.contains("alpha")) {
        if (spec.family != "renyi") throw InputError("unknown field '" + path + ".alpha' for family " + spec.family);
        spec.alpha = read_number(j["alpha"], path + ".alpha");
    } else if (spec.family == "renyi") {
        throw InputError("missing field '" + path + ".alpha'");
    }
    make_generator(spec);  // validates the name and parameters
    return spec;
}

json parse_document(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

// ---- output ----------------------------------------------------------------

json num(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json matrix_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({num(m(r, c).real()), num(m(r, c).imag())}));
        rows.push_back(row);
    }
    return rows;
}

json family_json(const FamilySpec& f)
{
    json j;
    j["family"] = f.family;
    if (f.alpha) j["alpha"] = num(*f.alpha);
    return j;
}

void emit(const json& j, std::ostringstream& os, int indent)
{
    const std::string pad(indent, ' ');
    const std::string inner(indent + 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            break;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << inner << json(it.key()).dump() << ": ";
            emit(it.value(), os, indent + 2);
        }
        os << "\n" << pad << "}";
        break;
    }
    case json::value_t::array: {
        bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        if (j.empty()) {
            os << "[]";
        } else if (flat) {
            os << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                emit(j[i], os, indent);
            }
            os << "]";
        } else {
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << inner;
                emit(j[i], os, indent + 2);
            }
            os << "\n" << pad << "]";
        }
        break;
    }
    case json::value_t::number_float: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
        os << buf;
        break;
    }
    default:
        os << j.dump();
    }
}

std::string render(const json& j)
{
    std::ostringstream os;
    emit(j, os, 0);
    os << "\n";
    return os.str();
}

json result_json(const DivergenceResult& r)
{
    json j;
    j["value"] = num(r.value);
    j["finite"] = r.finite;
    j["path"] = std::string(to_string(r.path));
    j["swapped"] = r.swapped;
    j["iterations"] = r.iterations;
    j["gradient_residual"] = r.gradient_residual ? num(*r.gradient_residual) : json(nullptr);
    j["converged"] = r.converged;
    j["warnings"] = r.warnings;
    j["optimizer_T"] = r.optimizer_T ? matrix_json(r.optimizer_T->matrix()) : json(nullptr);
    return j;
}

SolveOptions solve_options(const RunFlags& flags)
{
    if (!(flags.tol > 0)) throw InputError("--tol must be positive");
    if (flags.max_iter < 1) throw InputError("--max-iter must be at least 1");
    SolveOptions o;
    o.tol = flags.tol;
    o.max_iter = flags.max_iter;
    if (flags.force_path) {
        o.force_path = path_from_string(*flags.force_path);
        if (!o.force_path || *o.force_path == SolverPath::infinite)
            throw InputError("unknown --force-path '" + *flags.force_path + "'");
    }
    return o;
}

const FamilySpec& require_family(const ProblemSpec& p)
{
    if (!p.family) throw InputError("missing field 'family'");
    return *p.family;
}

RunOutcome run_compute(const std::string& text, const RunFlags& flags)
{
    ProblemSpec p = parse_problem(text);
    const FamilySpec& fam = require_family(p);
    DivergenceResult r = solve(make_generator(fam), DensityOperator(p.rho1), DensityOperator(p.rho2), solve_options(flags));
    json j;
    j["command"] = "compute";
    j["family"] = family_json(fam);
    j.update(result_json(r));
    return {r.converged ? kExitOk : kExitNoConvergence, render(j)};
}

RunOutcome run_verify(const std::string& text, const RunFlags& flags)
{
    ProblemSpec p = parse_problem(text);
    const FamilySpec& fam = require_family(p);
    if (flags.restarts < 0) throw InputError("--restarts must be non-negative");
    DivergenceGenerator f = make_generator(fam);
    DensityOperator r1(p.rho1), r2(p.rho2);
    SolveOptions so = solve_options(flags);
    DivergenceResult r = solve(f, r1, r2, so);
    PvmSearchOptions po;
    po.restarts = flags.restarts;
    po.seed = flags.seed;
    po.solver_warm_start = false;
    if (r.optimal_basis) po.warm_starts.push_back(*r.optimal_basis);
    PvmSearchResult o = pvm_search(f, r1, r2, po);

    json j;
    j["command"] = "verify";
    j["family"] = family_json(fam);
    j["solver_value"] = num(r.value);
    j["solver_path"] = std::string(to_string(r.path));
    j["oracle_value"] = num(o.value);
    j["gap"] = num(r.value - o.value);
    j["restarts"] = flags.restarts;
    j["seed"] = flags.seed;
    json effects = json::array();
    for (const Matrix& e : o.best.effects()) effects.push_back(matrix_json(e));
    j["best_effects"] = effects;
    j["warnings"] = r.warnings;
    return {r.converged ? kExitOk : kExitNoConvergence, render(j)};
}

RunOutcome run_fisher(const std::string& text, const RunFlags& flags)
{
    SecondOrderReport rep;
    json j;
    j["command"] = "fisher";
    SolveOptions so = solve_options(flags);
    if (flags.builtin) {
        FamilySpec fam = read_family(parse_document(flags.divergence), "divergence");
        if (!(flags.step > 0)) throw InputError("--step must be positive");
        SecondOrderOptions opts;
        opts.h = flags.step;
        opts.solve = so;
        rep = second_order_check(make_generator(fam), builtin_family(*flags.builtin, flags.builtin_param), flags.eta, opts);
        j["family"] = family_json(fam);
        j["builtin"] = *flags.builtin;
        j["eta"] = num(flags.eta);
        j["step"] = num(flags.step);
    } else {
        FisherSpec fs = parse_fisher(text);
        rep = second_order_from_samples(make_generator(fs.family), DensityOperator(fs.minus), DensityOperator(fs.center),
                                        DensityOperator(fs.plus), fs.step, so);
        j["family"] = family_json(fs.family);
        j["step"] = num(fs.step);
    }
    j["lhs"] = num(rep.lhs);
    j["rhs"] = num(rep.rhs);
    j["gap"] = num(rep.gap);
    j["naive_prediction"] = num(rep.naive);
    j["lhs_unextrapolated"] = num(rep.lhs_coarse);
    j["J_S"] = num(rep.J_S);
    j["J1"] = num(rep.J1);
    j["J2"] = num(rep.J2);
    j["J2_literal"] = num(rep.J2_literal);
    return {kExitOk, render(j)};
}

RunOutcome run_compare(const std::string& text, const RunFlags& flags)
{
    ProblemSpec p = parse_problem(text);
    if (!flags.alpha) throw InputError("compare needs --alpha");
    GapReport g = gap_report(*flags.alpha, DensityOperator(p.rho1), DensityOperator(p.rho2), solve_options(flags));
    json j;
    j["command"] = "compare";
    j["alpha"] = num(g.alpha);
    j["single_copy_value"] = num(g.single_copy_value);
    j["asymptotic_value"] = num(g.asymptotic_value);
    j["single_copy_log"] = num(g.single_copy_log);
    j["asymptotic_log"] = num(g.asymptotic_log);
    j["gap"] = num(g.gap);
    j["commuting"] = g.commuting;
    return {kExitOk, render(j)};
}

} // namespace

DivergenceGenerator make_generator(const FamilySpec& spec)
{
    const std::string& n = spec.family;
    if (n == "renyi") {
        if (!spec.alpha) throw InputError("family renyi needs alpha");
        return families::renyi(*spec.alpha);
    }
    if (spec.alpha) throw InputError("family " + n + " takes no alpha");
    if (n == "kl") return families::kl();
    if (n == "reverse-kl") return families::reverse_kl();
    if (n == "tv") return families::total_variation();
    if (n == "fb") return families::fb();
    if (n == "chi2") return families::chi2();
    if (n == "fidelity") return families::fidelity();
    throw InputError("unknown family '" + n + "'");
}

ProblemSpec parse_problem(const std::string& text)
{
    json doc = parse_document(text);
    if (!doc.is_object()) throw InputError("problem document must be a JSON object");
    reject_unknown(doc, {"family", "rho1", "rho2"}, "");
    ProblemSpec p;
    if (doc.contains("family")) p.family = read_family(doc["family"], "family");
    p.rho1 = read_matrix(field(doc, "rho1", ""), "rho1");
    p.rho2 = read_matrix(field(doc, "rho2", ""), "rho2");
    if (p.rho1.rows() != p.rho2.rows())
        throw InputError("rho1 and rho2 have different dimensions (" + std::to_string(p.rho1.rows()) + " vs " +
                         std::to_string(p.rho2.rows()) + ")");
    return p;
}

std::string serialize_problem(const ProblemSpec& spec)
{
    json j;
    if (spec.family) j["family"] = family_json(*spec.family);
    j["rho1"] = matrix_json(spec.rho1);
    j["rho2"] = matrix_json(spec.rho2);
    return render(j);
}

FamilySpec parse_family(const std::string& text) { return read_family(parse_document(text), "family"); }

FisherSpec parse_fisher(const std::string& text)
{
    json doc = parse_document(text);
    if (!doc.is_object()) throw InputError("fisher document must be a JSON object");
    reject_unknown(doc, {"family", "samples", "step"}, "");
    FisherSpec s;
    s.family = read_family(field(doc, "family", ""), "family");
    const json& samples = field(doc, "samples", "");
    if (!samples.is_array() || samples.size() != 3)
        throw InputError("field 'samples' must hold three matrices (eta0 - h, eta0, eta0 + h)");
    s.minus = read_matrix(samples[0], "samples[0]");
    s.center = read_matrix(samples[1], "samples[1]");
    s.plus = read_matrix(samples[2], "samples[2]");
    if (s.minus.rows() != s.center.rows() || s.plus.rows() != s.center.rows())
        throw InputError("field 'samples' mixes dimensions");
    s.step = read_number(field(doc, "step", ""), "step");
    if (!(s.step > 0)) throw InputError("field 'step' must be positive");
    return s;
}

RunOutcome run(Command cmd, const std::string& input_text, const RunFlags& flags)
{
    try {
        switch (cmd) {
        case Command::compute: return run_compute(input_text, flags);
        case Command::verify: return run_verify(input_text, flags);
        case Command::fisher: return run_fisher(input_text, flags);
        case Command::compare: return run_compare(input_text, flags);
        }
    } catch (const InputError& e) {
        return {kExitInput, render(json{{"error", e.what()}})};
    } catch (const DomainError& e) {
        return {kExitInput, render(json{{"error", e.what()}})};
    } catch (const PreconditionError& e) {
        return {kExitInput, render(json{{"error", e.what()}})};
    } catch (const UnsupportedFamilyError& e) {
        return {kExitInput, render(json{{"error", e.what()}})};
    } catch (const RankChangeError& e) {
        return {kExitInput, render(json{{"error", e.what()}})};
    }
    return {kExitInput, render(json{{"error", "unknown command"}})};
}

} // namespace qfdiv
