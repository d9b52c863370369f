#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qfdiv/cli_io.hpp"

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw qfdiv::InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"measured f-divergences between quantum states"};
    app.require_subcommand(1);

    qfdiv::RunFlags flags;
    std::string file;
    std::string force_path;

    auto* compute = app.add_subcommand("compute", "optimal single-copy measured f-divergence");
    compute->add_option("-f,--file", file, "problem JSON")->required();
    compute->add_option("--tol", flags.tol, "projected-gradient tolerance");
    compute->add_option("--max-iter", flags.max_iter, "iteration cap");
    compute->add_option("--force-path", force_path, "solver path to force");

    auto* verify = app.add_subcommand("verify", "compare the solver with a brute-force measurement search");
    verify->add_option("-f,--file", file, "problem JSON")->required();
    verify->add_option("--restarts", flags.restarts, "random restarts");
    verify->add_option("--seed", flags.seed, "PRNG seed");

    auto* fisher = app.add_subcommand("fisher", "second-order expansion against SLD Fisher information");
    auto* ff = fisher->add_option("-f,--file", file, "three sampled states and the step");
    auto* fb = fisher->add_option("--builtin", flags.builtin, "built-in family name");
    ff->excludes(fb);
    fb->excludes(ff);
    fisher->add_option("--eta", flags.eta, "expansion point");
    fisher->add_option("--step", flags.step, "step h");
    fisher->add_option("--param", flags.builtin_param, "family parameter (rotating-qubit radius)");
    fisher->add_option("--divergence", flags.divergence, "family spec JSON for the divergence");

    auto* compare = app.add_subcommand("compare", "single-copy vs asymptotic Renyi values");
    compare->add_option("-f,--file", file, "problem JSON")->required();
    double alpha = 2.0;
    compare->add_option("--alpha", alpha, "Renyi order")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : qfdiv::kExitInput;
    }
    if (!force_path.empty()) flags.force_path = force_path;

    qfdiv::Command cmd;
    if (*compute) cmd = qfdiv::Command::compute;
    else if (*verify) cmd = qfdiv::Command::verify;
    else if (*fisher) cmd = qfdiv::Command::fisher;
    else {
        cmd = qfdiv::Command::compare;
        flags.alpha = alpha;
    }

    if (cmd == qfdiv::Command::fisher && file.empty() && !flags.builtin) {
        std::cerr << "fisher: pass -f <file> or --builtin <name>\n";
        return qfdiv::kExitInput;
    }

    std::string text;
    try {
        if (!file.empty()) text = slurp(file);
    } catch (const qfdiv::InputError& e) {
        std::cerr << e.what() << "\n";
        return qfdiv::kExitInput;
    }
    qfdiv::RunOutcome out = qfdiv::run(cmd, text, flags);
    std::cout << out.report;
    return out.exit_code;
}
