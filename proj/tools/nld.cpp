// nld: batch front end for the nonlocal Dirichlet library.
//
//   nld <subcommand> --config run.json [--seed N] [--out DIR] [--threads N]
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include "nld/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

using nlohmann::json;
using namespace nld;

namespace {

void emit(const std::string& sub, const Artifacts& a, const std::string& out) {
    const std::string text = a.report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(out);
    const auto base = std::filesystem::path(out) / sub;
    std::ofstream(base.string() + ".json") << text;
    if (!a.csv.empty()) std::ofstream(base.string() + ".csv") << a.csv;
}

int fail(int code, const std::string& kind, const std::string& message) {
    json e = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << e.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal Dirichlet problems: solver, kernels, regularity checks and counterexamples"};
    app.require_subcommand(1);
    std::string config_path, out;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "seed (overrides the config)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory (default: JSON on stdout)");
    const std::vector<std::pair<std::string, std::string>> help{
        {"solve", "u(x) = -G_D[f](x) + P_D[g](x) by Monte Carlo"},
        {"kernel", "potential kernel profile and derivatives"},
        {"dini-check", "Dini integral of a modulus or regularity report of a field"},
        {"counterexample", "difference-quotient curve of the critical or corrected right-hand side"},
        {"exit-sim", "sample exit positions from a ball and test them against the exact law"}};
    for (const auto& [name, text] : help) app.add_subcommand(name, text);
    for (auto* s : app.get_subcommands({})) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fail(2, "usage", e.what());
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    Overrides ov;
    if (*seed_opt) ov.seed = seed;
    if (*threads_opt) ov.threads = threads;

    try {
        json cfg;
        {
            std::ifstream in(config_path);
            cfg = json::parse(in);
        }
        emit(sub, run(sub, cfg, ov), out);
        return 0;
    } catch (const json::exception& e) {
        return fail(2, "validation", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(2, "validation", e.what());
    } catch (const std::domain_error& e) {
        return fail(2, "validation", e.what());
    } catch (const std::runtime_error& e) {
        return fail(3, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(3, "numerical", e.what());
    }
}
