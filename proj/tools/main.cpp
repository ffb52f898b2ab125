// dse-sim: distributed finite-convergence-time state estimation simulator.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dse/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_simulate(const std::string& scenario_path, const std::string& out_dir, int decimate) {
    dse::Scenario s = dse::load_scenario(scenario_path);
    dse::RunResult result = dse::run(s, decimate);
    fs::create_directories(out_dir);
    dse::write_traces_csv(result, (fs::path(out_dir) / "traces.csv").string());
    dse::write_summary_json(result, (fs::path(out_dir) / "summary.json").string());
    std::cout << "wrote " << (fs::path(out_dir) / "traces.csv").string() << " and summary.json\n";
    const auto& sum = result.summary;
    for (size_t i = 0; i < sum.agent_nodes.size(); ++i) {
        std::cout << "agent " << sum.agent_nodes[i] << ": latch ";
        if (sum.latch_times_s[i]) std::cout << *sum.latch_times_s[i] << " s";
        else std::cout << "never";
        std::cout << ", final err " << sum.final_block_errors[i] << "\n";
    }
    return 0;
}

int run_decompose(const std::string& scenario_path, const std::string& out_file) {
    dse::Scenario s = dse::load_scenario(scenario_path);
    const dse::WalkOrder walk = s.validate_and_walk();
    dse::LtiSystem sys = s.system();
    std::vector<int> order;
    for (int v : walk.first_visit_order()) order.push_back(v - 1);
    dse::CanonicalForm cf = dse::decompose(sys, order);
    const dse::ValidationReport report = dse::validate(cf, sys);
    const std::string doc = dse::canonical_to_json(cf, report);
    if (out_file.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(out_file);
        if (!out) throw dse::ConfigError("cannot write " + out_file);
        out << doc;
        std::cout << "wrote " << out_file << "\n";
    }
    if (!report.all_pass()) throw dse::ConfigError("canonical form validation failed");
    return 0;
}

int run_check_walk(const std::string& scenario_path) {
    dse::Scenario s = dse::load_scenario(scenario_path);
    dse::DiGraph g = s.graph();
    const bool need_closed = s.objective == dse::Objective::kO2;
    if (s.walk) {
        auto diag = dse::validate_walk(g, *s.walk);
        if (diag.valid && need_closed && !s.walk->closed) {
            diag.valid = false;
            diag.reason = "objective O2 requires a closed walk";
        }
        std::cout << (diag.valid ? "walk valid" : "walk invalid: " + diag.reason) << "\n";
        if (!diag.valid) throw dse::ConfigError(diag.reason);
        return 0;
    }
    auto found = dse::find_walk(g, need_closed);
    if (!found) {
        const std::string what =
            need_closed ? "no closed Hamiltonian walk" : "no open Hamiltonian walk";
        std::cout << what << "\n";
        throw dse::ConfigError(what);
    }
    std::cout << "found walk:";
    for (int v : found->nodes) std::cout << " " << v;
    std::cout << (found->closed ? " (closed)" : " (open)") << "\n";
    return 0;
}

int run_compare(const std::string& scenario_path, const std::string& baseline_path,
                const std::string& out_file) {
    dse::Scenario s = dse::load_scenario(scenario_path);
    dse::RunResult result = dse::run(s);
    std::ifstream in(baseline_path);
    if (!in) throw dse::ConfigError("cannot open baseline " + baseline_path);
    json base = json::parse(in);

    json report;
    report["scenario"] = scenario_path;
    report["baseline"] = baseline_path;
    json shifts = json::array(), base_latch = base.value("latch_times_s", json::array());
    for (size_t i = 0; i < result.summary.latch_times_s.size(); ++i) {
        const auto& cur = result.summary.latch_times_s[i];
        if (cur && i < base_latch.size() && !base_latch[i].is_null())
            shifts.push_back(*cur - base_latch[i].get<double>());
        else
            shifts.push_back(nullptr);
    }
    report["latch_shift_s"] = shifts;
    json err_ratio = json::array(), base_err = base.value("final_error_norms", json::array());
    for (size_t i = 0; i < result.summary.final_block_errors.size(); ++i) {
        if (i < base_err.size() && base_err[i].get<double>() > 0)
            err_ratio.push_back(result.summary.final_block_errors[i] / base_err[i].get<double>());
        else
            err_ratio.push_back(nullptr);
    }
    report["final_error_ratio"] = err_ratio;
    report["all_agents_latched"] = result.summary.validation.at("all_agents_latched");
    const std::string doc = report.dump(2) + "\n";
    if (out_file.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(out_file);
        if (!out) throw dse::ConfigError("cannot write " + out_file);
        out << doc;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed finite-convergence-time state estimation simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", out_file, baseline_path;
    int decimate = 1;

    auto* sim = app.add_subcommand("simulate", "Run a scenario; write traces.csv and summary.json");
    sim->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sim->add_option("--out", out_dir, "Output directory (default: out)");
    sim->add_option("--decimate", decimate, "Keep every k-th trace record")->check(CLI::PositiveNumber);

    auto* dec = app.add_subcommand("decompose", "Dump the observable canonical form as JSON");
    dec->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    dec->add_option("--out", out_file, "Output file (default: stdout)");

    auto* chk = app.add_subcommand("check-walk", "Validate or search a Hamiltonian walk");
    chk->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    auto* cmp = app.add_subcommand("compare", "Differential report against a baseline summary");
    cmp->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    cmp->add_option("--baseline", baseline_path, "Baseline summary.json")->required();
    cmp->add_option("--out", out_file, "Output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(scenario_path, out_dir, decimate);
        if (dec->parsed()) return run_decompose(scenario_path, out_file);
        if (chk->parsed()) return run_check_walk(scenario_path);
        if (cmp->parsed()) return run_compare(scenario_path, baseline_path, out_file);
    } catch (const dse::IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const dse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
