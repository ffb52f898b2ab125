#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dse/scenario.hpp"

namespace dse {

/// One logged sample of a single agent.
struct AgentSample {
    double err_norm = 0.0;   // block estimate error; the terminal agent logs the
                             // full-state error in user coordinates instead
    double delta = 0.0;      // det of the filtered information matrix
    double omega = 1.0;
    double theta_err = 0.0;  // raw parameter estimate error
    bool latched = false;
    Vector theta_hat;            // raw estimate, anchored frame
    Vector theta_true_anchored;  // what the estimate should converge to
    Vector theta_fct_orig;       // reconstructed estimate, user block parameters
    double grad_theta_err = 0.0; // gradient comparison estimator, when enabled
};

struct TraceRecord {
    double t = 0.0;
    std::vector<AgentSample> agents;     // walk first-visit order
    std::vector<double> consensus_err;   // per node, consensus runs only
    Vector x_true_user;
    Vector x_est_user;                   // terminal agent's full estimate
};

struct RunSummary {
    std::vector<int> walk_nodes;
    bool walk_closed = false;
    std::vector<int> agent_nodes;  // node ids in walk first-visit order
    std::vector<int> dims;
    std::vector<std::optional<double>> latch_times_s;
    std::vector<std::optional<double>> armed_times_s;
    std::vector<std::optional<double>> observed_convergence_s;
    std::optional<double> full_observed_convergence_s;
    std::vector<double> final_block_errors;
    double final_full_error = 0.0;
    std::map<std::string, bool> validation;
    double dt = 0.0;
    double t_final = 0.0;
    double convergence_threshold = 0.0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
    CanonicalForm canonical;
};

/// Runs the full experiment: canonical decomposition, estimators along the
/// walk, delayed channels, optional consensus layer, all on one fixed-step
/// clock. Deterministic given the scenario.
RunResult run(const Scenario& scenario, int decimate = 1);

/// traces.csv: header row, then one row per retained record; floats with 17
/// significant digits.
void write_traces_csv(const RunResult& result, std::ostream& out);
void write_traces_csv(const RunResult& result, const std::string& path);

std::string summary_to_json(const RunResult& result);
void write_summary_json(const RunResult& result, const std::string& path);

/// Canonical-form JSON document with embedded validation report.
std::string canonical_to_json(const CanonicalForm& cf, const ValidationReport& report);

}  // namespace dse
