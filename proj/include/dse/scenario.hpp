#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dse/canonical.hpp"
#include "dse/consensus.hpp"
#include "dse/network.hpp"
#include "dse/observer.hpp"

namespace dse {

enum class Objective { kO1, kO2 };
enum class PhiMode { kShared, kLocal };

enum class NoiseKind { kUniform, kGaussian };

/// Additive measurement disturbance: amplitude-scaled, seeded, active from
/// `onset`. Applied to one sensor or all of them.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::kUniform;
    double amplitude = 0.0;
    uint64_t seed = 0;
    double onset = 0.0;
    std::optional<int> sensor;  // 1-based; empty = all sensors
};

/// Complete, reproducible description of one experiment.
struct Scenario {
    std::string name;
    Matrix a;                         // plant matrix, user coordinates
    std::vector<Matrix> sensors;      // per-node output blocks
    Vector x0;                        // initial state, user coordinates
    bool stable_plant = true;         // require Hurwitz A

    int node_count = 0;
    std::vector<Edge> edges;
    std::optional<WalkOrder> walk;    // empty = find automatically
    std::vector<SwitchingSchedule::Segment> switching;

    std::vector<ObserverConfig> agents;  // indexed by node - 1
    double dt = 1e-3;
    double t_final = 3.0;
    double message_period = 0.0;      // 0 = one message per step
    PhiMode phi_mode = PhiMode::kShared;
    bool gradient_baseline = false;
    Objective objective = Objective::kO1;

    std::optional<NoiseSpec> noise;
    std::optional<ConsensusConfig> consensus_cfg;
    // Raw consensus fields kept for serialization (weights may be uniform).
    std::optional<double> consensus_weight;
    std::optional<double> consensus_anchor;

    DiGraph graph() const { return DiGraph(node_count, edges); }
    LtiSystem system() const { return LtiSystem(a, sensors); }

    /// Basic field validation plus walk/objective consistency. Returns the
    /// walk to use (supplied and validated, or found automatically).
    WalkOrder validate_and_walk() const;
};

Scenario scenario_from_json(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace dse
