#include "dse/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace dse {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError("scenario: " + what + " must be an array of row arrays");
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    std::vector<double> entries;
    entries.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols)
            throw ConfigError("scenario: ragged rows in " + what);
        for (const auto& v : row) entries.push_back(v.get<double>());
    }
    return make_matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols), entries);
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Vector vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError("scenario: " + what + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    if (!v.allFinite()) throw ConfigError("scenario: non-finite entry in " + what);
    return v;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

}  // namespace

WalkOrder Scenario::validate_and_walk() const {
    if (a.rows() == 0) throw ConfigError("scenario: missing system matrix");
    if (x0.size() != a.rows()) throw ConfigError("scenario: x0 dimension mismatch");
    if (node_count != static_cast<int>(sensors.size()))
        throw ConfigError("scenario: node count must match sensor count");
    if (static_cast<int>(agents.size()) != node_count)
        throw ConfigError("scenario: one observer config per node required");
    for (const auto& cfg : agents) cfg.check();
    if (!(dt > 0)) throw ConfigError("scenario: dt must be positive");
    if (!(t_final > 0) || dt > t_final / 100.0)
        throw ConfigError("scenario: need dt <= t_final / 100");
    if (message_period < 0) throw ConfigError("scenario: negative message period");
    if (noise && noise->amplitude < 0) throw ConfigError("scenario: negative noise amplitude");
    if (noise && noise->sensor && (*noise->sensor < 1 || *noise->sensor > node_count))
        throw ConfigError("scenario: noise sensor out of range");

    LtiSystem sys = system();  // checks joint observability
    if (stable_plant && !sys.is_hurwitz())
        throw ConfigError("scenario: plant declared stable but A is not Hurwitz");

    DiGraph g = graph();
    if (!switching.empty()) {
        SwitchingSchedule sched(switching);
        sched.check_coverage(0.0, t_final);
        // Transfers ride the union of the scheduled edges; the walk must fit it.
        for (const auto& e : sched.union_edges())
            if (!g.has_edge(e.first, e.second))
                throw ConfigError("scenario: switching schedule activates unknown edge " +
                                  std::to_string(e.first) + "->" + std::to_string(e.second));
    }

    const bool need_closed = objective == Objective::kO2;
    WalkOrder w;
    if (walk) {
        w = *walk;
        if (need_closed && !w.closed)
            throw ConfigError("scenario: objective O2 requires a closed Hamiltonian walk");
        auto diag = validate_walk(g, w);
        if (!diag.valid) throw ConfigError("scenario: invalid walk: " + diag.reason);
    } else {
        auto found = find_walk(g, need_closed);
        if (!found)
            throw ConfigError(need_closed ? "scenario: no closed Hamiltonian walk"
                                          : "scenario: no open Hamiltonian walk");
        w = *found;
    }
    if (consensus_cfg) {
        if (objective != Objective::kO2)
            throw ConfigError("scenario: consensus requires objective O2");
        consensus_cfg->check(g, node_count);
    }
    return w;
}

Scenario scenario_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }
    try {
        Scenario s;
        s.name = j.value("name", "");
        const auto& sys = j.at("system");
        s.a = matrix_from_json(sys.at("A"), "system.A");
        for (const auto& c : sys.at("sensors")) s.sensors.push_back(matrix_from_json(c, "sensor block"));
        s.x0 = vector_from_json(j.at("x0"), "x0");
        s.stable_plant = j.value("stable_plant", true);

        const auto& graph = j.at("graph");
        s.node_count = graph.at("nodes").get<int>();
        for (const auto& e : graph.value("edges", json::array())) {
            Edge edge;
            edge.from = e.at("from").get<int>();
            edge.to = e.at("to").get<int>();
            edge.delay = e.value("delay", 0.0);
            s.edges.push_back(edge);
        }
        if (graph.contains("switching")) {
            for (const auto& seg : graph.at("switching")) {
                SwitchingSchedule::Segment segment;
                segment.t_from = seg.at("from").get<double>();
                segment.t_to = seg.at("to").get<double>();
                for (const auto& e : seg.at("edges"))
                    segment.active.insert({e.at(0).get<int>(), e.at(1).get<int>()});
                s.switching.push_back(std::move(segment));
            }
        }

        if (j.contains("walk") && !j.at("walk").is_string()) {
            WalkOrder w;
            w.nodes = j.at("walk").get<std::vector<int>>();
            w.closed = !w.nodes.empty() && w.nodes.front() == w.nodes.back() && w.nodes.size() > 1;
            s.walk = w;
        } else if (j.contains("walk") && j.at("walk").get<std::string>() != "auto") {
            throw ConfigError("scenario: walk must be an array of nodes or \"auto\"");
        }

        for (const auto& a : j.at("agents")) {
            ObserverConfig cfg;
            cfg.lambda = a.at("lambda").get<double>();
            cfg.gamma = a.at("gamma").get<double>();
            cfg.mu = a.at("mu").get<double>();
            cfg.kappa = a.value("kappa", 1.0);
            if (a.contains("theta_init")) cfg.theta_hat_init = vector_from_json(a.at("theta_init"), "theta_init");
            s.agents.push_back(std::move(cfg));
        }

        s.dt = j.value("dt", 1e-3);
        s.t_final = j.at("t_final").get<double>();
        s.message_period = j.value("message_period", 0.0);
        const std::string pm = j.value("phi_mode", "shared");
        if (pm == "shared") s.phi_mode = PhiMode::kShared;
        else if (pm == "local") s.phi_mode = PhiMode::kLocal;
        else throw ConfigError("scenario: phi_mode must be \"shared\" or \"local\"");
        s.gradient_baseline = j.value("gradient_baseline", false);
        const std::string obj = j.value("objective", "O1");
        if (obj == "O1") s.objective = Objective::kO1;
        else if (obj == "O2") s.objective = Objective::kO2;
        else throw ConfigError("scenario: objective must be \"O1\" or \"O2\"");

        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            NoiseSpec spec;
            const std::string kind = n.value("type", "uniform");
            if (kind == "uniform") spec.kind = NoiseKind::kUniform;
            else if (kind == "gaussian") spec.kind = NoiseKind::kGaussian;
            else throw ConfigError("scenario: noise type must be \"uniform\" or \"gaussian\"");
            spec.amplitude = n.at("amplitude").get<double>();
            spec.seed = n.value("seed", 0ULL);
            spec.onset = n.value("onset", 0.0);
            if (n.contains("sensor")) spec.sensor = n.at("sensor").get<int>();
            s.noise = spec;
        }

        if (j.contains("consensus")) {
            const auto& c = j.at("consensus");
            ConsensusConfig cfg;
            const std::string mode = c.value("mode", "linear");
            if (mode == "linear") cfg.mode = ConsensusMode::kLinear;
            else if (mode == "finite_time") cfg.mode = ConsensusMode::kFiniteTime;
            else if (mode == "fixed_time") cfg.mode = ConsensusMode::kFixedTime;
            else throw ConfigError("scenario: unknown consensus mode " + mode);
            cfg.r = c.value("r", 0.5);
            cfg.r1 = c.value("r1", 0.5);
            cfg.r2 = c.value("r2", 1.5);
            DiGraph g(s.node_count, s.edges);
            if (c.contains("a") && c.at("a").is_array()) {
                cfg.a = matrix_from_json(c.at("a"), "consensus.a");
            } else {
                s.consensus_weight = c.value("a", 1.0);
                cfg.a = ConsensusConfig::uniform(g, *s.consensus_weight, 1.0, cfg.mode).a;
            }
            if (c.contains("p") && c.at("p").is_array()) {
                cfg.p = vector_from_json(c.at("p"), "consensus.p");
            } else {
                s.consensus_anchor = c.value("p", 1.0);
                cfg.p = Vector::Constant(s.node_count, *s.consensus_anchor);
            }
            s.consensus_cfg = std::move(cfg);
        }
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    if (!s.name.empty()) j["name"] = s.name;
    j["system"]["A"] = matrix_to_json(s.a);
    j["system"]["sensors"] = json::array();
    for (const auto& c : s.sensors) j["system"]["sensors"].push_back(matrix_to_json(c));
    j["x0"] = vector_to_json(s.x0);
    j["stable_plant"] = s.stable_plant;
    j["graph"]["nodes"] = s.node_count;
    j["graph"]["edges"] = json::array();
    for (const auto& e : s.edges) {
        json je{{"from", e.from}, {"to", e.to}};
        if (e.delay != 0.0) je["delay"] = e.delay;
        j["graph"]["edges"].push_back(je);
    }
    if (!s.switching.empty()) {
        json segs = json::array();
        for (const auto& seg : s.switching) {
            json js{{"from", seg.t_from}, {"to", seg.t_to}};
            js["edges"] = json::array();
            for (const auto& e : seg.active) js["edges"].push_back(json::array({e.first, e.second}));
            segs.push_back(js);
        }
        j["graph"]["switching"] = segs;
    }
    if (s.walk) j["walk"] = s.walk->nodes;
    else j["walk"] = "auto";
    j["agents"] = json::array();
    for (const auto& a : s.agents) {
        json ja{{"lambda", a.lambda}, {"gamma", a.gamma}, {"mu", a.mu}};
        if (a.kappa != 1.0) ja["kappa"] = a.kappa;
        if (a.theta_hat_init.size() > 0) ja["theta_init"] = vector_to_json(a.theta_hat_init);
        j["agents"].push_back(ja);
    }
    j["dt"] = s.dt;
    j["t_final"] = s.t_final;
    if (s.message_period != 0.0) j["message_period"] = s.message_period;
    j["phi_mode"] = s.phi_mode == PhiMode::kShared ? "shared" : "local";
    if (s.gradient_baseline) j["gradient_baseline"] = true;
    j["objective"] = s.objective == Objective::kO1 ? "O1" : "O2";
    if (s.noise) {
        j["noise"] = {{"type", s.noise->kind == NoiseKind::kUniform ? "uniform" : "gaussian"},
                      {"amplitude", s.noise->amplitude},
                      {"seed", s.noise->seed},
                      {"onset", s.noise->onset}};
        if (s.noise->sensor) j["noise"]["sensor"] = *s.noise->sensor;
    }
    if (s.consensus_cfg) {
        json jc;
        switch (s.consensus_cfg->mode) {
            case ConsensusMode::kLinear: jc["mode"] = "linear"; break;
            case ConsensusMode::kFiniteTime: jc["mode"] = "finite_time"; break;
            case ConsensusMode::kFixedTime: jc["mode"] = "fixed_time"; break;
        }
        if (s.consensus_weight) jc["a"] = *s.consensus_weight;
        else jc["a"] = matrix_to_json(s.consensus_cfg->a);
        if (s.consensus_anchor) jc["p"] = *s.consensus_anchor;
        else jc["p"] = vector_to_json(s.consensus_cfg->p);
        jc["r"] = s.consensus_cfg->r;
        jc["r1"] = s.consensus_cfg->r1;
        jc["r2"] = s.consensus_cfg->r2;
        j["consensus"] = jc;
    }
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("scenario: cannot write " + path);
    out << scenario_to_json(s);
}

}  // namespace dse
