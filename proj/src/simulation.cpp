#include "dse/simulation.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "dse/integrate.hpp"

namespace dse {

namespace {

// Deterministic noise source; raw bits are mapped by hand so the stream does
// not depend on the standard library's distribution implementations.
class NoiseStream {
   public:
    NoiseStream(const NoiseSpec& spec) : spec_(spec), rng_(spec.seed) {}

    double sample() {
        if (spec_.kind == NoiseKind::kUniform) return spec_.amplitude * (unit() * 2.0 - 1.0);
        if (have_spare_) {
            have_spare_ = false;
            return spec_.amplitude * spare_;
        }
        double u1 = unit(), u2 = unit();
        while (u1 <= 1e-300) u1 = unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return spec_.amplitude * radius * std::cos(2.0 * M_PI * u2);
    }

   private:
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }  // [0, 1)
    NoiseSpec spec_;
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct BlockKnowledge {
    bool has = false;
    bool latched = false;
    double origin = -1.0;  // freshness stamp set by the owning node
    Vector value;          // user-frame block parameters
};

struct AgentRt {
    int pos = 0;       // walk first-visit position, 0-based
    int node = 0;      // 1-based node id
    int ni = 0;        // own block size
    int pi = 0;        // leading dimension (sum of block sizes up to pos)
    int off_p = 0;     // own block offset (= pi - ni)
    ObserverConfig cfg;
    Vector theta_init;
    Matrix c_row;      // agent's output rows over the leading pi columns
    Matrix a_lead;     // leading principal block of the canonical A

    bool armed = false;
    bool latched = false;
    std::optional<double> arm_time;
    std::optional<double> latch_time;

    Matrix phi_anchor;       // Phi^{(pos)} at the arming time
    Matrix phi_anchor_inv;
    Eigen::PartialPivLU<Matrix> anchor_pp_lu;  // own diagonal block of phi_anchor
    Vector upstream_anchor;  // reconstructed x^{(<pos)} at the arming time
    Vector upstream_orig;    // upstream block parameters frozen at arming
    Vector theta_true_anchored;

    Vector noise;  // current measurement disturbance, held per step

    // flat-state offsets
    int y_off = -1, gram_off = -1, omega_off = -1, theta_off = -1, grad_off = -1, phi_loc_off = -1;
};

struct Layout {
    int n = 0;
    int phi_off = 0;
    std::vector<int> z_off;  // per block position, -1 when absent
    int total = 0;
};

Eigen::Map<const Matrix> map_mat(const Vector& y, int off, int rows, int cols) {
    return Eigen::Map<const Matrix>(y.data() + off, rows, cols);
}
Eigen::Map<Matrix> map_mat(Vector& y, int off, int rows, int cols) {
    return Eigen::Map<Matrix>(y.data() + off, rows, cols);
}

std::vector<double> encode_table(const std::vector<BlockKnowledge>& table) {
    std::vector<double> out;
    for (const auto& b : table) {
        out.push_back(b.has ? 1.0 : 0.0);
        out.push_back(b.latched ? 1.0 : 0.0);
        out.push_back(b.origin);
        for (Eigen::Index i = 0; i < b.value.size(); ++i) out.push_back(b.value(i));
    }
    return out;
}

void merge_payload(std::vector<BlockKnowledge>& table, const std::vector<double>& payload,
                   const std::vector<int>& dims) {
    size_t k = 0;
    for (size_t b = 0; b < dims.size(); ++b) {
        const bool has = payload[k++] > 0.5;
        const bool latched = payload[k++] > 0.5;
        const double origin = payload[k++];
        Vector v(dims[b]);
        for (int i = 0; i < dims[b]; ++i) v(i) = payload[k++];
        if (has && (!table[b].has || origin > table[b].origin)) {
            table[b].has = true;
            table[b].latched = latched;
            table[b].origin = origin;
            table[b].value = v;
        }
    }
}

}  // namespace

RunResult run(const Scenario& scenario, int decimate) {
    if (decimate < 1) throw ConfigError("run: decimate must be >= 1");
    const WalkOrder walk = scenario.validate_and_walk();
    const LtiSystem sys = scenario.system();
    const DiGraph graph = scenario.graph();
    SwitchingSchedule schedule;
    if (!scenario.switching.empty()) schedule = SwitchingSchedule(scenario.switching);

    const std::vector<int> agent_nodes = walk.first_visit_order();
    std::vector<int> order;
    for (int v : agent_nodes) order.push_back(v - 1);
    CanonicalForm cf = decompose(sys, order);

    const int n = sys.state_dim();
    const int nblocks = cf.block_count();
    const Vector x0_can = cf.t.transpose() * scenario.x0;
    const double x0_norm = scenario.x0.norm();

    // --- agents -----------------------------------------------------------
    std::vector<AgentRt> agents(static_cast<size_t>(nblocks));
    Layout lay;
    lay.n = n;
    int off = n;
    lay.phi_off = off;
    off += n * n;
    for (int p = 0; p < nblocks; ++p) {
        AgentRt& a = agents[static_cast<size_t>(p)];
        a.pos = p;
        a.node = agent_nodes[static_cast<size_t>(p)];
        a.ni = cf.dims[static_cast<size_t>(p)];
        a.pi = cf.prefix_dim(p);
        a.off_p = a.pi - a.ni;
        a.cfg = scenario.agents[static_cast<size_t>(a.node - 1)];
        a.cfg.check();
        a.theta_init = a.cfg.theta_hat_init.size() == 0 ? Vector::Zero(a.ni) : a.cfg.theta_hat_init;
        if (a.theta_init.size() != a.ni)
            throw ConfigError("scenario: theta_init of node " + std::to_string(a.node) + " must have " +
                              std::to_string(a.ni) + " entries");
        a.c_row = cf.c_rows(p).leftCols(a.pi);
        a.a_lead = cf.a_can.topLeftCorner(a.pi, a.pi);
        a.noise = Vector::Zero(a.c_row.rows());
        if (a.ni > 0) {
            a.y_off = off; off += a.ni;
            a.gram_off = off; off += a.ni * a.ni;
            a.omega_off = off; off += 1;
            a.theta_off = off; off += a.ni;
            if (scenario.gradient_baseline) { a.grad_off = off; off += a.ni; }
        }
        if (scenario.phi_mode == PhiMode::kLocal) { a.phi_loc_off = off; off += a.pi * a.pi; }
    }
    const bool with_consensus = scenario.consensus_cfg.has_value();
    lay.z_off.assign(static_cast<size_t>(nblocks), -1);
    if (with_consensus) {
        for (int p = 0; p < nblocks; ++p) {
            if (cf.dims[static_cast<size_t>(p)] == 0) continue;
            lay.z_off[static_cast<size_t>(p)] = off;
            off += graph.node_count() * cf.dims[static_cast<size_t>(p)];
        }
    }
    lay.total = off;

    // --- transport --------------------------------------------------------
    std::vector<std::pair<int, int>> walk_edges;
    for (size_t i = 0; i + 1 < walk.nodes.size(); ++i) {
        const std::pair<int, int> e{walk.nodes[i], walk.nodes[i + 1]};
        if (std::find(walk_edges.begin(), walk_edges.end(), e) == walk_edges.end())
            walk_edges.push_back(e);
    }
    std::vector<ChannelBuffer> channels;
    for (const auto& [u, v] : walk_edges) {
        const Edge* e = graph.find_edge(u, v);
        if (!e) throw ConfigError("run: walk uses missing edge");  // validate_walk already checked
        channels.emplace_back(*e);
    }
    std::vector<std::vector<BlockKnowledge>> tables(static_cast<size_t>(graph.node_count() + 1));
    for (auto& t : tables) {
        t.resize(static_cast<size_t>(nblocks));
        for (int p = 0; p < nblocks; ++p)
            t[static_cast<size_t>(p)].value = Vector::Zero(cf.dims[static_cast<size_t>(p)]);
    }

    std::optional<NoiseStream> noise_stream;
    if (scenario.noise && scenario.noise->amplitude > 0) noise_stream.emplace(*scenario.noise);

    // --- initial flat state -------------------------------------------------
    Vector y = Vector::Zero(lay.total);
    y.head(n) = x0_can;
    map_mat(y, lay.phi_off, n, n) = Matrix::Identity(n, n);
    for (auto& a : agents) {
        if (a.ni > 0) {
            y(a.omega_off) = 1.0;
            y.segment(a.theta_off, a.ni) = a.theta_init;
            if (a.grad_off >= 0) y.segment(a.grad_off, a.ni) = a.theta_init;
        }
        if (a.phi_loc_off >= 0) map_mat(y, a.phi_loc_off, a.pi, a.pi) = Matrix::Identity(a.pi, a.pi);
    }

    // Anchored frame conversion: the filters estimate x^{(pos)} at the arming
    // time; block parameters in the user frame come from solving the anchor's
    // own diagonal block.
    auto theta_fct_orig = [&](const AgentRt& a, const Vector& theta_hat, double omega) -> Vector {
        if (a.ni == 0) return Vector(0);
        if (!a.armed) return a.theta_init;
        const Vector fct = fct_reconstruct(theta_hat, a.theta_init, omega, a.cfg.mu).theta_fct;
        if (a.off_p == 0) return a.anchor_pp_lu.solve(fct);
        return a.anchor_pp_lu.solve(fct - a.phi_anchor.block(a.off_p, 0, a.ni, a.off_p) * a.upstream_orig);
    };

    auto phi_leading_abs = [&](const AgentRt& a, const Vector& state) -> Matrix {
        if (scenario.phi_mode == PhiMode::kShared)
            return map_mat(state, lay.phi_off, n, n).topLeftCorner(a.pi, a.pi);
        const Matrix loc = map_mat(state, a.phi_loc_off, a.pi, a.pi);
        return a.armed ? Matrix(loc * a.phi_anchor) : loc;
    };

    auto phi_anchored = [&](const AgentRt& a, const Vector& state) -> Matrix {
        if (scenario.phi_mode == PhiMode::kLocal) return map_mat(state, a.phi_loc_off, a.pi, a.pi);
        return map_mat(state, lay.phi_off, n, n).topLeftCorner(a.pi, a.pi) * a.phi_anchor_inv;
    };

    // --- coupled right-hand side -------------------------------------------
    auto rhs = [&](double, const Vector& s, Vector& ds) {
        ds.setZero();
        ds.head(n) = cf.a_can * s.head(n);
        map_mat(ds, lay.phi_off, n, n) = cf.a_can * map_mat(s, lay.phi_off, n, n);
        for (const auto& a : agents) {
            if (a.phi_loc_off >= 0)
                map_mat(ds, a.phi_loc_off, a.pi, a.pi) = a.a_lead * map_mat(s, a.phi_loc_off, a.pi, a.pi);
            if (!a.armed || a.ni == 0) continue;
            const Matrix phi_anch = phi_anchored(a, s);
            const Matrix psi = a.cfg.kappa * regressor(a.c_row.rightCols(a.ni),
                                                       phi_anch.block(a.off_p, a.off_p, a.ni, a.ni));
            const Vector y_meas = a.c_row * s.head(a.pi) + a.noise;
            const Vector ytt =
                a.cfg.kappa * perturbed_output(y_meas, a.c_row, phi_anch, a.upstream_anchor, a.ni);

            DremFilters f;
            f.y_filter = s.segment(a.y_off, a.ni);
            f.omega_gram = map_mat(s, a.gram_off, a.ni, a.ni);
            f.omega = s(a.omega_off);
            f.theta_hat = s.segment(a.theta_off, a.ni);
            const DremDerivatives d = drem_rhs(f, a.cfg, ytt, psi);
            ds.segment(a.y_off, a.ni) = d.y_filter_dot;
            map_mat(ds, a.gram_off, a.ni, a.ni) = d.omega_gram_dot;
            ds(a.omega_off) = d.omega_dot;
            ds.segment(a.theta_off, a.ni) = d.theta_hat_dot;
            if (a.grad_off >= 0)
                ds.segment(a.grad_off, a.ni) =
                    gradient_baseline_rhs(s.segment(a.grad_off, a.ni), a.cfg, ytt, psi);
        }
        if (with_consensus) {
            for (const auto& a : agents) {
                if (a.ni == 0) continue;
                const int zoff = lay.z_off[static_cast<size_t>(a.pos)];
                std::vector<Vector> z(static_cast<size_t>(graph.node_count()));
                for (int k = 0; k < graph.node_count(); ++k)
                    z[static_cast<size_t>(k)] = s.segment(zoff + k * a.ni, a.ni);
                const Vector fct = theta_fct_orig(a, s.segment(a.theta_off, a.ni), s(a.omega_off));
                const auto dz =
                    consensus_rhs(z, *scenario.consensus_cfg, graph, a.node - 1, fct);
                for (int k = 0; k < graph.node_count(); ++k)
                    ds.segment(zoff + k * a.ni, a.ni) = dz[static_cast<size_t>(k)];
            }
        }
    };

    // --- main loop ----------------------------------------------------------
    const double dt = scenario.dt;
    const int steps = static_cast<int>(std::llround(scenario.t_final / dt));
    const int send_every =
        scenario.message_period <= 0.0 ? 1 : std::max(1, static_cast<int>(std::llround(scenario.message_period / dt)));

    RunResult result;
    result.canonical = cf;
    result.trace.reserve(static_cast<size_t>(steps / decimate) + 2);

    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;

        // latch detection
        for (auto& a : agents) {
            if (!a.armed || a.latched) continue;
            const bool crossed = a.ni == 0 || y(a.omega_off) < 1.0 - a.cfg.mu;
            if (crossed) {
                a.latched = true;
                a.latch_time = t;
            }
        }
        // sends along the walk edges
        if (k % send_every == 0) {
            for (auto& a : agents) {
                auto& own = tables[static_cast<size_t>(a.node)][static_cast<size_t>(a.pos)];
                own.has = true;
                own.latched = a.latched;
                own.origin = t;
                own.value = a.ni == 0 ? Vector(0)
                                      : theta_fct_orig(a, y.segment(a.theta_off, a.ni), y(a.omega_off));
            }
            for (size_t c = 0; c < channels.size(); ++c) {
                const auto [u, v] = walk_edges[c];
                if (!schedule.active_at(u, v, t)) continue;
                channels[c].send(t, encode_table(tables[static_cast<size_t>(u)]), u);
            }
        }
        // deliveries
        for (size_t c = 0; c < channels.size(); ++c) {
            const int dst = walk_edges[c].second;
            for (auto& msg : channels[c].poll(t))
                merge_payload(tables[static_cast<size_t>(dst)], msg.payload, cf.dims);
        }
        // arming: every upstream block latched in this node's table
        for (auto& a : agents) {
            if (a.armed) continue;
            bool ready = true;
            for (int j = 0; j < a.pos && ready; ++j)
                ready = tables[static_cast<size_t>(a.node)][static_cast<size_t>(j)].latched;
            if (!ready) continue;
            a.armed = true;
            a.arm_time = t;
            if (scenario.phi_mode == PhiMode::kShared) {
                a.phi_anchor = map_mat(y, lay.phi_off, n, n).topLeftCorner(a.pi, a.pi);
            } else {
                a.phi_anchor = map_mat(y, a.phi_loc_off, a.pi, a.pi);
                map_mat(y, a.phi_loc_off, a.pi, a.pi) = Matrix::Identity(a.pi, a.pi);
            }
            a.phi_anchor_inv = a.phi_anchor.inverse();
            if (a.ni > 0)
                a.anchor_pp_lu.compute(a.phi_anchor.block(a.off_p, a.off_p, a.ni, a.ni));
            a.upstream_orig = Vector(a.off_p);
            for (int j = 0; j < a.pos; ++j) {
                const auto& b = tables[static_cast<size_t>(a.node)][static_cast<size_t>(j)];
                a.upstream_orig.segment(cf.state_off[static_cast<size_t>(j)], cf.dims[static_cast<size_t>(j)]) =
                    b.value;
            }
            a.upstream_anchor = a.phi_anchor.topLeftCorner(a.off_p, a.off_p) * a.upstream_orig;
            a.theta_true_anchored = y.segment(cf.state_off[static_cast<size_t>(a.pos)], a.ni);
        }

        // record
        if (k % decimate == 0 || k == steps) {
            TraceRecord rec;
            rec.t = t;
            rec.x_true_user = cf.t * y.head(n);
            for (auto& a : agents) {
                AgentSample smp;
                smp.latched = a.latched;
                if (a.ni > 0) {
                    smp.omega = y(a.omega_off);
                    smp.theta_hat = y.segment(a.theta_off, a.ni);
                    if (a.armed) {
                        smp.delta = adjugate_and_det(map_mat(y, a.gram_off, a.ni, a.ni)).second;
                        smp.theta_true_anchored = a.theta_true_anchored;
                    } else {
                        smp.theta_true_anchored = y.segment(cf.state_off[static_cast<size_t>(a.pos)], a.ni);
                    }
                    smp.theta_err = (smp.theta_hat - smp.theta_true_anchored).norm();
                    smp.theta_fct_orig = theta_fct_orig(a, smp.theta_hat, smp.omega);
                    if (a.grad_off >= 0)
                        smp.grad_theta_err = (y.segment(a.grad_off, a.ni) - smp.theta_true_anchored).norm();
                } else {
                    smp.omega = 1.0;
                }
                // leading-state estimate from currently known block parameters
                Vector stack(a.pi);
                for (int j = 0; j < a.pos; ++j) {
                    const auto& b = tables[static_cast<size_t>(a.node)][static_cast<size_t>(j)];
                    stack.segment(cf.state_off[static_cast<size_t>(j)], cf.dims[static_cast<size_t>(j)]) = b.value;
                }
                if (a.ni > 0) stack.segment(a.off_p, a.ni) = smp.theta_fct_orig;
                const Vector x_lead = state_estimate(phi_leading_abs(a, y), stack);
                if (a.pos == nblocks - 1) {
                    rec.x_est_user = cf.t * x_lead;
                    smp.err_norm = (rec.x_est_user - rec.x_true_user).norm();
                } else if (a.ni > 0) {
                    smp.err_norm = (x_lead.tail(a.ni) - y.segment(a.off_p, a.ni)).norm();
                }
                rec.agents.push_back(std::move(smp));
            }
            if (with_consensus) {
                const Matrix phi_full = map_mat(y, lay.phi_off, n, n);
                for (int nodek = 0; nodek < graph.node_count(); ++nodek) {
                    Vector zk(n);
                    for (const auto& a : agents) {
                        if (a.ni == 0) continue;
                        zk.segment(cf.state_off[static_cast<size_t>(a.pos)], a.ni) =
                            y.segment(lay.z_off[static_cast<size_t>(a.pos)] + nodek * a.ni, a.ni);
                    }
                    rec.consensus_err.push_back((cf.t * (phi_full * zk) - rec.x_true_user).norm());
                }
            }
            result.trace.push_back(std::move(rec));
        }
        if (k == steps) break;

        // measurement disturbance for the upcoming step
        if (noise_stream && t >= scenario.noise->onset - 1e-12) {
            for (auto& a : agents) {
                const bool targeted = !scenario.noise->sensor || *scenario.noise->sensor == a.node;
                for (Eigen::Index i = 0; i < a.noise.size(); ++i)
                    a.noise(i) = targeted ? noise_stream->sample() : 0.0;
            }
        }

        rk4_step(rhs, t, y, dt);
        if (!y.allFinite()) throw IntegrationError("run: non-finite state", t + dt);
    }

    // --- summary -------------------------------------------------------------
    RunSummary& sum = result.summary;
    sum.walk_nodes = walk.nodes;
    sum.walk_closed = walk.closed;
    sum.agent_nodes = agent_nodes;
    sum.dims = cf.dims;
    sum.dt = dt;
    sum.t_final = scenario.t_final;
    sum.convergence_threshold = 1e-6 * x0_norm;
    for (const auto& a : agents) {
        sum.latch_times_s.push_back(a.latch_time);
        sum.armed_times_s.push_back(a.arm_time);
    }
    const size_t nrec = result.trace.size();
    const int window = 50;
    auto first_sustained = [&](auto err_of) -> std::optional<double> {
        for (size_t i = 0; i < nrec; ++i) {
            bool ok = true;
            for (size_t j = i; j < std::min(nrec, i + window); ++j)
                if (err_of(result.trace[j]) >= sum.convergence_threshold) { ok = false; break; }
            if (ok) return result.trace[i].t;
        }
        return std::nullopt;
    };
    for (size_t p = 0; p < agents.size(); ++p) {
        sum.observed_convergence_s.push_back(first_sustained(
            [&](const TraceRecord& r) { return r.agents[p].err_norm; }));
        sum.final_block_errors.push_back(result.trace.back().agents[p].err_norm);
    }
    sum.full_observed_convergence_s = first_sustained([&](const TraceRecord& r) {
        return r.agents.back().err_norm;
    });
    sum.final_full_error = result.trace.back().agents.back().err_norm;

    bool all_latched = true, monotone = true;
    double prev = -1.0;
    for (const auto& a : agents) {
        if (!a.latch_time) { all_latched = false; continue; }
        if (*a.latch_time < prev) monotone = false;
        prev = *a.latch_time;
    }
    sum.validation["walk_valid"] = true;
    sum.validation["all_agents_latched"] = all_latched;
    sum.validation["latch_order_monotone"] = monotone;
    if (scenario.stable_plant) sum.validation["plant_hurwitz"] = true;
    if (scenario.objective == Objective::kO2) {
        bool complete = true;
        for (int nodek = 1; nodek <= graph.node_count(); ++nodek)
            for (int p = 0; p < nblocks; ++p)
                complete = complete && tables[static_cast<size_t>(nodek)][static_cast<size_t>(p)].latched;
        sum.validation["omniscience_complete"] = complete;
    }
    return result;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_traces_csv(const RunResult& result, std::ostream& out) {
    const auto& sum = result.summary;
    out << "t";
    for (int node : sum.agent_nodes)
        out << ",a" << node << "_err,a" << node << "_delta,a" << node << "_omega,a" << node
            << "_theta_err,a" << node << "_latched";
    if (!result.trace.empty() && !result.trace.front().consensus_err.empty())
        for (size_t k = 1; k <= result.trace.front().consensus_err.size(); ++k)
            out << ",n" << k << "_consensus_err";
    out << "\n";
    for (const auto& rec : result.trace) {
        out << fmt17(rec.t);
        for (const auto& a : rec.agents)
            out << ',' << fmt17(a.err_norm) << ',' << fmt17(a.delta) << ',' << fmt17(a.omega) << ','
                << fmt17(a.theta_err) << ',' << (a.latched ? 1 : 0);
        for (double e : rec.consensus_err) out << ',' << fmt17(e);
        out << "\n";
    }
}

void write_traces_csv(const RunResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    write_traces_csv(result, out);
}

std::string summary_to_json(const RunResult& result) {
    using nlohmann::json;
    const auto& s = result.summary;
    json j;
    auto opt_arr = [](const std::vector<std::optional<double>>& v) {
        json a = json::array();
        for (const auto& x : v) {
            if (x) a.push_back(*x);
            else a.push_back(nullptr);
        }
        return a;
    };
    j["walk"] = s.walk_nodes;
    j["walk_closed"] = s.walk_closed;
    j["agents"] = s.agent_nodes;
    j["dims"] = s.dims;
    j["dt"] = s.dt;
    j["t_final"] = s.t_final;
    j["latch_times_s"] = opt_arr(s.latch_times_s);
    j["armed_times_s"] = opt_arr(s.armed_times_s);
    j["observed_convergence_s"] = opt_arr(s.observed_convergence_s);
    if (s.full_observed_convergence_s) j["full_observed_convergence_s"] = *s.full_observed_convergence_s;
    else j["full_observed_convergence_s"] = nullptr;
    j["final_error_norms"] = s.final_block_errors;
    j["final_full_error"] = s.final_full_error;
    j["convergence_threshold"] = s.convergence_threshold;
    j["validation"] = s.validation;
    return j.dump(2) + "\n";
}

void write_summary_json(const RunResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << summary_to_json(result);
}

std::string canonical_to_json(const CanonicalForm& cf, const ValidationReport& report) {
    using nlohmann::json;
    auto mat = [](const Matrix& m) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index jj = 0; jj < m.cols(); ++jj) row.push_back(m(i, jj));
            rows.push_back(row);
        }
        return rows;
    };
    json j;
    j["T"] = mat(cf.t);
    j["A_can"] = mat(cf.a_can);
    j["C_can"] = mat(cf.c_can);
    j["dims"] = cf.dims;
    json ord = json::array();
    for (int s : cf.order) ord.push_back(s + 1);
    j["order"] = ord;
    j["validation"] = json::array();
    for (const auto& c : report.checks)
        j["validation"].push_back({{"name", c.name}, {"pass", c.pass}, {"magnitude", c.magnitude}});
    j["all_pass"] = report.all_pass();
    return j.dump(2) + "\n";
}

}  // namespace dse
