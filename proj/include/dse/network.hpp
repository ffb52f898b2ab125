#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dse/errors.hpp"

namespace dse {

/// Delay as a function of send time, in seconds.
using DelayFn = std::function<double(double)>;

struct Edge {
    int from = 0;  // 1-based node ids
    int to = 0;
    double delay = 0.0;          // constant delay used by scenario files
    DelayFn delay_fn;            // optional time-varying delay, overrides `delay`

    double delay_at(double t_send) const { return delay_fn ? delay_fn(t_send) : delay; }
};

/// Directed communication graph over nodes 1..N. No self-loops.
class DiGraph {
   public:
    DiGraph(int node_count, std::vector<Edge> edges);

    int node_count() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool has_edge(int from, int to) const;
    const Edge* find_edge(int from, int to) const;
    std::vector<int> out_neighbors(int node) const;  // ascending
    std::vector<int> in_neighbors(int node) const;   // ascending

    bool strongly_connected() const;

   private:
    int n_;
    std::vector<Edge> edges_;
    std::set<std::pair<int, int>> edge_set_;
};

struct WalkOrder {
    std::vector<int> nodes;  // 1-based vertex sequence
    bool closed = false;

    /// Nodes in order of first appearance; this is the estimation order.
    std::vector<int> first_visit_order() const;
};

struct WalkDiagnostics {
    bool valid = false;
    std::string reason;  // first violation, empty when valid
};

/// True iff the sequence follows graph edges, covers every vertex, and (when
/// closed) returns to its start. `path_mode` additionally requires all
/// distinct vertices (first == last excepted for closed walks).
WalkDiagnostics validate_walk(const DiGraph& g, const WalkOrder& w, bool path_mode = false);

/// Shortest Hamiltonian walk (closed or open), or nullopt if none exists.
/// Exhaustive search with a per-node revisit budget of N; deterministic, with
/// ties broken toward the lexicographically smallest vertex sequence. Graphs
/// with more than 12 nodes must supply a walk instead.
std::optional<WalkOrder> find_walk(const DiGraph& g, bool closed);

struct Message {
    double send_time = 0.0;
    double delivery_time = 0.0;
    std::vector<double> payload;
    int tag = 0;  // free for the caller (e.g. sender id)
};

/// Delayed FIFO channel over one edge. Messages become visible to poll()
/// once t reaches send_time + delay(send_time).
class ChannelBuffer {
   public:
    explicit ChannelBuffer(Edge edge) : edge_(std::move(edge)) {}

    void send(double t, std::vector<double> payload, int tag = 0);
    /// All messages with delivery_time <= t, in delivery order.
    std::vector<Message> poll(double t);
    const Edge& edge() const { return edge_; }

   private:
    Edge edge_;
    std::deque<Message> queue_;
    double last_send_ = -1.0;
};

/// Piecewise-constant edge-activity schedule. Segments must cover the whole
/// horizon; a gap is a configuration error.
class SwitchingSchedule {
   public:
    struct Segment {
        double t_from = 0.0;
        double t_to = 0.0;
        std::set<std::pair<int, int>> active;
    };

    SwitchingSchedule() = default;
    explicit SwitchingSchedule(std::vector<Segment> segments);

    bool empty() const { return segments_.empty(); }
    void check_coverage(double t0, double t_final) const;
    bool active_at(int from, int to, double t) const;
    /// Union of all scheduled edges (for walk feasibility checks).
    std::set<std::pair<int, int>> union_edges() const;

   private:
    std::vector<Segment> segments_;
};

}  // namespace dse
