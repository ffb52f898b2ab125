#include "dse/network.hpp"

#include <algorithm>
#include <limits>

namespace dse {

DiGraph::DiGraph(int node_count, std::vector<Edge> edges) : n_(node_count), edges_(std::move(edges)) {
    if (n_ < 1) throw ConfigError("graph: node count must be at least 1");
    for (const auto& e : edges_) {
        if (e.from < 1 || e.from > n_ || e.to < 1 || e.to > n_)
            throw ConfigError("graph: edge endpoint out of range");
        if (e.from == e.to) throw ConfigError("graph: self-loops not allowed");
        if (e.delay < 0) throw ConfigError("graph: negative delay");
        if (!edge_set_.insert({e.from, e.to}).second)
            throw ConfigError("graph: duplicate edge " + std::to_string(e.from) + "->" +
                              std::to_string(e.to));
    }
}

bool DiGraph::has_edge(int from, int to) const { return edge_set_.count({from, to}) > 0; }

const Edge* DiGraph::find_edge(int from, int to) const {
    for (const auto& e : edges_)
        if (e.from == from && e.to == to) return &e;
    return nullptr;
}

std::vector<int> DiGraph::out_neighbors(int node) const {
    std::vector<int> out;
    for (const auto& e : edges_)
        if (e.from == node) out.push_back(e.to);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> DiGraph::in_neighbors(int node) const {
    std::vector<int> in;
    for (const auto& e : edges_)
        if (e.to == node) in.push_back(e.from);
    std::sort(in.begin(), in.end());
    return in;
}

namespace {

void reach_dfs(const DiGraph& g, int start, std::vector<bool>& seen, bool reverse) {
    std::vector<int> stack{start};
    seen[static_cast<size_t>(start - 1)] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        const auto nbrs = reverse ? g.in_neighbors(v) : g.out_neighbors(v);
        for (int w : nbrs) {
            if (!seen[static_cast<size_t>(w - 1)]) {
                seen[static_cast<size_t>(w - 1)] = true;
                stack.push_back(w);
            }
        }
    }
}

}  // namespace

bool DiGraph::strongly_connected() const {
    std::vector<bool> fwd(static_cast<size_t>(n_), false), bwd(static_cast<size_t>(n_), false);
    reach_dfs(*this, 1, fwd, false);
    reach_dfs(*this, 1, bwd, true);
    return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
           std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

std::vector<int> WalkOrder::first_visit_order() const {
    std::vector<int> order;
    for (int v : nodes)
        if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    return order;
}

WalkDiagnostics validate_walk(const DiGraph& g, const WalkOrder& w, bool path_mode) {
    WalkDiagnostics d;
    if (w.nodes.empty()) {
        d.reason = "walk is empty";
        return d;
    }
    for (int v : w.nodes) {
        if (v < 1 || v > g.node_count()) {
            d.reason = "vertex " + std::to_string(v) + " out of range";
            return d;
        }
    }
    for (size_t i = 0; i + 1 < w.nodes.size(); ++i) {
        if (!g.has_edge(w.nodes[i], w.nodes[i + 1])) {
            d.reason = "missing edge " + std::to_string(w.nodes[i]) + "->" +
                       std::to_string(w.nodes[i + 1]);
            return d;
        }
    }
    std::vector<bool> seen(static_cast<size_t>(g.node_count()), false);
    for (int v : w.nodes) seen[static_cast<size_t>(v - 1)] = true;
    for (int v = 1; v <= g.node_count(); ++v) {
        if (!seen[static_cast<size_t>(v - 1)]) {
            d.reason = "vertex " + std::to_string(v) + " not visited";
            return d;
        }
    }
    if (w.closed && w.nodes.front() != w.nodes.back()) {
        d.reason = "closed walk must end at its start";
        return d;
    }
    if (path_mode) {
        std::set<int> uniq;
        const size_t distinct_len = (w.closed && w.nodes.size() > 1) ? w.nodes.size() - 1 : w.nodes.size();
        for (size_t i = 0; i < distinct_len; ++i) {
            if (!uniq.insert(w.nodes[i]).second) {
                d.reason = "vertex " + std::to_string(w.nodes[i]) + " repeated (path mode)";
                return d;
            }
        }
    }
    d.valid = true;
    return d;
}

namespace {

struct WalkSearch {
    const DiGraph& g;
    bool closed;
    int n;
    std::vector<int> walk;
    std::vector<int> visits;
    int visited_count = 0;

    explicit WalkSearch(const DiGraph& graph, bool want_closed)
        : g(graph), closed(want_closed), n(graph.node_count()),
          visits(static_cast<size_t>(graph.node_count() + 1), 0) {}

    bool complete() const {
        if (visited_count < n) return false;
        return !closed || walk.front() == walk.back();
    }

    // Depth-first search for the minimal walk length; `best` prunes.
    int shortest_len(int v, int len, int best) {
        if (visited_count == n) {
            if (!closed) return len;
            if (v == walk.front()) return len;
        }
        if (len + (n - visited_count) >= best) return best;  // cannot improve
        for (int w : g.out_neighbors(v)) {
            if (visits[static_cast<size_t>(w)] >= n) continue;  // revisit budget
            const bool first = visits[static_cast<size_t>(w)] == 0;
            ++visits[static_cast<size_t>(w)];
            if (first) ++visited_count;
            walk.push_back(w);
            best = shortest_len(w, len + 1, best);
            walk.pop_back();
            if (first) --visited_count;
            --visits[static_cast<size_t>(w)];
        }
        return best;
    }

    // Lexicographic DFS capped at exactly `target` vertices; first hit wins.
    bool find_exact(int v, int target, std::vector<int>& out) {
        if (complete()) {
            out = walk;
            return true;
        }
        if (static_cast<int>(walk.size()) >= target) return false;
        for (int w : g.out_neighbors(v)) {
            if (visits[static_cast<size_t>(w)] >= n) continue;
            const bool first = visits[static_cast<size_t>(w)] == 0;
            ++visits[static_cast<size_t>(w)];
            if (first) ++visited_count;
            walk.push_back(w);
            const bool found = find_exact(w, target, out);
            walk.pop_back();
            if (first) --visited_count;
            --visits[static_cast<size_t>(w)];
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

std::optional<WalkOrder> find_walk(const DiGraph& g, bool closed) {
    const int n = g.node_count();
    if (n > 12) throw ConfigError("find_walk: walk must be user-supplied for more than 12 nodes");
    if (n == 1) return WalkOrder{{1}, closed};
    if (closed && !g.strongly_connected()) return std::nullopt;

    // Pass 1: minimal walk length over all start vertices.
    const int inf = std::numeric_limits<int>::max() / 2;
    int best = inf;
    for (int s = 1; s <= n; ++s) {
        WalkSearch search(g, closed);
        search.walk.push_back(s);
        search.visits[static_cast<size_t>(s)] = 1;
        search.visited_count = 1;
        best = search.shortest_len(s, 1, best);
    }
    if (best >= inf) return std::nullopt;

    // Pass 2: lexicographically smallest sequence of that length.
    for (int s = 1; s <= n; ++s) {
        WalkSearch search(g, closed);
        search.walk.push_back(s);
        search.visits[static_cast<size_t>(s)] = 1;
        search.visited_count = 1;
        std::vector<int> found;
        if (search.find_exact(s, best, found)) return WalkOrder{found, closed};
    }
    return std::nullopt;
}

void ChannelBuffer::send(double t, std::vector<double> payload, int tag) {
    if (t < last_send_)
        throw ProtocolError("channel " + std::to_string(edge_.from) + "->" + std::to_string(edge_.to) +
                            ": send times must be monotone");
    last_send_ = t;
    Message m;
    m.send_time = t;
    m.delivery_time = t + edge_.delay_at(t);
    m.payload = std::move(payload);
    m.tag = tag;
    queue_.push_back(std::move(m));
}

std::vector<Message> ChannelBuffer::poll(double t) {
    // Time-varying delays can reorder deliveries, so scan the whole queue.
    std::vector<Message> out;
    for (auto it = queue_.begin(); it != queue_.end();) {
        if (it->delivery_time <= t + 1e-12) {
            out.push_back(std::move(*it));
            it = queue_.erase(it);
        } else {
            ++it;
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Message& a, const Message& b) { return a.delivery_time < b.delivery_time; });
    return out;
}

SwitchingSchedule::SwitchingSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (const auto& s : segments_)
        if (!(s.t_to > s.t_from)) throw ConfigError("switching: segment must have t_to > t_from");
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.t_from < b.t_from; });
}

void SwitchingSchedule::check_coverage(double t0, double t_final) const {
    if (segments_.empty()) throw ConfigError("switching: empty schedule");
    double covered = t0;
    for (const auto& s : segments_) {
        if (s.t_from > covered + 1e-12)
            throw ConfigError("switching: schedule gap at t = " + std::to_string(covered));
        covered = std::max(covered, s.t_to);
    }
    if (covered + 1e-12 < t_final)
        throw ConfigError("switching: schedule ends at t = " + std::to_string(covered) +
                          " before horizon " + std::to_string(t_final));
}

bool SwitchingSchedule::active_at(int from, int to, double t) const {
    if (segments_.empty()) return true;  // no schedule: always active
    for (const auto& s : segments_)
        if (t >= s.t_from - 1e-12 && t < s.t_to - 1e-12) return s.active.count({from, to}) > 0;
    // exactly at the end of the last segment
    const auto& last = segments_.back();
    if (std::abs(t - last.t_to) <= 1e-12) return last.active.count({from, to}) > 0;
    return false;
}

std::set<std::pair<int, int>> SwitchingSchedule::union_edges() const {
    std::set<std::pair<int, int>> u;
    for (const auto& s : segments_) u.insert(s.active.begin(), s.active.end());
    return u;
}

}  // namespace dse
