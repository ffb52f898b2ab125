#include "dse/consensus.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace dse {

ConsensusConfig ConsensusConfig::uniform(const DiGraph& g, double weight, double anchor_gain,
                                         ConsensusMode mode) {
    ConsensusConfig cfg;
    cfg.mode = mode;
    const int n = g.node_count();
    cfg.a = Matrix::Zero(n, n);
    for (const auto& e : g.edges()) cfg.a(e.to - 1, e.from - 1) = weight;
    cfg.p = Vector::Constant(n, anchor_gain);
    return cfg;
}

void ConsensusConfig::check(const DiGraph& g, int block_count) const {
    const int n = g.node_count();
    if (a.rows() != n || a.cols() != n) throw ConfigError("consensus: weight matrix must be N x N");
    if (p.size() != n) throw ConfigError("consensus: anchor gains must have one entry per node");
    if (a.minCoeff() < 0 || p.minCoeff() < 0) throw ConfigError("consensus: weights must be nonnegative");
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const bool edge = g.has_edge(j + 1, k + 1);
            if (edge && !(a(k, j) > 0))
                throw ConfigError("consensus: zero weight on edge " + std::to_string(j + 1) + "->" +
                                  std::to_string(k + 1));
            if (!edge && a(k, j) != 0)
                throw ConfigError("consensus: weight on missing edge " + std::to_string(j + 1) + "->" +
                                  std::to_string(k + 1));
        }
    if (mode == ConsensusMode::kFiniteTime && !(r > 0 && r <= 1))
        throw ConfigError("consensus: r must lie in (0,1]");
    if (mode == ConsensusMode::kFixedTime) {
        if (!(r1 > 0 && r1 <= 1)) throw ConfigError("consensus: r1 must lie in (0,1]");
        if (!(r2 > 1)) throw ConfigError("consensus: r2 must exceed 1");
    }
    if (!g.strongly_connected()) throw ConfigError("consensus: graph must be strongly connected");
    for (int owner = 0; owner < block_count; ++owner) {
        if (!(p(owner) > 0))
            throw ConfigError("consensus: anchor gain of node " + std::to_string(owner + 1) +
                              " must be positive (it owns a block)");
        Eigen::EigenSolver<Matrix> es(l_bar(owner), /*computeEigenvectors=*/false);
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(es.eigenvalues()(i).real() > 0))
                throw ConfigError("consensus: L + P has a non-positive eigenvalue for block " +
                                  std::to_string(owner + 1));
    }
}

Matrix ConsensusConfig::laplacian() const {
    Matrix l = -a;
    for (Eigen::Index k = 0; k < a.rows(); ++k) l(k, k) = a.row(k).sum();
    return l;
}

Matrix ConsensusConfig::l_bar(int owner) const {
    Matrix lb = laplacian();
    lb(owner, owner) += p(owner);
    return lb;
}

Vector signed_power(const Vector& v, double r, double dead_zone) {
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = v(i);
        out(i) = std::abs(x) <= dead_zone ? 0.0 : std::copysign(std::pow(std::abs(x), r), x);
    }
    return out;
}

std::vector<Vector> consensus_rhs(const std::vector<Vector>& z_nodes, const ConsensusConfig& cfg,
                                  const DiGraph& g, int owner, const Vector& theta_fct) {
    const int n = g.node_count();
    if (static_cast<int>(z_nodes.size()) != n)
        throw StructuralError("consensus_rhs: one z per node required");
    std::vector<Vector> dz(z_nodes.size());
    for (int k = 0; k < n; ++k) {
        Vector acc = Vector::Zero(z_nodes[static_cast<size_t>(k)].size());
        auto add = [&](const Vector& diff, double w) {
            switch (cfg.mode) {
                case ConsensusMode::kLinear:
                    acc -= w * diff;
                    break;
                case ConsensusMode::kFiniteTime:
                    acc -= w * signed_power(diff, cfg.r, cfg.dead_zone);
                    break;
                case ConsensusMode::kFixedTime:
                    acc -= w * (signed_power(diff, cfg.r1, cfg.dead_zone) +
                                signed_power(diff, cfg.r2, cfg.dead_zone));
                    break;
            }
        };
        for (int j : g.in_neighbors(k + 1))
            add(z_nodes[static_cast<size_t>(k)] - z_nodes[static_cast<size_t>(j - 1)], cfg.a(k, j - 1));
        if (k == owner) add(z_nodes[static_cast<size_t>(k)] - theta_fct, cfg.p(k));
        dz[static_cast<size_t>(k)] = std::move(acc);
    }
    return dz;
}

}  // namespace dse
