#pragma once

#include <vector>

#include "dse/linalg.hpp"
#include "dse/network.hpp"

namespace dse {

enum class ConsensusMode { kLinear, kFiniteTime, kFixedTime };

/// Configuration for the per-block consensus layer that spreads the latched
/// parameter estimates to every node of a strongly connected graph.
struct ConsensusConfig {
    ConsensusMode mode = ConsensusMode::kLinear;
    Matrix a;          // N x N nonnegative weights, a(k,j) > 0 iff edge j->k
    Vector p;          // anchor gain per node, applied when the node owns the block
    double r = 0.5;    // finite-time exponent, in (0,1]
    double r1 = 0.5;   // fixed-time exponents
    double r2 = 1.5;
    double dead_zone = 1e-9;  // numerical regularization for fractional powers

    /// Uniform weights over the graph's edges: a(k,j) = weight for j in N_k.
    static ConsensusConfig uniform(const DiGraph& g, double weight, double anchor_gain,
                                   ConsensusMode mode = ConsensusMode::kLinear);

    /// Checks weight/graph consistency, exponent ranges, strong connectivity,
    /// and that every per-block L + P has eigenvalues in the open right
    /// half-plane. Throws ConfigError on failure.
    void check(const DiGraph& g, int block_count) const;

    /// Graph Laplacian of the weight matrix: L(k,k) = sum_j a(k,j), off-diagonal -a(k,j).
    Matrix laplacian() const;
    /// L + P for the block owned by node `owner` (0-based).
    Matrix l_bar(int owner) const;
};

/// Per-node, per-block consensus variables z_k^{(i)}; flattened storage is
/// handled by the simulation layer.
struct ConsensusState {
    std::vector<std::vector<Vector>> z;  // z[block][node]
};

/// Elementwise signed power |v|^r sign(v), with a small dead zone to suppress
/// chattering of the non-smooth modes near the equilibrium.
Vector signed_power(const Vector& v, double r, double dead_zone);

/// Derivative of z for one block: diffusion over in-neighbors plus the anchor
/// term at the owning node, in the configured mode.
///
/// z_nodes:   current z_k for every node (block dimension each)
/// owner:     0-based node owning this block
/// theta_fct: the owner's current reconstructed parameter estimate
std::vector<Vector> consensus_rhs(const std::vector<Vector>& z_nodes, const ConsensusConfig& cfg,
                                  const DiGraph& g, int owner, const Vector& theta_fct);

}  // namespace dse
