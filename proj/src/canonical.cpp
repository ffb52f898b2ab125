#include "dse/canonical.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace dse {

LtiSystem::LtiSystem(Matrix a, std::vector<Matrix> sensor_blocks)
    : a_(std::move(a)), sensors_(std::move(sensor_blocks)) {
    if (a_.rows() != a_.cols()) throw StructuralError("LtiSystem: A must be square");
    if (a_.rows() == 0) throw StructuralError("LtiSystem: empty state");
    if (!all_finite(a_)) throw StructuralError("LtiSystem: non-finite A");
    if (sensors_.empty()) throw StructuralError("LtiSystem: at least one sensor required");
    for (size_t i = 0; i < sensors_.size(); ++i) {
        const auto& c = sensors_[i];
        if (c.cols() != a_.rows())
            throw StructuralError("LtiSystem: sensor " + std::to_string(i + 1) + " has " +
                                  std::to_string(c.cols()) + " columns, expected " +
                                  std::to_string(a_.rows()));
        if (c.rows() == 0) throw StructuralError("LtiSystem: sensor " + std::to_string(i + 1) + " has no rows");
        if (!all_finite(c)) throw StructuralError("LtiSystem: non-finite C block");
    }
    const int r = joint_observability_rank();
    if (r < state_dim())
        throw ConfigError("not jointly observable: rank deficit " + std::to_string(state_dim() - r));
}

Matrix LtiSystem::stacked_c() const {
    Eigen::Index m = 0;
    for (const auto& c : sensors_) m += c.rows();
    Matrix out(m, a_.rows());
    Eigen::Index row = 0;
    for (const auto& c : sensors_) {
        out.middleRows(row, c.rows()) = c;
        row += c.rows();
    }
    return out;
}

bool LtiSystem::is_hurwitz(double margin) const {
    Eigen::EigenSolver<Matrix> es(a_, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
        if (es.eigenvalues()(i).real() >= -margin) return false;
    return true;
}

int LtiSystem::joint_observability_rank() const {
    return rank_and_range(observability_matrix(stacked_c(), a_)).first;
}

Matrix observability_matrix(const Matrix& c, const Matrix& a) {
    if (a.rows() != a.cols() || c.cols() != a.rows())
        throw StructuralError("observability_matrix: dimension mismatch");
    const Eigen::Index n = a.rows();
    const Eigen::Index p = c.rows();
    Matrix obs(n * p, n);
    Matrix row = c;
    obs.topRows(p) = row;
    for (Eigen::Index k = 1; k < n; ++k) {
        row = row * a;
        obs.middleRows(k * p, p) = row;
    }
    return obs;
}

Eigen::Block<const Matrix> CanonicalForm::a_block(int j, int k) const {
    return a_can.block(state_off[static_cast<size_t>(j)], state_off[static_cast<size_t>(k)],
                       dims[static_cast<size_t>(j)], dims[static_cast<size_t>(k)]);
}

Eigen::Block<const Matrix> CanonicalForm::c_block(int j, int k) const {
    const int mj = static_cast<int>(c_can.rows()) - output_off[static_cast<size_t>(j)];
    const int rows = (j + 1 < block_count())
                         ? output_off[static_cast<size_t>(j) + 1] - output_off[static_cast<size_t>(j)]
                         : mj;
    return c_can.block(output_off[static_cast<size_t>(j)], state_off[static_cast<size_t>(k)], rows,
                       dims[static_cast<size_t>(k)]);
}

Eigen::Block<const Matrix> CanonicalForm::c_rows(int j) const {
    const int rows = (j + 1 < block_count())
                         ? output_off[static_cast<size_t>(j) + 1] - output_off[static_cast<size_t>(j)]
                         : static_cast<int>(c_can.rows()) - output_off[static_cast<size_t>(j)];
    return c_can.block(output_off[static_cast<size_t>(j)], 0, rows, c_can.cols());
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

CanonicalForm decompose(const LtiSystem& sys) {
    std::vector<int> order(static_cast<size_t>(sys.sensor_count()));
    std::iota(order.begin(), order.end(), 0);
    return decompose(sys, order);
}

CanonicalForm decompose(const LtiSystem& sys, const std::vector<int>& order) {
    const int n = sys.state_dim();
    const int nsens = sys.sensor_count();
    if (static_cast<int>(order.size()) != nsens)
        throw ConfigError("decompose: order must be a permutation of all sensors");
    {
        std::vector<int> seen(static_cast<size_t>(nsens), 0);
        for (int s : order) {
            if (s < 0 || s >= nsens || seen[static_cast<size_t>(s)]++)
                throw ConfigError("decompose: order must be a permutation of all sensors");
        }
    }

    CanonicalForm cf;
    cf.order = order;
    Matrix remaining = Matrix::Identity(n, n);  // orthonormal basis of the not-yet-observable subspace
    std::vector<Matrix> t_cols;
    for (int s : order) {
        const Eigen::Index d = remaining.cols();
        if (d == 0) {
            cf.dims.push_back(0);
            continue;
        }
        const Matrix a_r = remaining.transpose() * sys.a() * remaining;
        const Matrix c_r = sys.sensor_blocks()[static_cast<size_t>(s)] * remaining;
        const auto split = row_space_and_kernel(observability_matrix(c_r, a_r));
        if (split.rank > 0) t_cols.push_back(remaining * split.range);
        remaining = remaining * split.null_space;
        cf.dims.push_back(split.rank);
    }
    if (remaining.cols() > 0)
        throw ConfigError("not jointly observable: rank deficit " + std::to_string(remaining.cols()));

    cf.t.resize(n, n);
    Eigen::Index col = 0;
    for (const auto& block : t_cols) {
        cf.t.middleCols(col, block.cols()) = block;
        col += block.cols();
    }

    cf.state_off.resize(cf.dims.size());
    int acc = 0;
    for (size_t i = 0; i < cf.dims.size(); ++i) {
        cf.state_off[i] = acc;
        acc += cf.dims[i];
    }
    cf.output_off.resize(order.size());
    int macc = 0;
    for (size_t i = 0; i < order.size(); ++i) {
        cf.output_off[i] = macc;
        macc += sys.output_dim(order[i]);
    }

    cf.a_can = cf.t.transpose() * sys.a() * cf.t;
    Matrix c_ordered(macc, n);
    for (size_t i = 0; i < order.size(); ++i) {
        const auto& cb = sys.sensor_blocks()[static_cast<size_t>(order[i])];
        c_ordered.middleRows(cf.output_off[i], cb.rows()) = cb;
    }
    cf.c_can = c_ordered * cf.t;

    // The strictly-upper blocks are zero by construction up to roundoff;
    // store them as exact zeros so downstream triangular algebra is exact.
    for (int j = 0; j < cf.block_count(); ++j) {
        for (int k = j + 1; k < cf.block_count(); ++k) {
            cf.a_can.block(cf.state_off[static_cast<size_t>(j)], cf.state_off[static_cast<size_t>(k)],
                           cf.dims[static_cast<size_t>(j)], cf.dims[static_cast<size_t>(k)])
                .setZero();
            cf.c_can.block(cf.output_off[static_cast<size_t>(j)], cf.state_off[static_cast<size_t>(k)],
                           sys.output_dim(cf.order[static_cast<size_t>(j)]), cf.dims[static_cast<size_t>(k)])
                .setZero();
        }
    }
    return cf;
}

ValidationReport validate(const CanonicalForm& cf, const LtiSystem& sys, double tol) {
    ValidationReport rep;
    const int n = sys.state_dim();

    {
        ValidationCheck c{"dimensions", true, 0.0};
        int total = std::accumulate(cf.dims.begin(), cf.dims.end(), 0);
        c.pass = (total == n) && cf.t.rows() == n && cf.t.cols() == n &&
                 cf.a_can.rows() == n && cf.a_can.cols() == n &&
                 static_cast<int>(cf.order.size()) == sys.sensor_count();
        c.magnitude = std::abs(total - n);
        rep.checks.push_back(c);
        if (!c.pass) return rep;  // remaining checks assume consistent sizes
    }
    {
        ValidationCheck c{"orthogonality", true, 0.0};
        c.magnitude = (cf.t.transpose() * cf.t - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
        c.pass = c.magnitude <= tol;
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"similarity", true, 0.0};
        const double da = (cf.a_can - cf.t.transpose() * sys.a() * cf.t).cwiseAbs().maxCoeff();
        Matrix c_ordered(cf.c_can.rows(), n);
        for (size_t i = 0; i < cf.order.size(); ++i)
            c_ordered.middleRows(cf.output_off[i], sys.output_dim(cf.order[i])) =
                sys.sensor_blocks()[static_cast<size_t>(cf.order[i])];
        const double dc = (cf.c_can - c_ordered * cf.t).cwiseAbs().maxCoeff();
        c.magnitude = std::max(da, dc);
        c.pass = c.magnitude <= tol;
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"zero_pattern", true, 0.0};
        double worst = 0.0;
        for (int j = 0; j < cf.block_count(); ++j)
            for (int k = j + 1; k < cf.block_count(); ++k) {
                if (cf.dims[static_cast<size_t>(k)] == 0) continue;
                worst = std::max(worst, cf.a_block(j, k).cwiseAbs().maxCoeff());
                worst = std::max(worst, cf.c_block(j, k).cwiseAbs().maxCoeff());
            }
        c.magnitude = worst;
        c.pass = worst <= tol;
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"diagonal_observability", true, 0.0};
        for (int j = 0; j < cf.block_count(); ++j) {
            const int nj = cf.dims[static_cast<size_t>(j)];
            if (nj == 0) continue;
            const Matrix ajj = cf.a_block(j, j);
            const Matrix cjj = cf.c_block(j, j);
            const int r = rank_and_range(observability_matrix(cjj, ajj)).first;
            if (r < nj) {
                c.pass = false;
                c.magnitude = std::max(c.magnitude, static_cast<double>(nj - r));
            }
        }
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace dse
