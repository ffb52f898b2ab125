#include "dse/observer.hpp"

namespace dse {

void ObserverConfig::check() const {
    if (!(lambda > 0)) throw ConfigError("observer: lambda must be positive");
    if (!(gamma > 0)) throw ConfigError("observer: gamma must be positive");
    if (!(mu > 0 && mu < 1)) throw ConfigError("observer: mu must lie in (0,1)");
    if (!(kappa > 0)) throw ConfigError("observer: kappa must be positive");
}

DremFilters DremFilters::initial(int ni, const Vector& theta_hat_init) {
    DremFilters f;
    f.y_filter = Vector::Zero(ni);
    f.omega_gram = Matrix::Zero(ni, ni);
    f.omega = 1.0;
    if (theta_hat_init.size() == 0) {
        f.theta_hat = Vector::Zero(ni);
    } else {
        if (theta_hat_init.size() != ni)
            throw StructuralError("theta_hat_init size mismatch");
        f.theta_hat = theta_hat_init;
    }
    return f;
}

Matrix regressor(const Matrix& c_ii, const Matrix& phi_ii) {
    if (c_ii.cols() != phi_ii.rows() || phi_ii.rows() != phi_ii.cols())
        throw StructuralError("regressor: dimension mismatch");
    return c_ii * phi_ii;
}

Vector perturbed_output(const Vector& y_meas, const Matrix& c_row, const Matrix& phi_leading,
                        const Vector& upstream, int ni) {
    const Eigen::Index p = phi_leading.rows();
    if (phi_leading.cols() != p || c_row.cols() != p || c_row.rows() != y_meas.size())
        throw StructuralError("perturbed_output: dimension mismatch");
    const Eigen::Index p_up = p - ni;
    if (upstream.size() != p_up)
        throw ProtocolError("perturbed_output: expected " + std::to_string(p_up) +
                            " upstream parameters, got " + std::to_string(upstream.size()));
    if (p_up == 0) return y_meas;
    // y - [C_i1..C_ii] Phi^{(i)} [upstream; 0]; the triangular structure makes
    // the own-block column of that product equal C_ii Phi_ii, so this is the
    // combined upstream correction in one multiply.
    return y_meas - (c_row * phi_leading.leftCols(p_up)) * upstream;
}

DremDerivatives drem_rhs(const DremFilters& f, const ObserverConfig& cfg, const Vector& y_tt,
                         const Matrix& psi) {
    const Eigen::Index ni = f.theta_hat.size();
    if (psi.cols() != ni || psi.rows() != y_tt.size() || f.y_filter.size() != ni ||
        f.omega_gram.rows() != ni || f.omega_gram.cols() != ni)
        throw StructuralError("drem_rhs: dimension mismatch");
    if (!y_tt.allFinite() || !psi.allFinite())
        throw IntegrationError("drem_rhs: non-finite input", 0.0);

    const auto [adj, det] = adjugate_and_det(f.omega_gram);
    DremDerivatives d;
    d.y_filter_dot = -cfg.lambda * (f.y_filter - psi.transpose() * y_tt);
    d.omega_gram_dot = -cfg.lambda * (f.omega_gram - psi.transpose() * psi);
    d.omega_dot = -cfg.gamma * det * det * f.omega;
    d.theta_hat_dot = cfg.gamma * det * (adj * f.y_filter - det * f.theta_hat);
    return d;
}

FctEstimate fct_reconstruct(const Vector& theta_hat, const Vector& theta_hat_init, double omega,
                            double mu) {
    if (theta_hat_init.size() != theta_hat.size())
        throw StructuralError("fct_reconstruct: init size mismatch");
    FctEstimate e;
    e.converged = omega < 1.0 - mu;
    const double omega_c = e.converged ? omega : 1.0 - mu;
    e.theta_fct = (theta_hat - omega_c * theta_hat_init) / (1.0 - omega_c);
    return e;
}

Vector state_estimate(const Matrix& phi_leading, const Vector& theta_fct_stacked) {
    if (phi_leading.cols() != theta_fct_stacked.size())
        throw ProtocolError("state_estimate: missing parameter blocks (have " +
                            std::to_string(theta_fct_stacked.size()) + ", need " +
                            std::to_string(phi_leading.cols()) + ")");
    return phi_leading * theta_fct_stacked;
}

Vector gradient_baseline_rhs(const Vector& theta_hat, const ObserverConfig& cfg, const Vector& y_tt,
                             const Matrix& psi) {
    if (psi.cols() != theta_hat.size() || psi.rows() != y_tt.size())
        throw StructuralError("gradient_baseline_rhs: dimension mismatch");
    return cfg.gamma * psi.transpose() * (y_tt - psi * theta_hat);
}

}  // namespace dse
