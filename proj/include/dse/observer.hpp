#pragma once

#include <optional>

#include "dse/canonical.hpp"
#include "dse/linalg.hpp"

namespace dse {

/// Tuning for one agent's estimator. Defaults follow the two-agent benchmark
/// convention of zero parameter initial conditions.
struct ObserverConfig {
    double lambda = 1.0;   // filter pole, 1/s
    double gamma = 5.0;    // adaptation gain
    double mu = 0.05;      // clipping margin in (0,1)
    double kappa = 1.0;    // optional regressor scaling
    Vector theta_hat_init; // defaults to zero when empty

    void check() const;
};

/// Integration state of one agent's DREM filters. Initial conditions are
/// Y = 0, Omega = 0, omega = 1, theta_hat = theta_hat_init.
struct DremFilters {
    Vector y_filter;    // Y, n_i
    Matrix omega_gram;  // Omega, n_i x n_i
    double omega = 1.0; // scalar excitation memory in (0, 1]
    Vector theta_hat;   // n_i

    static DremFilters initial(int ni, const Vector& theta_hat_init);
};

struct DremDerivatives {
    Vector y_filter_dot;
    Matrix omega_gram_dot;
    double omega_dot = 0.0;
    Vector theta_hat_dot;
};

/// Finite-convergence-time reconstruction of the parameter estimate.
struct FctEstimate {
    Vector theta_fct;
    bool converged = false;           // omega has crossed below 1 - mu
    std::optional<double> t_c;        // first crossing time, once latched
};

/// Psi_i(t) = C_ii * Phi_ii(t); at t = 0 this is just C_ii.
Matrix regressor(const Matrix& c_ii, const Matrix& phi_ii);

/// Measured output corrected by the upstream contribution, giving the
/// single-block regression y_tt = Psi_i theta_i (+ a term that vanishes once
/// the upstream estimates are exact). For the first block pass an empty
/// upstream and the measurement comes back unchanged.
///
/// c_row:        [C_i1 ... C_ii], the agent's full output row block
/// phi_leading:  Phi^{(i)}, the leading principal block of the transition matrix
/// upstream:     stacked upstream parameters (dimension p_{i-1})
Vector perturbed_output(const Vector& y_meas, const Matrix& c_row, const Matrix& phi_leading,
                        const Vector& upstream, int ni);

/// Time derivatives of the DREM filter states given the current regressor and
/// corrected output. Delta = det(Omega) and the mixed scalar regression
/// Y_mixed = adj(Omega) Y come out of one Faddeev-LeVerrier pass.
DremDerivatives drem_rhs(const DremFilters& f, const ObserverConfig& cfg, const Vector& y_tt,
                         const Matrix& psi);

/// theta_fct = (theta_hat - omega_c theta_hat(0)) / (1 - omega_c) with
/// omega_c = min(omega, 1 - mu). The division is always safe: 1 - omega_c >= mu.
FctEstimate fct_reconstruct(const Vector& theta_hat, const Vector& theta_hat_init, double omega,
                            double mu);

/// x_hat over the leading blocks: phi_leading * stacked theta_fct values.
Vector state_estimate(const Matrix& phi_leading, const Vector& theta_fct_stacked);

/// Plain gradient estimator on the same regression, for comparison only
/// (asymptotic, no finite-time reconstruction).
Vector gradient_baseline_rhs(const Vector& theta_hat, const ObserverConfig& cfg, const Vector& y_tt,
                             const Matrix& psi);

}  // namespace dse
