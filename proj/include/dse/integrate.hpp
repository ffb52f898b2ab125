#pragma once

#include <functional>
#include <vector>

#include "dse/linalg.hpp"

namespace dse {

struct OdeState {
    double t = 0.0;
    Vector y;
};

/// Right-hand side: writes dy/dt for the given (t, y) into dy (same size as y).
using OdeRhs = std::function<void(double t, const Vector& y, Vector& dy)>;

/// One classical RK4 step of size h, in place.
void rk4_step(const OdeRhs& rhs, double t, Vector& y, double h);

/// Fixed-step RK4 on [t0, t_final], sampled at t0 + k*dt; the last step is
/// clamped to land exactly on t_final. Throws IntegrationError with the first
/// failure time if the state or derivative goes non-finite.
std::vector<OdeState> integrate(const OdeRhs& rhs, const Vector& y0, double t0, double t_final,
                                double dt);

}  // namespace dse
