#include "dse/integrate.hpp"

#include <cmath>

namespace dse {

void rk4_step(const OdeRhs& rhs, double t, Vector& y, double h) {
    Vector k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
    rhs(t, y, k1);
    rhs(t + h / 2, y + (h / 2) * k1, k2);
    rhs(t + h / 2, y + (h / 2) * k2, k3);
    rhs(t + h, y + h * k3, k4);
    y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

std::vector<OdeState> integrate(const OdeRhs& rhs, const Vector& y0, double t0, double t_final,
                                double dt) {
    if (!(dt > 0)) throw StructuralError("integrate: dt must be positive");
    if (!(t_final > t0)) throw StructuralError("integrate: t_final must exceed t0");
    if (!y0.allFinite()) throw IntegrationError("integrate: non-finite initial state", t0);

    std::vector<OdeState> out;
    out.reserve(static_cast<size_t>((t_final - t0) / dt) + 2);
    Vector y = y0;
    double t = t0;
    out.push_back({t, y});
    while (t < t_final - 1e-12 * std::max(1.0, std::abs(t_final))) {
        double h = dt;
        if (t + h > t_final) h = t_final - t;  // clamp the last step
        rk4_step(rhs, t, y, h);
        t += h;
        if (!y.allFinite()) throw IntegrationError("integrate: non-finite state", t);
        out.push_back({t, y});
    }
    return out;
}

}  // namespace dse
