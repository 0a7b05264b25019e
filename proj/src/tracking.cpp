#include "flock/tracking.hpp"

#include <cmath>

namespace flock {

double utility(const ErrorWindow& E, double u, const Eigen::Matrix3d& Q, double R) {
    return 0.5 * (E.dot(Q * E) + R * u * u);
}

double critic_value(const CriticMatrix& Omega, const ErrorWindow& E, double u) {
    Eigen::Vector4d z;
    z << E, u;
    return 0.5 * z.dot(Omega * z);
}

double actor_policy(const ActorGain& omega, const ErrorWindow& E) {
    return omega * E;
}

double target_policy(const CriticMatrix& Omega, const ErrorWindow& E, double eps_inv) {
    const double Omega_uu = Omega(3, 3);
    if (std::abs(Omega_uu) < eps_inv) {
        throw NumericError("target_policy: singular critic block Omega_uu");
    }
    return -(Omega.row(3).head<3>() * E)(0) / Omega_uu;
}

double target_value(const ErrorWindow& E_k, double u_k,
                    const ErrorWindow& E_next, double u_next,
                    const CriticMatrix& Omega,
                    const Eigen::Matrix3d& Q, double R) {
    return utility(E_k, u_k, Q, R) + critic_value(Omega, E_next, u_next);
}

ActorGain update_actor(const ActorGain& omega, const ErrorWindow& E_k,
                       double u_hat, double u_tilde, double rho_a,
                       bool gradient_consistent) {
    const double delta = u_hat - u_tilde;
    const double eps_a = gradient_consistent ? delta : 0.5 * delta * delta;
    return omega - rho_a * eps_a * E_k.transpose();
}

CriticMatrix update_critic(const CriticMatrix& Omega, const Eigen::Vector4d& z,
                           double V_hat, double V_tilde, double rho_c,
                           double eps_inv, bool gradient_consistent) {
    const double delta = V_hat - V_tilde;
    const double eps_c = gradient_consistent ? delta : 0.5 * delta * delta;
    CriticMatrix next = Omega - rho_c * eps_c * (z * z.transpose());
    next = 0.5 * (next + next.transpose()).eval();
    if (std::abs(next(3, 3)) < eps_inv) {
        next(3, 3) = next(3, 3) >= 0.0 ? eps_inv : -eps_inv;
    }
    return next;
}

AxisTracker::AxisTracker(const ActorGain& omega0, const CriticMatrix& Omega0)
    : omega_(omega0), Omega_(Omega0) {}

double AxisTracker::control(double e_k) {
    if (!primed_) {
        window_ = ErrorWindow::Constant(e_k);  // repeat-pad before 3 samples exist
        primed_ = true;
    } else {
        const double w0 = window_(0);
        const double w1 = window_(1);
        window_ << e_k, w0, w1;
    }
    E_k_ = window_;
    u_k_ = actor_policy(omega_, E_k_);
    emitted_ = true;
    return u_k_;
}

void AxisTracker::learn(double e_next, const TrackingParams& params) {
    if (!emitted_) {
        throw NumericError("AxisTracker::learn called before control");
    }
    ErrorWindow E_next;
    E_next << e_next, window_(0), window_(1);
    const double u_next = actor_policy(omega_, E_next);

    Eigen::Vector4d z_k;
    z_k << E_k_, u_k_;
    const double V_hat = critic_value(Omega_, E_k_, u_k_);
    const double V_tilde = target_value(E_k_, u_k_, E_next, u_next, Omega_,
                                        params.Q, params.R);
    cumulative_cost_ += utility(E_k_, u_k_, params.Q, params.R);

    Omega_ = update_critic(Omega_, z_k, V_hat, V_tilde, params.rho_c,
                           params.eps_inv, params.gradient_consistent);
    if (critic_value(Omega_, E_k_, u_k_) < V_hat - 1e-12) {
        ++monotonicity_violations_;  // value-iteration sequence decreased
    }

    double u_tilde;
    try {
        u_tilde = target_policy(Omega_, E_k_, params.eps_inv);
    } catch (const NumericError&) {
        Omega_(3, 3) = Omega_(3, 3) >= 0.0 ? params.eps_inv : -params.eps_inv;
        u_tilde = target_policy(Omega_, E_k_, params.eps_inv);
    }
    omega_ = update_actor(omega_, E_k_, u_k_, u_tilde, params.rho_a,
                          params.gradient_consistent);
    if (!omega_.allFinite() || !Omega_.allFinite()) {
        throw NumericError("tracking weights diverged (non-finite)");
    }
}

} // namespace flock
