#pragma once

#include <Eigen/Dense>

#include "flock/errors.hpp"

namespace flock {

using ErrorWindow = Eigen::Vector3d;   // [e_k, e_{k-1}, e_{k-2}]
using CriticMatrix = Eigen::Matrix4d;  // quadratic kernel over z = [E; u]
using ActorGain = Eigen::RowVector3d;

struct TrackingParams {
    Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
    double R = 1.0;
    double rho_a = 1e-2;
    double rho_c = 1e-7;
    double eps_inv = 1e-6;
    // false = update laws exactly as printed (scaled by the squared error);
    // true  = scale by the signed error instead (analytic gradient direction)
    bool gradient_consistent = false;
};

double utility(const ErrorWindow& E, double u, const Eigen::Matrix3d& Q, double R);
double critic_value(const CriticMatrix& Omega, const ErrorWindow& E, double u);
double actor_policy(const ActorGain& omega, const ErrorWindow& E);

// Minimizer of the critic's quadratic form over u. Throws NumericError when
// |Omega_uu| < eps_inv; the caller clamps the diagonal entry and retries.
double target_policy(const CriticMatrix& Omega, const ErrorWindow& E, double eps_inv);

double target_value(const ErrorWindow& E_k, double u_k,
                    const ErrorWindow& E_next, double u_next,
                    const CriticMatrix& Omega,
                    const Eigen::Matrix3d& Q, double R);

ActorGain update_actor(const ActorGain& omega, const ErrorWindow& E_k,
                       double u_hat, double u_tilde, double rho_a,
                       bool gradient_consistent = false);

CriticMatrix update_critic(const CriticMatrix& Omega, const Eigen::Vector4d& z,
                           double V_hat, double V_tilde, double rho_c,
                           double eps_inv, bool gradient_consistent = false);

// One tracking controller per agent per axis. control() emits the actor output
// for the current error sample; learn() consumes the next-step error and runs
// the value update followed by the policy update.
class AxisTracker {
public:
    AxisTracker(const ActorGain& omega0, const CriticMatrix& Omega0);

    double control(double e_k);
    void learn(double e_next, const TrackingParams& params);

    const ActorGain& omega() const { return omega_; }
    const CriticMatrix& Omega() const { return Omega_; }
    long monotonicity_violations() const { return monotonicity_violations_; }
    double cumulative_cost() const { return cumulative_cost_; }

private:
    ActorGain omega_;
    CriticMatrix Omega_;
    ErrorWindow window_{0.0, 0.0, 0.0};
    bool primed_ = false;
    ErrorWindow E_k_{0.0, 0.0, 0.0};
    double u_k_ = 0.0;
    bool emitted_ = false;
    long monotonicity_violations_ = 0;
    double cumulative_cost_ = 0.0;
};

} // namespace flock
