#pragma once

#include <Eigen/Dense>
#include <vector>

#include "flock/errors.hpp"

namespace flock {

struct TriangularMembership {
    double center = 0.0;
    double left = 3.0;   // distance from center to the lower zero point
    double right = 3.0;  // distance from center to the upper zero point
};

struct FuzzyBank {
    std::vector<TriangularMembership> rules;
    Eigen::VectorXd phi;  // actor consequents
    Eigen::VectorXd Phi;  // critic weights
};

struct SeparationParams {
    double d = 2.0;
    double alpha_a = 0.1;
    double alpha_c = 0.05;
    double universe_lo = -7.5;
    double universe_hi = 7.5;
    double eps_reward = 1e-9;
    double eps_fire = 1e-12;
    // Optional shaping of the learning loop (all default to the plain laws):
    // td_deadzone freezes the actor (and critic, if deadzone_applies_to_critic)
    // while |T| stays below the threshold; critic_bound projects the critic
    // weights back into [-bound, bound]; euclidean_credit flips the actor step
    // to match the side of the safety radius the pair is actually on.
    double td_deadzone = 0.0;
    bool deadzone_applies_to_critic = false;
    double critic_bound = 0.0;
    bool euclidean_credit = false;
    bool radial_coupling = false;
};

FuzzyBank make_bank(const std::vector<double>& centers, double offset,
                    const Eigen::VectorXd& phi0, const Eigen::VectorXd& Phi0);
FuzzyBank make_default_bank(double offset = 3.0);

double fuzzy_input(double zeta_i, double zeta_j, double d,
                   double universe_lo, double universe_hi);
double membership(const TriangularMembership& mf, double z);
Eigen::VectorXd firing_strengths(const FuzzyBank& bank, double z,
                                 double eps_fire = 1e-12);
double defuzzify(const Eigen::VectorXd& psi, const Eigen::VectorXd& phi);
double reward(double z, double d, double eps_reward = 1e-9);
double critic_value_S(const Eigen::VectorXd& psi, const Eigen::VectorXd& Phi);
double td_error(double S_k, double R_k, double S_next);
Eigen::VectorXd update_pair_actor(const Eigen::VectorXd& phi,
                                  const Eigen::VectorXd& psi, double T,
                                  double alpha_a);
Eigen::VectorXd update_pair_critic(const Eigen::VectorXd& Phi,
                                   const Eigen::VectorXd& psi, double T,
                                   double alpha_c);
double aggregate_separation(const std::vector<double>& pair_outputs);

double evaluate_bank(const FuzzyBank& bank, double z, double eps_fire = 1e-12);

// One TD step on a bank given the (k, k+1) inputs; sigma_k carries the credit
// direction used when euclidean_credit is set.
void learn_bank(FuzzyBank& bank, double z_k, double sigma_k, double z_next,
                const SeparationParams& params);

// Adaptive unit for one ordered pair (i, j) on one axis.
class PairFuzzyUnit {
public:
    explicit PairFuzzyUnit(FuzzyBank bank);

    // sigma carries the credit direction for the actor step (+1/-1); it is
    // ignored unless euclidean_credit is enabled in the params.
    double control(double z, double sigma = 1.0);
    void learn(double z_next, const SeparationParams& params);

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }
    const FuzzyBank& bank() const { return bank_; }
    FuzzyBank& bank() { return bank_; }
    const Eigen::VectorXd& last_psi() const { return psi_k_; }
    double last_value() const { return S_k_; }

private:
    FuzzyBank bank_;
    Eigen::VectorXd psi_k_;
    double S_k_ = 0.0;
    double z_k_ = 0.0;
    double sigma_k_ = 1.0;
    bool armed_ = false;
    bool frozen_ = false;
};

} // namespace flock
