#include "flock/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flock {

FuzzyBank make_bank(const std::vector<double>& centers, double offset,
                    const Eigen::VectorXd& phi0, const Eigen::VectorXd& Phi0) {
    const auto P = static_cast<Eigen::Index>(centers.size());
    if (P < 2) throw ConfigError("fuzzy bank needs at least 2 rules");
    if (offset <= 0.0) throw ConfigError("fuzzy membership offset must be > 0");
    for (std::size_t p = 1; p < centers.size(); ++p) {
        if (!(centers[p] > centers[p - 1])) {
            throw ConfigError("fuzzy rule centers must be strictly increasing");
        }
    }
    if (phi0.size() != P || Phi0.size() != P) {
        throw ConfigError("fuzzy weight vectors must match the rule count");
    }
    FuzzyBank bank;
    bank.rules.reserve(centers.size());
    for (double c : centers) bank.rules.push_back({c, offset, offset});
    bank.phi = phi0;
    bank.Phi = Phi0;
    return bank;
}

FuzzyBank make_default_bank(double offset) {
    const std::vector<double> centers{-6.0, -3.0, 0.0, 3.0, 6.0};
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
    return make_bank(centers, offset, zero, zero);
}

double fuzzy_input(double zeta_i, double zeta_j, double d,
                   double universe_lo, double universe_hi) {
    if (!std::isfinite(zeta_i) || !std::isfinite(zeta_j)) {
        throw NumericError("fuzzy_input: non-finite position");
    }
    return std::clamp(std::abs(zeta_i - zeta_j) - d, universe_lo, universe_hi);
}

double membership(const TriangularMembership& mf, double z) {
    if (z <= mf.center) {
        const double rise = 1.0 - (mf.center - z) / mf.left;
        return rise > 0.0 ? rise : 0.0;
    }
    const double fall = 1.0 - (z - mf.center) / mf.right;
    return fall > 0.0 ? fall : 0.0;
}

Eigen::VectorXd firing_strengths(const FuzzyBank& bank, double z, double eps_fire) {
    const auto P = static_cast<Eigen::Index>(bank.rules.size());
    Eigen::VectorXd eta(P);
    for (Eigen::Index p = 0; p < P; ++p) eta(p) = membership(bank.rules[p], z);
    const double total = eta.sum();
    if (total < eps_fire) {
        // dead zone between non-overlapping supports: one-hot at the nearest
        // center, ties resolved toward the lower one
        Eigen::Index best = 0;
        double best_dist = std::abs(z - bank.rules[0].center);
        for (Eigen::Index p = 1; p < P; ++p) {
            const double dist = std::abs(z - bank.rules[p].center);
            if (dist < best_dist) {
                best = p;
                best_dist = dist;
            }
        }
        eta.setZero();
        eta(best) = 1.0;
        return eta;
    }
    return eta / total;
}

double defuzzify(const Eigen::VectorXd& psi, const Eigen::VectorXd& phi) {
    return psi.dot(phi);
}

double reward(double z, double d, double eps_reward) {
    if (std::abs(z) <= eps_reward) return 3.0;
    if (z > 0.0) return -z;
    return 3.0 * z / d;
}

double critic_value_S(const Eigen::VectorXd& psi, const Eigen::VectorXd& Phi) {
    return psi.dot(Phi);
}

double td_error(double S_k, double R_k, double S_next) {
    return S_k - (R_k + S_next);
}

namespace {
double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}

Eigen::VectorXd update_pair_actor(const Eigen::VectorXd& phi,
                                  const Eigen::VectorXd& psi, double T,
                                  double alpha_a) {
    return phi - alpha_a * sign_of(T) * psi;
}

Eigen::VectorXd update_pair_critic(const Eigen::VectorXd& Phi,
                                   const Eigen::VectorXd& psi, double T,
                                   double alpha_c) {
    return Phi - alpha_c * T * psi;
}

double aggregate_separation(const std::vector<double>& pair_outputs) {
    if (pair_outputs.empty()) return 0.0;
    const double sum = std::accumulate(pair_outputs.begin(), pair_outputs.end(), 0.0);
    return sum / static_cast<double>(pair_outputs.size());
}

PairFuzzyUnit::PairFuzzyUnit(FuzzyBank bank) : bank_(std::move(bank)) {
    psi_k_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bank_.rules.size()));
}

double evaluate_bank(const FuzzyBank& bank, double z, double eps_fire) {
    return defuzzify(firing_strengths(bank, z, eps_fire), bank.phi);
}

void learn_bank(FuzzyBank& bank, double z_k, double sigma_k, double z_next,
                const SeparationParams& params) {
    const Eigen::VectorXd psi_k = firing_strengths(bank, z_k, params.eps_fire);
    const Eigen::VectorXd psi_next = firing_strengths(bank, z_next, params.eps_fire);
    const double S_k = critic_value_S(psi_k, bank.Phi);
    const double S_next = critic_value_S(psi_next, bank.Phi);
    const double R_k = reward(z_k, params.d, params.eps_reward);
    const double T = td_error(S_k, R_k, S_next);
    const bool inside = std::abs(T) <= params.td_deadzone;
    if (!(params.deadzone_applies_to_critic && inside)) {
        bank.Phi = update_pair_critic(bank.Phi, psi_k, T, params.alpha_c);
        if (params.critic_bound > 0.0) {
            bank.Phi = bank.Phi.cwiseMax(-params.critic_bound)
                           .cwiseMin(params.critic_bound);
        }
    }
    if (!inside) {
        const double sig = params.euclidean_credit ? sigma_k : 1.0;
        bank.phi = update_pair_actor(bank.phi, psi_k, sig * T, params.alpha_a);
    }
    if (!bank.phi.allFinite() || !bank.Phi.allFinite()) {
        throw NumericError("separation weights diverged (non-finite)");
    }
}

double PairFuzzyUnit::control(double z, double sigma) {
    z_k_ = z;
    sigma_k_ = sigma;
    psi_k_ = firing_strengths(bank_, z);
    S_k_ = critic_value_S(psi_k_, bank_.Phi);
    armed_ = true;
    return defuzzify(psi_k_, bank_.phi);
}

void PairFuzzyUnit::learn(double z_next, const SeparationParams& params) {
    if (frozen_) return;
    if (!armed_) throw NumericError("PairFuzzyUnit::learn called before control");
    learn_bank(bank_, z_k_, sigma_k_, z_next, params);
}

} // namespace flock
