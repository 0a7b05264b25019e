#pragma once

#include <Eigen/Dense>

#include "flock/errors.hpp"

namespace flock {

// Weighted undirected graph over the participating (active, non-leader) agents.
struct FlockGraph {
    Eigen::MatrixXd weights;  // symmetric, zero diagonal, entries >= 0

    Eigen::Index order() const { return weights.rows(); }
};

FlockGraph complete_graph(Eigen::Index n, double c0);
void validate_graph(const FlockGraph& graph);

Eigen::MatrixXd laplacian(const FlockGraph& graph);

// u_c for agent i (one axis): -sum_j c_ij (v_i - v_j)
double consensus_control(Eigen::Index i, const Eigen::VectorXd& velocities,
                         const FlockGraph& graph);

// Second-smallest Laplacian eigenvalue, via power iteration on a spectral
// complement with the constant vector deflated out.
double algebraic_connectivity(const Eigen::MatrixXd& L);
double spectral_radius(const Eigen::MatrixXd& L);

} // namespace flock
