#include "flock/consensus.hpp"

#include <cmath>

namespace flock {

FlockGraph complete_graph(Eigen::Index n, double c0) {
    if (n < 1) throw ConfigError("consensus graph needs at least one node");
    FlockGraph graph;
    graph.weights = Eigen::MatrixXd::Zero(n, n);
    if (n > 1) {
        const double w = c0 / static_cast<double>(n - 1);
        graph.weights.setConstant(w);
        graph.weights.diagonal().setZero();
    }
    return graph;
}

void validate_graph(const FlockGraph& graph) {
    const auto n = graph.order();
    if (graph.weights.cols() != n) throw ConfigError("graph weight matrix not square");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (graph.weights(i, i) != 0.0) throw ConfigError("graph diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (graph.weights(i, j) < 0.0) throw ConfigError("graph weights must be >= 0");
            if (graph.weights(i, j) != graph.weights(j, i)) {
                throw ConfigError("graph weights must be symmetric");
            }
        }
    }
}

Eigen::MatrixXd laplacian(const FlockGraph& graph) {
    Eigen::MatrixXd L = -graph.weights;
    L.diagonal() = graph.weights.rowwise().sum();
    return L;
}

double consensus_control(Eigen::Index i, const Eigen::VectorXd& velocities,
                         const FlockGraph& graph) {
    const auto n = graph.order();
    if (velocities.size() != n) throw ConfigError("velocity vector does not match graph order");
    if (i < 0 || i >= n) throw ConfigError("consensus_control: agent not in graph");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        acc += graph.weights(i, j) * (velocities(i) - velocities(j));
    }
    return -acc;
}

namespace {

// Dominant eigenvalue of a symmetric PSD matrix by power iteration, optionally
// keeping iterates orthogonal to the all-ones direction.
double dominant_eig(const Eigen::MatrixXd& M, bool deflate_ones) {
    const auto n = M.rows();
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + static_cast<double>(i);
    if (deflate_ones) v.array() -= v.mean();
    double norm = v.norm();
    if (norm == 0.0) v(0) = 1.0, norm = 1.0;
    v /= norm;
    double lambda = 0.0;
    for (int iter = 0; iter < 20000; ++iter) {
        Eigen::VectorXd w = M * v;
        if (deflate_ones) w.array() -= w.mean();
        const double wn = w.norm();
        if (wn < 1e-300) return 0.0;  // operator annihilates the subspace
        w /= wn;
        Eigen::VectorXd Mw = M * w;
        if (deflate_ones) Mw.array() -= Mw.mean();
        lambda = w.dot(Mw);
        if ((Mw - lambda * w).norm() <= 1e-10 * std::max(1.0, std::abs(lambda))) {
            return lambda;
        }
        v = w;
    }
    return lambda;
}

} // namespace

double spectral_radius(const Eigen::MatrixXd& L) {
    if (L.rows() == 0) throw ConfigError("spectral_radius of empty matrix");
    return dominant_eig(L, false);
}

double algebraic_connectivity(const Eigen::MatrixXd& L) {
    const auto n = L.rows();
    if (n < 2) throw ConfigError("algebraic connectivity undefined for graphs of order < 2");
    // Gershgorin bound on the spectrum, then look at g*I - L restricted to the
    // complement of the constant vector: its top eigenvalue is g - lambda_2.
    double g = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        g = std::max(g, L(i, i) + L.row(i).cwiseAbs().sum() - std::abs(L(i, i)));
    }
    g += 1.0;
    Eigen::MatrixXd M = -L;
    M.diagonal().array() += g;
    const double top = dominant_eig(M, true);
    double l2 = g - top;
    if (std::abs(l2) < 1e-12) l2 = 0.0;
    return l2;
}

} // namespace flock
