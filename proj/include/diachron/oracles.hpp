#pragma once
// Brute-force reference implementations used to check the library's fast
// paths. They share no code with the routines they check.

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "diachron/embedding.hpp"
#include "diachron/similarity.hpp"
#include "diachron/ternary.hpp"

namespace diachron::oracle {

// Cosine to every other venue, full sort, ties by ascending venue id.
NeighborList knn(const EpochEmbedding& embedding, VenueId query, std::size_t k);

// Personalized PageRank on each clustering's cluster-clique graph by dense
// power iteration until the L1 residual drops below 1e-12, then the same
// per-element similarity formula. Throws NumericError if `iterations` is not
// enough to converge.
std::vector<double> ecs(const Clustering& a, const Clustering& b, double alpha = 0.9, std::size_t iterations = 1000);

struct ProcrustesReport {
    bool pass = false;
    double orthogonality_residual = 0;  // ||R^T R - I||_F
    double asymmetry = 0;               // ||S - S^T||_F / max(1, ||M||_F), S = M^T R
    double min_eigenvalue = 0;          // of (S + S^T)/2, relative to max(1, ||M||_F)
    std::string detail;
};

// First-order optimality of R for min ||R V1 - V2||_F over orthogonal R:
// with M = V2 V1^T, M^T R must be symmetric positive semidefinite.
ProcrustesReport procrustes_check(const Eigen::MatrixXd& v1, const Eigen::MatrixXd& v2, const Eigen::MatrixXd& r,
                                  double tolerance = 1e-8);

}  // namespace diachron::oracle
