#include "diachron/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "diachron/errors.hpp"

namespace diachron::oracle {

NeighborList knn(const EpochEmbedding& embedding, VenueId query, std::size_t k) {
    auto q = embedding.index_of(query);
    if (!q) throw PreconditionError("oracle::knn: unknown query venue " + std::to_string(raw(query)));
    const auto qv = embedding.row(*q);

    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (i == *q) continue;
        const auto v = embedding.row(i);
        double uv = 0, uu = 0, vv = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            const double a = qv[j], b = v[j];
            uv += a * b;
        }
        for (float a : qv) uu += static_cast<double>(a) * a;
        for (float b : v) vv += static_cast<double>(b) * b;
        all.push_back({embedding.ids()[i], uv / (std::sqrt(uu) * std::sqrt(vv))});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.venue < b.venue;
    });
    all.resize(std::min(k, all.size()));
    return {query, std::move(all)};
}

namespace {

// Row-stochastic transition matrix of the cluster-clique graph (self-loops
// included): from any member, step uniformly to a member of the same cluster.
Eigen::MatrixXd clique_transitions(const Clustering& c) {
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (c.cluster(static_cast<std::size_t>(i)) == c.cluster(static_cast<std::size_t>(j))) w(i, j) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) w.row(i) /= w.row(i).sum();
    return w;
}

Eigen::RowVectorXd personalized_pagerank(const Eigen::MatrixXd& w, Eigen::Index seed, double alpha,
                                         std::size_t iterations) {
    Eigen::RowVectorXd restart = Eigen::RowVectorXd::Zero(w.rows());
    restart(seed) = 1.0;
    Eigen::RowVectorXd p = restart;
    for (std::size_t it = 0; it < iterations; ++it) {
        Eigen::RowVectorXd next = (1.0 - alpha) * restart + alpha * (p * w);
        const double residual = (next - p).cwiseAbs().sum();
        p = std::move(next);
        if (residual < 1e-12) return p;
    }
    throw NumericError("oracle::ecs: power iteration did not converge in " + std::to_string(iterations) +
                       " iterations");
}

}  // namespace

std::vector<double> ecs(const Clustering& a, const Clustering& b, double alpha, std::size_t iterations) {
    if (a.elements() != b.elements()) throw PreconditionError("oracle::ecs: element sets differ");
    const Eigen::MatrixXd wa = clique_transitions(a);
    const Eigen::MatrixXd wb = clique_transitions(b);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < wa.rows(); ++i) {
        const Eigen::RowVectorXd pa = personalized_pagerank(wa, i, alpha, iterations);
        const Eigen::RowVectorXd pb = personalized_pagerank(wb, i, alpha, iterations);
        out.push_back(1.0 - (pa - pb).cwiseAbs().sum() / (2.0 * alpha));
    }
    return out;
}

ProcrustesReport procrustes_check(const Eigen::MatrixXd& v1, const Eigen::MatrixXd& v2, const Eigen::MatrixXd& r,
                                  double tolerance) {
    ProcrustesReport rep;
    if (r.rows() != r.cols() || r.rows() != v1.rows() || v1.rows() != v2.rows() || v1.cols() != v2.cols()) {
        rep.detail = "shape mismatch";
        return rep;
    }
    const auto d = r.rows();
    rep.orthogonality_residual = (r.transpose() * r - Eigen::MatrixXd::Identity(d, d)).norm();

    const Eigen::MatrixXd m = v2 * v1.transpose();
    const double scale = std::max(1.0, m.norm());
    const Eigen::MatrixXd s = m.transpose() * r;
    rep.asymmetry = (s - s.transpose()).norm() / scale;
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = eig.eigenvalues().minCoeff() / scale;

    const bool orthogonal = rep.orthogonality_residual <= 1e-6;
    const bool symmetric = rep.asymmetry <= tolerance;
    const bool psd = rep.min_eigenvalue >= -tolerance;
    rep.pass = orthogonal && symmetric && psd;
    if (!orthogonal) rep.detail += "R is not orthogonal (residual " + std::to_string(rep.orthogonality_residual) + "); ";
    if (!symmetric) rep.detail += "M^T R is not symmetric; ";
    if (!psd) rep.detail += "M^T R has a negative eigenvalue; ";
    return rep;
}

}  // namespace diachron::oracle
