#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

namespace iml {

/// The r x d factor L of a Mahalanobis matrix M = L^T L. Distances under M are
/// Euclidean distances between projected points L x, so M is PSD for any L.
class ProjectionMatrix {
public:
    ProjectionMatrix() = default;
    explicit ProjectionMatrix(Eigen::MatrixXd entries);

    /// Identity when rank == dim; otherwise the first `rank` rows of it.
    static ProjectionMatrix identity(std::size_t dim, std::size_t rank = 0);

    const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    std::size_t rank() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.cols()); }

    Eigen::MatrixXd mahalanobis() const { return entries_.transpose() * entries_; }

    /// ||L (x - x')||^2
    double sq_distance(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& x2) const;

    /// Rows of X mapped through L: returns X L^T (n x r).
    Eigen::MatrixXd project(const Eigen::MatrixXd& rows) const;

    /// Row-major CSV, 17 significant digits (round-trips exactly).
    void write_csv(std::ostream& out) const;
    void save_csv(const std::filesystem::path& path) const;
    static ProjectionMatrix read_csv(std::istream& in);
    static ProjectionMatrix load_csv(const std::filesystem::path& path);

private:
    Eigen::MatrixXd entries_;
};

inline double sq_distance(const ProjectionMatrix& L, const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& x2) {
    return L.sq_distance(x, x2);
}

inline Eigen::MatrixXd project(const ProjectionMatrix& L, const Eigen::MatrixXd& rows) { return L.project(rows); }

} // namespace iml
