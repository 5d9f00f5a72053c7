#include "iml/metric.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "iml/error.hpp"

namespace iml {

ProjectionMatrix::ProjectionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (!entries_.allFinite()) throw Error("projection matrix has non-finite entries");
}

ProjectionMatrix ProjectionMatrix::identity(std::size_t dim, std::size_t rank) {
    if (rank == 0) rank = dim;
    if (rank > dim) throw Error("rank cannot exceed dimension");
    return ProjectionMatrix(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rank), static_cast<Eigen::Index>(dim)));
}

double ProjectionMatrix::sq_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x2) const {
    if (x.size() != entries_.cols() || x2.size() != entries_.cols())
        throw Error("sq_distance: dimension mismatch (L has " + std::to_string(entries_.cols()) + " columns, got " +
                    std::to_string(x.size()) + " and " + std::to_string(x2.size()) + ")");
    return (entries_ * (x - x2)).squaredNorm();
}

Eigen::MatrixXd ProjectionMatrix::project(const Eigen::MatrixXd& rows) const {
    if (rows.cols() != entries_.cols())
        throw Error("project: expected " + std::to_string(entries_.cols()) + " columns, got " +
                    std::to_string(rows.cols()));
    return rows * entries_.transpose();
}

void ProjectionMatrix::write_csv(std::ostream& out) const {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
            if (j) out << ',';
            out << entries_(i, j);
        }
        out << '\n';
    }
}

void ProjectionMatrix::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_csv(out);
}

ProjectionMatrix ProjectionMatrix::read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw Error("projection CSV: bad number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw Error("projection CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("projection CSV: empty");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return ProjectionMatrix(std::move(m));
}

ProjectionMatrix ProjectionMatrix::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_csv(in);
}

} // namespace iml
