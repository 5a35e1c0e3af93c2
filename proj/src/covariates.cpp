#include "carima/covariates.hpp"

#include "carima/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carima {

CovariateMatrix::CovariateMatrix(Date start, std::vector<std::string> names, Eigen::MatrixXd values)
    : start_(start), names_(std::move(names)), values_(std::move(values)) {
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
        throw Error(ErrorCode::InvalidArgument, "covariate names and columns disagree");
    }
}

CovariateMatrix CovariateMatrix::from_series(std::span<const TimeSeries> columns) {
    if (columns.empty()) {
        return {};
    }
    const Date start = columns.front().start_date();
    const std::size_t n = columns.front().size();
    Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const TimeSeries& col = columns[j];
        if (col.start_date() != start || col.size() != n) {
            throw Error(ErrorCode::DateMisalignment,
                        "covariate '" + col.name() + "' is not aligned with '" +
                            columns.front().name() + "'");
        }
        for (std::size_t i = 0; i < n; ++i) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        }
        names.push_back(col.name());
    }
    return CovariateMatrix(start, std::move(names), std::move(values));
}

std::optional<Eigen::Index> CovariateMatrix::column_index(const std::string& name) const noexcept {
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (names_[j] == name) return static_cast<Eigen::Index>(j);
    }
    return std::nullopt;
}

Eigen::MatrixXd CovariateMatrix::extract(std::span<const std::string> names, Date from,
                                         std::size_t count) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto col = column_index(names[j]);
        if (!col) {
            throw Error(ErrorCode::MissingCovariate,
                        "covariate '" + names[j] + "' missing at " + from.to_string());
        }
        for (std::size_t i = 0; i < count; ++i) {
            const Date day = from + static_cast<long>(i);
            const long row = day - start_;
            const bool covered = row >= 0 && row < values_.rows();
            const double v = covered ? values_(row, *col) : std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::MissingCovariate,
                            "covariate '" + names[j] + "' missing at " + day.to_string());
            }
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return out;
}

CovariateMatrix CovariateMatrix::with_column(const TimeSeries& column) const {
    if (values_.cols() == 0 && values_.rows() == 0) {
        std::vector<TimeSeries> cols{column};
        return from_series(cols);
    }
    Eigen::MatrixXd values = values_;
    std::vector<std::string> names = names_;
    Eigen::Index target = values.cols();
    if (const auto existing = column_index(column.name())) {
        target = *existing;
    } else {
        values.conservativeResize(Eigen::NoChange, values.cols() + 1);
        names.push_back(column.name());
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        const auto idx = column.index_of(start_ + static_cast<long>(i));
        values(i, target) = idx ? column[*idx] : std::numeric_limits<double>::quiet_NaN();
    }
    return CovariateMatrix(start_, std::move(names), std::move(values));
}

CovariateMatrix CovariateMatrix::merged(const CovariateMatrix& other) const {
    if (other.empty()) return *this;
    if (empty()) return other;
    const Date first = std::min(start_, other.start_);
    const Date last = std::max(start_ + static_cast<long>(rows()) - 1, other.start_ + static_cast<long>(other.rows()) - 1);
    const auto n = static_cast<Eigen::Index>(last - first) + 1;
    std::vector<std::string> names;
    std::vector<const CovariateMatrix*> source;
    std::vector<Eigen::Index> column;
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (other.column_index(names_[j])) continue;
        names.push_back(names_[j]);
        source.push_back(this);
        column.push_back(static_cast<Eigen::Index>(j));
    }
    for (std::size_t j = 0; j < other.names_.size(); ++j) {
        names.push_back(other.names_[j]);
        source.push_back(&other);
        column.push_back(static_cast<Eigen::Index>(j));
    }
    Eigen::MatrixXd values = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(names.size()),
                                                       std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < names.size(); ++j) {
        const CovariateMatrix& m = *source[j];
        const auto offset = static_cast<Eigen::Index>(m.start_ - first);
        values.block(offset, static_cast<Eigen::Index>(j), m.rows(), 1) = m.values_.col(column[j]);
    }
    return CovariateMatrix(first, std::move(names), std::move(values));
}

}  // namespace carima
