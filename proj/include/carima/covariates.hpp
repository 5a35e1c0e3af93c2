#pragma once

#include "carima/date.hpp"
#include "carima/timeseries.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace carima {

/// Named regressor columns on a shared daily index (one row per day).
/// NaN entries mark days where a covariate is unavailable.
class CovariateMatrix {
public:
    CovariateMatrix() = default;
    CovariateMatrix(Date start, std::vector<std::string> names, Eigen::MatrixXd values);

    /// Columns from series that all share one start date and length.
    static CovariateMatrix from_series(std::span<const TimeSeries> columns);

    [[nodiscard]] Date start_date() const noexcept { return start_; }
    [[nodiscard]] Eigen::Index rows() const noexcept { return values_.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return values_.cols(); }
    [[nodiscard]] bool empty() const noexcept { return values_.cols() == 0; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] std::optional<Eigen::Index> column_index(const std::string& name) const noexcept;

    /// Rows for days [from, from + count) of the named columns, in the order
    /// given. Throws Error(MissingCovariate) naming the column and the first
    /// date that is absent or NaN.
    [[nodiscard]] Eigen::MatrixXd extract(std::span<const std::string> names, Date from,
                                          std::size_t count) const;

    /// Copy with `column` appended (or replaced, if the name exists); the new
    /// column is aligned by date and padded with NaN where it does not reach.
    [[nodiscard]] CovariateMatrix with_column(const TimeSeries& column) const;

    /// Union of both column sets over the union of both date ranges, NaN
    /// where a side has no row. Columns of `other` replace same-named ones.
    [[nodiscard]] CovariateMatrix merged(const CovariateMatrix& other) const;

private:
    Date start_;
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
};

}  // namespace carima
