#pragma once

#include "carima/date.hpp"
#include "carima/timeseries.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace carima {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;   // 1-based file line of each row

    /// Throws Error(ConfigError) naming the file when the column is absent.
    [[nodiscard]] std::size_t column(const std::string& name, const std::string& source) const;
};

/// Comma-separated, header row required, double quotes allowed around
/// fields. Blank lines are skipped. Throws Error(IoError).
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);
[[nodiscard]] CsvTable parse_csv(const std::string& text, const std::string& source);

/// Daily series from the `date` column and one numeric column. Dates must be
/// strictly increasing and contiguous.
/// Throws Error(GapInCalendar | UnparseableValue | DuplicateDate | ConfigError).
[[nodiscard]] TimeSeries ingest_series(const std::filesystem::path& path, const std::string& column);

/// Bars from the open/high/low/close columns (names matched case-insensitively).
/// Throws the ingest_series errors and Error(InvalidBar) naming the line.
[[nodiscard]] std::vector<OhlcBar> ingest_ohlc(const std::filesystem::path& path);

}  // namespace carima
