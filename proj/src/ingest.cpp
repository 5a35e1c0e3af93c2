#include "carima/ingest.hpp"

#include "carima/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace carima {

namespace {

std::vector<std::string> split_line(const std::string& line, const std::string& source, std::size_t lineno) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    if (quoted) throw Error(ErrorCode::UnparseableValue, source + " line " + std::to_string(lineno) + ": unterminated quote");
    out.push_back(std::move(field));
    return out;
}

std::string trim(std::string s) {
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& text, const std::string& source, std::size_t line, const std::string& column) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw Error(ErrorCode::UnparseableValue, source + " line " + std::to_string(line) + ": column '" + column +
                                                     "' value '" + text + "' is not a finite number");
    }
    return v;
}

struct DatedRows {
    Date start;
    std::vector<std::size_t> order;   // row indices, one per date
};

DatedRows check_dates(const CsvTable& t, const std::string& source) {
    const std::size_t dc = t.column("date", source);
    if (t.rows.empty()) throw Error(ErrorCode::SeriesTooShort, source + " has no data rows");
    std::vector<Date> dates;
    dates.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Date d;
        if (!Date::try_parse(t.rows[r][dc], d)) {
            throw Error(ErrorCode::UnparseableValue, source + " line " + std::to_string(t.lines[r]) + ": date '" +
                                                         t.rows[r][dc] + "' is not YYYY-MM-DD");
        }
        dates.push_back(d);
    }
    std::vector<std::string> gaps;
    for (std::size_t r = 1; r < dates.size(); ++r) {
        if (dates[r] == dates[r - 1]) {
            throw Error(ErrorCode::DuplicateDate, source + " line " + std::to_string(t.lines[r]) + ": date " +
                                                      dates[r].to_string() + " repeats");
        }
        if (dates[r] < dates[r - 1]) {
            throw Error(ErrorCode::InvalidArgument, source + " line " + std::to_string(t.lines[r]) + ": date " +
                                                        dates[r].to_string() + " is earlier than the previous row");
        }
        for (Date g = dates[r - 1] + 1; g < dates[r]; g = g + 1) gaps.push_back(g.to_string());
    }
    if (!gaps.empty()) {
        std::string list;
        for (std::size_t i = 0; i < gaps.size() && i < 20; ++i) list += (i ? ", " : "") + gaps[i];
        if (gaps.size() > 20) list += ", ... (" + std::to_string(gaps.size()) + " in total)";
        throw Error(ErrorCode::GapInCalendar, source + " is missing calendar days: " + list);
    }
    DatedRows out{dates.front(), {}};
    out.order.resize(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) out.order[r] = r;
    return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name, const std::string& source) const {
    const std::string want = lower(name);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (lower(header[i]) == want) return i;
    }
    throw Error(ErrorCode::ConfigError, source + " has no column '" + name + "'");
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_line(line, source, lineno);
        for (auto& f : fields) f = trim(f);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw Error(ErrorCode::UnparseableValue, source + " line " + std::to_string(lineno) + ": expected " +
                                                         std::to_string(t.header.size()) + " fields, found " +
                                                         std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
        t.lines.push_back(lineno);
    }
    if (!have_header) throw Error(ErrorCode::UnparseableValue, source + " is empty (a header row is required)");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

TimeSeries ingest_series(const std::filesystem::path& path, const std::string& column) {
    const std::string source = path.string();
    const CsvTable t = read_csv(path);
    const std::size_t vc = t.column(column, source);
    const DatedRows d = check_dates(t, source);
    std::vector<double> values;
    values.reserve(t.rows.size());
    for (std::size_t r : d.order) values.push_back(parse_number(t.rows[r][vc], source, t.lines[r], column));
    return TimeSeries(d.start, std::move(values), column);
}

std::vector<OhlcBar> ingest_ohlc(const std::filesystem::path& path) {
    const std::string source = path.string();
    const CsvTable t = read_csv(path);
    const std::size_t oc = t.column("open", source), hc = t.column("high", source);
    const std::size_t lc = t.column("low", source), cc = t.column("close", source);
    const DatedRows d = check_dates(t, source);
    std::vector<OhlcBar> bars;
    bars.reserve(t.rows.size());
    for (std::size_t r : d.order) {
        const auto& row = t.rows[r];
        OhlcBar bar{d.start + static_cast<long>(r), parse_number(row[oc], source, t.lines[r], "open"),
                    parse_number(row[hc], source, t.lines[r], "high"), parse_number(row[lc], source, t.lines[r], "low"),
                    parse_number(row[cc], source, t.lines[r], "close")};
        try {
            bar.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidBar, source + " line " + std::to_string(t.lines[r]) + " (" +
                                                   bar.date.to_string() + "): " + e.what());
        }
        bars.push_back(bar);
    }
    return bars;
}

}  // namespace carima
