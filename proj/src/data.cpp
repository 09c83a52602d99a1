#include "atv/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace atv {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

} // namespace

SeriesData load_returns(DatasetConfig& config) {
    std::ifstream in(config.path);
    if (!in) throw ParseError("cannot open " + config.path);

    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty file: " + config.path);
    const auto columns = split_csv_line(header);
    int date_idx = -1, value_idx = -1;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == config.date_column) date_idx = static_cast<int>(i);
        if (columns[i] == config.value_column) value_idx = static_cast<int>(i);
    }
    if (value_idx < 0)
        throw ParseError("column '" + config.value_column + "' not found in " + config.path);
    const bool filter_dates = !config.date_min.empty() || !config.date_max.empty();
    if (filter_dates && date_idx < 0)
        throw ParseError("date filtering requested but column '" + config.date_column +
                         "' not found");

    config.dropped_rows = 0;
    std::vector<double> values;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (value_idx >= static_cast<int>(fields.size()))
            throw ParseError("row " + std::to_string(lineno) + " has too few columns");
        if (filter_dates) {
            const std::string& d = fields[date_idx];
            // ISO-8601 dates compare correctly as strings.
            if (!config.date_min.empty() && d < config.date_min) continue;
            if (!config.date_max.empty() && d > config.date_max) continue;
        }
        const std::string& raw = fields[value_idx];
        if (is_missing(raw)) {
            ++config.dropped_rows;
            continue;
        }
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size())
                throw ParseError("row " + std::to_string(lineno) +
                                 ": trailing characters in value '" + raw + "'");
            values.push_back(v);
        } catch (const std::invalid_argument&) {
            throw ParseError("row " + std::to_string(lineno) + ": cannot parse value '" +
                             raw + "'");
        }
    }
    if (values.empty()) throw EmptySeries("no usable rows in " + config.path);

    std::vector<double> returns;
    if (config.kind == ValueKind::Prices) {
        if (values.size() < 2) throw EmptySeries("need at least two prices");
        returns.reserve(values.size() - 1);
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (!(values[i] > 0.0) || !(values[i - 1] > 0.0))
                throw NonPositivePrice("non-positive price at row " + std::to_string(i + 1));
            returns.push_back(std::log(values[i] / values[i - 1]));
        }
    } else {
        returns = std::move(values);
    }

    SeriesData series;
    series.x.resize(static_cast<Eigen::Index>(returns.size()));
    for (std::size_t i = 0; i < returns.size(); ++i)
        series.x(static_cast<Eigen::Index>(i)) = config.scale * returns[i];
    return series;
}

double quantile_type7(const Eigen::VectorXd& sorted, double p) {
    const int n = static_cast<int>(sorted.size());
    const double h = (n - 1) * p;
    const int lo = static_cast<int>(std::floor(h));
    const int hi = std::min(lo + 1, n - 1);
    return sorted(lo) + (h - lo) * (sorted(hi) - sorted(lo));
}

SummaryStats summary(const SeriesData& series) {
    const int T = series.size();
    if (T < 4) throw std::invalid_argument("summary: need T >= 4");

    SummaryStats s;
    s.mean = series.x.mean();
    const Eigen::ArrayXd d = series.x.array() - s.mean;
    const double m2 = d.square().mean();
    const double m3 = d.cube().mean();
    const double m4 = d.square().square().mean();
    s.sd = std::sqrt(d.square().sum() / (T - 1));
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    s.excess_kurtosis = s.kurtosis - 3.0;
    s.min = series.x.minCoeff();
    s.max = series.x.maxCoeff();

    Eigen::VectorXd sorted = series.x;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    s.median = quantile_type7(sorted, 0.5);

    const double q1 = quantile_type7(sorted, 0.25);
    const double q3 = quantile_type7(sorted, 0.75);
    if (q3 == q1) throw DegenerateQuantiles("Q3 == Q1, Bowley skewness undefined");
    s.robust_skewness = (q3 + q1 - 2.0 * s.median) / (q3 - q1);

    const double e1 = quantile_type7(sorted, 1.0 / 8);
    const double e2 = quantile_type7(sorted, 2.0 / 8);
    const double e3 = quantile_type7(sorted, 3.0 / 8);
    const double e5 = quantile_type7(sorted, 5.0 / 8);
    const double e6 = quantile_type7(sorted, 6.0 / 8);
    const double e7 = quantile_type7(sorted, 7.0 / 8);
    if (e6 == e2) throw DegenerateQuantiles("E6 == E2, Moors kurtosis undefined");
    // 1.233 is the Moors kurtosis of the standard normal, so the centered
    // value is ~0 for Gaussian data.
    s.robust_kurtosis = ((e7 - e5) + (e3 - e1)) / (e6 - e2) - 1.233;
    return s;
}

} // namespace atv
