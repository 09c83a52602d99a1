#pragma once

#include <string>

#include "atv/model.hpp"

namespace atv {

/// Standard and quantile-based summary statistics of a return series.
struct SummaryStats {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;        ///< non-excess (normal = 3)
    double excess_kurtosis = 0.0;
    double robust_skewness = 0.0; ///< Bowley: (Q3 + Q1 - 2 Q2) / (Q3 - Q1)
    double robust_kurtosis = 0.0; ///< Moors on octiles, centered at 1.233
};

enum class ValueKind { Prices, Returns };

struct DatasetConfig {
    std::string path;
    std::string date_column = "date";
    std::string value_column = "value";
    ValueKind kind = ValueKind::Returns;
    double scale = 10.0;
    std::string date_min; ///< inclusive ISO-8601 bound, empty = unbounded
    std::string date_max;
    int dropped_rows = 0; ///< filled by load_returns
};

/// Read a CSV with a header row, pick the configured columns, turn prices
/// into log-returns when asked, scale, and drop rows with missing values
/// (counted in config.dropped_rows).
SeriesData load_returns(DatasetConfig& config);

/// Quantile by linear interpolation on order statistics (type 7).
double quantile_type7(const Eigen::VectorXd& sorted, double p);

/// Requires T >= 4 so the quartiles and octiles are defined. Throws
/// DegenerateQuantiles when Q3 == Q1.
SummaryStats summary(const SeriesData& series);

} // namespace atv
