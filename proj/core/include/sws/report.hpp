#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sws::report {

// Standalone SVG histogram, one bar per bin.
void write_histogram_svg(std::ostream& os, std::span<const double> values, std::size_t bins,
                         const std::string& title);

struct MetricRow {
    std::string dataset;
    std::string model;
    double cs_median = 0.0;
    double abr_median = 0.0;
    std::size_t n_tokens = 0;
};

// Reads every metric_report.json below the given directories.
std::vector<MetricRow> collect_metric_reports(std::span<const std::filesystem::path> dirs);

void write_metric_csv(std::ostream& os, std::span<const MetricRow> rows);

}  // namespace sws::report
