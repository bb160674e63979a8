#include "sws/report.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "sws/error.hpp"
#include "sws/metrics.hpp"

namespace sws::report {

using nlohmann::json;

void write_histogram_svg(std::ostream& os, std::span<const double> values, std::size_t bins,
                         const std::string& title) {
    const auto agg = metrics::aggregate(values, bins);
    const int width = 640, height = 360, margin = 40;
    std::size_t max_count = 1;
    for (const auto& b : agg.histogram) max_count = std::max(max_count, b.count);

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    os << "  <text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << title << "</text>\n";

    const double plot_w = width - 2.0 * margin;
    const double plot_h = height - 2.0 * margin;
    const double bar_w = plot_w / static_cast<double>(agg.histogram.size());
    for (std::size_t i = 0; i < agg.histogram.size(); ++i) {
        const double h = plot_h * static_cast<double>(agg.histogram[i].count) /
                         static_cast<double>(max_count);
        os << "  <rect x=\"" << margin + bar_w * static_cast<double>(i) << "\" y=\""
           << margin + (plot_h - h) << "\" width=\"" << bar_w * 0.92 << "\" height=\"" << h
           << "\" fill=\"#4878a8\"/>\n";
    }
    os << "  <text x=\"" << margin << "\" y=\"" << height - 8
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << agg.histogram.front().left
       << "</text>\n";
    os << "  <text x=\"" << width - margin << "\" y=\"" << height - 8
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << agg.histogram.back().right << "</text>\n";
    os << "</svg>\n";
}

std::vector<MetricRow> collect_metric_reports(std::span<const std::filesystem::path> dirs) {
    std::vector<MetricRow> rows;
    for (const auto& dir : dirs) {
        if (!std::filesystem::exists(dir)) continue;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().filename() != "metric_report.json")
                continue;
            std::ifstream is(entry.path());
            json doc = json::parse(is, nullptr, false);
            if (doc.is_discarded())
                throw Error(ErrorCode::PARSE_ERROR, "bad report " + entry.path().string());
            MetricRow row;
            row.dataset = doc.value("dataset", "");
            row.model = doc.value("model", "");
            row.cs_median = doc.value("cs_median", 0.0);
            row.abr_median = doc.value("abr_median", 0.0);
            row.n_tokens = doc.value("n_tokens", std::size_t{0});
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
        return std::tie(a.dataset, a.model) < std::tie(b.dataset, b.model);
    });
    return rows;
}

void write_metric_csv(std::ostream& os, std::span<const MetricRow> rows) {
    os << "dataset,model,cs_median,abr_median,n_tokens\n";
    for (const auto& r : rows)
        os << r.dataset << ',' << r.model << ',' << r.cs_median << ',' << r.abr_median << ','
           << r.n_tokens << '\n';
}

}  // namespace sws::report
