#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Tabular experiment results with a config echo, serializable to CSV and
// JSON. Formatting is locale-free and uses %.17g, so identical doubles give
// byte-identical output; wall-clock metadata is kept out of the serialized
// forms unless explicitly requested.

namespace sievelab {

struct ReportRow {
    std::string label;
    uint64_t x = 0;
    int64_t h = 0;
    double value = 0;
    double main_term = 0;
    double ratio = 0;     // value / main_term, NaN when main_term == 0
    double residual = 0;  // value - main_term
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::map<std::string, std::string> config;  // resolved config echo
    std::vector<std::string> warnings;
    double runtime_seconds = 0;  // excluded from serialization by default

    void add(const std::string& label, uint64_t x, int64_t h, double value, double main_term);

    // header comments "# key=value" (sorted), then
    // label,x,h,value,main_term,ratio,residual
    std::string to_csv() const;
    std::string to_json(bool include_timing = false) const;
};

std::string format_double(double v);  // %.17g, "nan"/"inf" spelled out

}  // namespace sievelab
