#include "sievelab/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace sievelab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ExperimentReport::add(const std::string& label, uint64_t x, int64_t h, double value,
                           double main_term) {
    ReportRow row;
    row.label = label;
    row.x = x;
    row.h = h;
    row.value = value;
    row.main_term = main_term;
    row.ratio = (main_term != 0.0) ? value / main_term : std::nan("");
    row.residual = value - main_term;
    rows.push_back(std::move(row));
}

std::string ExperimentReport::to_csv() const {
    std::string out;
    for (const auto& [k, v] : config) out += "# " + k + "=" + v + "\n";
    for (const auto& w : warnings) out += "# warning: " + w + "\n";
    out += "label,x,h,value,main_term,ratio,residual\n";
    char buf[64];
    for (const auto& r : rows) {
        out += r.label;
        std::snprintf(buf, sizeof(buf), ",%llu,%lld,", static_cast<unsigned long long>(r.x),
                      static_cast<long long>(r.h));
        out += buf;
        out += format_double(r.value) + "," + format_double(r.main_term) + "," +
               format_double(r.ratio) + "," + format_double(r.residual) + "\n";
    }
    return out;
}

std::string ExperimentReport::to_json(bool include_timing) const {
    nlohmann::ordered_json j;
    j["config"] = config;
    if (!warnings.empty()) j["warnings"] = warnings;
    if (include_timing) j["runtime_seconds"] = runtime_seconds;
    nlohmann::ordered_json rows_j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["label"] = r.label;
        row["x"] = r.x;
        row["h"] = r.h;
        row["value"] = r.value;
        row["main_term"] = r.main_term;
        if (std::isnan(r.ratio))
            row["ratio"] = nullptr;
        else
            row["ratio"] = r.ratio;
        row["residual"] = r.residual;
        rows_j.push_back(std::move(row));
    }
    j["rows"] = std::move(rows_j);
    return j.dump(2) + "\n";
}

}  // namespace sievelab
