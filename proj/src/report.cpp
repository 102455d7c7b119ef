#include "darkpoint/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace darkpoint {

namespace {

std::string g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

std::string report_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["config"] = {
        {"w", report.config.w},
        {"h", report.config.h},
        {"lambda", report.config.lambda.value()},
        {"sigma", report.config.sigma},
        {"trials", report.config.trials},
        {"seed", report.config.seed},
        {"noise", to_string(report.config.noise)},
        {"margin", report.config.effective_margin()},
        {"norm", to_string(report.config.norm)},
        {"sigma_k", report.sigma_k},
        {"modulate", report.modulate},
    };
    j["encodings"] = report.encodings;
    j["strategies"] = report.strategies;
    for (const auto& [key, cell] : report.cells) {
        j["cells"][key] = {
            {"mean_err", cell.mean_err},
            {"median_err", cell.median_err},
            {"p95_err", cell.p95_err},
            {"mean_err_heatmap", cell.mean_err_heatmap},
            {"rate_0.1", cell.recovery_rate[0]},
            {"rate_0.5", cell.recovery_rate[1]},
            {"rate_1.0", cell.recovery_rate[2]},
            {"fallback_border", cell.fallback_border},
            {"fallback_singular", cell.fallback_singular},
            {"fallback_offset", cell.fallback_offset},
        };
    }
    return j.dump(2) + "\n";
}

std::string report_to_csv(const BenchReport& report) {
    std::string out =
        "encoding,strategy,mean_err,median_err,p95_err,rate_0.1,rate_0.5,rate_1.0,"
        "fallback_border,fallback_singular,fallback_offset,ns_per_decode\n";
    for (const auto& encoding : report.encodings)
        for (const auto& strategy : report.strategies) {
            const CellStats& c = report.cells.at(encoding + "/" + strategy);
            out += encoding + "," + strategy + "," + g9(c.mean_err) + "," + g9(c.median_err) +
                   "," + g9(c.p95_err) + "," + g9(c.recovery_rate[0]) + "," +
                   g9(c.recovery_rate[1]) + "," + g9(c.recovery_rate[2]) + "," +
                   g9(c.fallback_border) + "," + g9(c.fallback_singular) + "," +
                   g9(c.fallback_offset) + "," + g9(c.ns_per_decode) + "\n";
        }
    return out;
}

std::string report_to_table(const BenchReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(14) << "encoding" << std::setw(10) << "strategy" << std::right
       << std::setw(14) << "mean_err" << std::setw(14) << "median_err" << std::setw(14)
       << "p95_err" << std::setw(10) << "rate_0.5" << "\n";
    os << std::string(76, '-') << "\n";
    for (const auto& encoding : report.encodings)
        for (const auto& strategy : report.strategies) {
            const CellStats& c = report.cells.at(encoding + "/" + strategy);
            os << std::left << std::setw(14) << encoding << std::setw(10) << strategy
               << std::right << std::setprecision(6) << std::setw(14) << c.mean_err
               << std::setw(14) << c.median_err << std::setw(14) << c.p95_err << std::setw(10)
               << std::setprecision(4) << c.recovery_rate[1] << "\n";
        }
    return os.str();
}

}  // namespace darkpoint
