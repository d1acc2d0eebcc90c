#include "mgc/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace mgc {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

bool RunReport::pass() const {
    for (const SuiteOutcome& s : suites)
        if (!s.pass)
            return false;
    return true;
}

namespace {

nlohmann::ordered_json to_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["condition"] = rep.condition;
    j["cases"] = rep.cases;
    j["worst_residual"] = rep.worst_residual;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    j["witness"] = rep.witness;
    return j;
}

} // namespace

void write_report_json(const RunReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = report.schema_version;
    j["graph_file"] = report.graph_file;
    j["h"] = report.h;
    j["seed"] = report.seed;
    j["lambda1"] = report.lambda1;
    j["t_grid"] = report.t_grid;
    j["eps_sweep"] = report.eps_sweep;
    j["fitted_C"] = report.fitted_C;
    j["fitted_K"] = report.fitted_K;
    j["degree_floor"] = report.degree_floor;
    j["pass"] = report.pass();
    j["suites"] = nlohmann::ordered_json::array();
    for (const SuiteOutcome& suite : report.suites) {
        nlohmann::ordered_json js;
        js["name"] = suite.name;
        js["pass"] = suite.pass;
        js["tolerance_model"] = {{"a", suite.tolerance_a},
                                 {"b", suite.tolerance_b},
                                 {"c", suite.tolerance_c}};
        js["reports"] = nlohmann::ordered_json::array();
        for (const VerificationReport& rep : suite.reports)
            js["reports"].push_back(to_json(rep));
        j["suites"].push_back(std::move(js));
    }
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void write_summary_csv(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    out << "suite,condition,cases,worst_residual,tolerance,pass,witness\n";
    for (const SuiteOutcome& suite : report.suites)
        for (const VerificationReport& rep : suite.reports)
            out << suite.name << ',' << rep.condition << ',' << rep.cases << ','
                << format_double(rep.worst_residual) << ','
                << format_double(rep.tolerance) << ',' << (rep.pass ? 1 : 0) << ','
                << rep.witness << '\n';
}

void write_suite_series_csv(const SuiteOutcome& suite, const std::string& path) {
    std::ofstream out(path);
    out << "case,witness,residual,tolerance,pass\n";
    for (const VerificationReport& rep : suite.reports)
        out << rep.cases << ',' << rep.witness << ','
            << format_double(rep.worst_residual) << ','
            << format_double(rep.tolerance) << ',' << (rep.pass ? 1 : 0) << '\n';
}

} // namespace mgc
