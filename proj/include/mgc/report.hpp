#pragma once

#include "mgc/curvature.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mgc {

/// Fixed "%.17g" rendering so equal doubles always print the same bytes.
std::string format_double(double x);

struct SuiteOutcome {
    std::string name;
    bool pass = true;
    double tolerance_a = 0.0; // tolerance model tol = a h^2 + b dt + c
    double tolerance_b = 0.0;
    double tolerance_c = 0.0;
    std::vector<VerificationReport> reports;

    void add(VerificationReport rep) {
        pass = pass && rep.pass;
        reports.push_back(std::move(rep));
    }
};

struct RunReport {
    int schema_version = 1;
    std::string graph_file;
    double h = 0.0;
    std::uint64_t seed = 0;
    double lambda1 = 0.0;
    std::vector<double> t_grid;
    std::vector<double> eps_sweep;
    double fitted_C = 0.0;
    double fitted_K = 0.0;
    int degree_floor = 0; // deg_max - 1, the guaranteed-constant threshold
    std::vector<SuiteOutcome> suites;

    bool pass() const;
};

void write_report_json(const RunReport& report, const std::string& path);
void write_summary_csv(const RunReport& report, const std::string& path);
void write_suite_series_csv(const SuiteOutcome& suite, const std::string& path);

} // namespace mgc
