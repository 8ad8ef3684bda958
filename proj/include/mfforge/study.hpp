#pragma once

#include "mfforge/pipeline.hpp"

#include <iosfwd>

namespace mfforge {

enum class StudyMode { poisson, transport };

struct ConvergeConfig {
    std::string case_name;
    StudyMode mode = StudyMode::poisson;
    std::vector<double> hs; ///< strictly decreasing
    std::vector<int> orders;
    RelocationOptions relocation;
    bool condition = false;
    TransportOptions transport;
    int jobs = 1; ///< orders of one h level run concurrently
    Execution exec = Execution::parallel;

    void validate() const;
};

/// Desk-scale (or full) sweep of the case.
ConvergeConfig default_converge_config(const CaseSpec& c, StudyMode mode, bool full = false);

struct ConvergeRow {
    std::string case_name;
    std::string mode;
    double h = 0.0;
    int order = 0;
    int dofs = 0;
    int cells = 0;
    double error = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN(); ///< against the previous h of the same order
    double condition = std::numeric_limits<double>::quiet_NaN();
    bool condition_approximate = false;
    double size_ratio = 0.0; ///< A_max/A_min or h_max/h_min
    double max_angle_tri = 0.0;
    double max_angle_quad = 0.0;
    double mean = 0.0; ///< int u_h ds (final state for transport)
    int relocation_sweeps = 0;
    bool relocation_converged = true;
    double seconds = 0.0;
    std::string failure; ///< empty on success
};

/// log(e0/e1) / log(h0/h1)
double observed_rate(double e0, double e1, double h0, double h1);

/// Full pipeline per (h, p). Failures are recorded in the row and the sweep
/// continues. Rows are ordered by order, then h.
std::vector<ConvergeRow> run_converge(const ConvergeConfig& config);

void write_converge_csv(std::ostream& out, std::span<const ConvergeRow> rows, bool timing = true);

} // namespace mfforge
