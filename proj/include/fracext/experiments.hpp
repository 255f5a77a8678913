#pragma once

#include "fracext/control.hpp"
#include "fracext/exact.hpp"
#include "fracext/io.hpp"
#include "fracext/solver.hpp"

#include <string>
#include <vector>

namespace fracext {

inline constexpr const char* kVersion = "0.1.0";

/// Flat key=value experiment configuration (comma-separated lists).
struct ExperimentConfig {
    enum class Kind { RateVsN, RateVsDofs, SourceId, DirichletControl };
    Kind kind = Kind::RateVsN;
    std::string geometry = "interval";  // interval | disk | square_in_disk | mshape
    std::vector<double> s_values = {0.5};
    std::vector<double> n_values = {1e1, 1e2, 1e3, 1e4, 1e5};
    std::vector<double> xi_values = {1e-8};
    std::string kappa = "exterior";  // exterior | control
    unsigned long long noise_seed = 1;
    double noise_std = 0.02;
    int refinements = 3;
    double target_h = 0.0;  // when 0, derived from target_dofs
    int target_dofs = 500;
    std::string outdir = "out";
    int workers = 2;
    std::string tail = "analytic";  // analytic | none
    double solve_tol = 1e-10;
    int max_iterations = 500;
    double opt_tol = 1e-8;
    std::string bounds = "nonneg";  // nonneg | free

    void validate() const;  // throws on out-of-domain parameters
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct RateReport {
    std::vector<std::pair<double, double>> rows;  // (parameter, error)
    double slope = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (log param, log error); requires >= 3 rows.
RateReport fit_rate(const std::vector<std::pair<double, double>>& rows);

struct RateCurve {
    double s = 0.5;
    double n = 1e5;
    RateReport report;
};

struct SourceIdRow {
    double s, xi;
    double control_norm;
    double tracking_error;
    int iterations;
    OptimizeStatus status;
};

struct ControlExampleRow {
    double s;
    double tracking_error;
    double baseline_error;  // uncontrolled (z = 0)
    double control_norm;
    int iterations;
};

RateReport run_rate_vs_n(const ExperimentConfig& config);
std::vector<RateCurve> run_rate_vs_dofs(const ExperimentConfig& config);
std::vector<SourceIdRow> run_source_identification(const ExperimentConfig& config);
std::vector<ControlExampleRow> run_dirichlet_control(const ExperimentConfig& config);

/// Regression gate: runs the experiment and evaluates its thresholds.
/// Appends one human-readable line per checked property.
bool check_config(const ExperimentConfig& config, std::vector<std::string>& messages);

/// Resolves the configured geometry, adding a control region for the
/// control-problem experiment kinds.
GeometrySpec resolve_geometry(const ExperimentConfig& config);

/// Deterministic standard normal samples (Box-Muller over a seeded mt19937_64).
std::vector<double> gaussian_samples(unsigned long long seed, int count, double stddev);

void run_experiment(const ExperimentConfig& config);  // dispatch + artifact files

} // namespace fracext
