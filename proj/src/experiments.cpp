#include "fracext/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fracext {

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        double x = std::stod(item, &pos);
        out.push_back(x);
    }
    if (out.empty()) throw std::invalid_argument("config: empty list value");
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

TailPolicy tail_of(const ExperimentConfig& c) {
    return c.tail == "none" ? TailPolicy::None : TailPolicy::Analytic;
}

struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;
    void add(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }
    void write(const std::string& path) const {
        std::ofstream os(path);
        for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
    }
};

std::string list_to_string(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out;
}

Manifest manifest_of(const ExperimentConfig& c, const char* kind) {
    Manifest m;
    m.add("version", kVersion);
    m.add("kind", kind);
    m.add("geometry", c.geometry);
    m.add("s", list_to_string(c.s_values));
    m.add("n", list_to_string(c.n_values));
    m.add("xi", list_to_string(c.xi_values));
    m.add("kappa", c.kappa);
    m.add("noise_seed", std::to_string(c.noise_seed));
    m.add("noise_std", format_double(c.noise_std));
    m.add("refinements", std::to_string(c.refinements));
    m.add("target_h", format_double(c.target_h));
    m.add("target_dofs", std::to_string(c.target_dofs));
    m.add("workers", std::to_string(c.workers));
    m.add("tail", c.tail);
    m.add("solve_tol", format_double(c.solve_tol));
    m.add("max_iterations", std::to_string(c.max_iterations));
    m.add("opt_tol", format_double(c.opt_tol));
    m.add("bounds", c.bounds);
    return m;
}

void write_rates_csv(const std::string& path, const RateReport& report) {
    std::ofstream os(path);
    os << "param,error\n";
    for (const auto& [p, e] : report.rows) os << format_double(p) << "," << format_double(e) << "\n";
}

double mass_norm(const SparseMat& M, const Eigen::VectorXd& v) {
    return std::sqrt(std::max(0.0, v.dot(M * v)));
}

AssemblyOptions assembly_options(const ExperimentConfig& c) {
    AssemblyOptions o;
    o.workers = c.workers;
    return o;
}

std::string tag_of(double v) {
    std::ostringstream ss;
    ss << v;
    std::string s = ss.str();
    for (char& ch : s)
        if (ch == '+') ch = 'p';
    return s;
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

void ExperimentConfig::validate() const {
    for (double s : s_values)
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("config: s must lie in (0,1)");
    for (double n : n_values)
        if (!(n >= 1.0)) throw std::invalid_argument("config: n must be >= 1");
    for (double xi : xi_values)
        if (!(xi >= 0.0)) throw std::invalid_argument("config: xi must be nonnegative");
    if (refinements < 0) throw std::invalid_argument("config: refinements must be nonnegative");
    if (target_h < 0.0) throw std::invalid_argument("config: target_h must be nonnegative");
    if (target_dofs <= 0 && target_h <= 0.0)
        throw std::invalid_argument("config: need target_dofs or target_h");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (tail != "analytic" && tail != "none") throw std::invalid_argument("config: tail must be analytic|none");
    if (kappa != "exterior" && kappa != "control")
        throw std::invalid_argument("config: kappa must be exterior|control");
    if (bounds != "nonneg" && bounds != "free")
        throw std::invalid_argument("config: bounds must be nonneg|free");
    if (geometry != "interval" && geometry != "disk" && geometry != "square_in_disk" && geometry != "mshape")
        throw std::invalid_argument("config: unknown geometry '" + geometry + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value, got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key == "kind") {
            if (val == "rate_vs_n") c.kind = ExperimentConfig::Kind::RateVsN;
            else if (val == "rate_vs_dofs") c.kind = ExperimentConfig::Kind::RateVsDofs;
            else if (val == "source_id") c.kind = ExperimentConfig::Kind::SourceId;
            else if (val == "dirichlet_control") c.kind = ExperimentConfig::Kind::DirichletControl;
            else throw std::invalid_argument("config: unknown kind '" + val + "'");
        } else if (key == "geometry") c.geometry = val;
        else if (key == "s") c.s_values = parse_list(val);
        else if (key == "n") c.n_values = parse_list(val);
        else if (key == "xi") c.xi_values = parse_list(val);
        else if (key == "kappa") c.kappa = val;
        else if (key == "noise_seed") c.noise_seed = std::stoull(val);
        else if (key == "noise_std") c.noise_std = std::stod(val);
        else if (key == "refinements") c.refinements = std::stoi(val);
        else if (key == "target_h") c.target_h = std::stod(val);
        else if (key == "target_dofs") c.target_dofs = std::stoi(val);
        else if (key == "outdir") c.outdir = val;
        else if (key == "workers") c.workers = std::stoi(val);
        else if (key == "tail") c.tail = val;
        else if (key == "solve_tol") c.solve_tol = std::stod(val);
        else if (key == "max_iterations") c.max_iterations = std::stoi(val);
        else if (key == "opt_tol") c.opt_tol = std::stod(val);
        else if (key == "bounds") c.bounds = val;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

RateReport fit_rate(const std::vector<std::pair<double, double>>& rows) {
    if (rows.size() < 3) throw std::invalid_argument("rate fit requires at least 3 rows");
    RateReport r;
    r.rows = rows;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const int n = static_cast<int>(rows.size());
    for (const auto& [p, e] : rows) {
        if (!(p > 0.0) || !(e > 0.0)) throw std::invalid_argument("rate fit requires positive data");
        double x = std::log(p), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double denom = n * sxx - sx * sx;
    r.slope = (n * sxy - sx * sy) / denom;
    double ss_tot = syy - sy * sy / n;
    double intercept = (sy - r.slope * sx) / n;
    double ss_res = 0.0;
    for (const auto& [p, e] : rows) {
        double d = std::log(e) - (intercept + r.slope * std::log(p));
        ss_res += d * d;
    }
    r.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return r;
}

GeometrySpec resolve_geometry(const ExperimentConfig& config) {
    const bool control_kind = config.kind == ExperimentConfig::Kind::SourceId ||
                              config.kind == ExperimentConfig::Kind::DirichletControl ||
                              config.kappa == "control";
    if (config.geometry == "interval") {
        IntervalInInterval g;
        if (control_kind) g.control = std::make_pair(0.7, 1.1);
        return GeometrySpec::make_interval(g);
    }
    if (config.geometry == "disk") {
        DiskInDisk g;
        if (control_kind) g.control_annulus = std::make_pair(0.8, 1.1);
        return GeometrySpec::make_disk(g);
    }
    if (config.geometry == "square_in_disk") {
        SquareInDisk g;
        return GeometrySpec::make_square_in_disk(g);
    }
    MShapeInDisk g;
    return GeometrySpec::make_mshape(g);
}

std::vector<double> gaussian_samples(unsigned long long seed, int count, double stddev) {
    std::mt19937_64 rng(seed);
    auto uniform = [&]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    std::vector<double> out(count);
    for (int i = 0; i < count; i += 2) {
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = stddev * r * std::cos(2.0 * M_PI * u2);
        if (i + 1 < count) out[i + 1] = stddev * r * std::sin(2.0 * M_PI * u2);
    }
    return out;
}

RateReport run_rate_vs_n(const ExperimentConfig& config) {
    config.validate();
    if (config.n_values.size() < 3)
        throw std::invalid_argument("rate_vs_n: need at least 3 penalty values");
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(config.outdir);

    GeometrySpec geom = resolve_geometry(config);
    double h = config.target_h > 0 ? config.target_h : pick_h_for_dofs(geom, config.target_dofs);
    Mesh mesh = generate(geom, h);
    FractionalOrder order(config.s_values.front(), mesh.dim);

    SparseMat A = assemble_stiffness(mesh, order, tail_of(config), assembly_options(config));
    CoefficientField kappa = CoefficientField::indicator(
        mesh, config.kappa == "exterior" ? CoefficientField::Support::ExteriorAll
                                         : CoefficientField::Support::ControlOnly);
    SparseMat M = assemble_exterior_mass(mesh, kappa);
    SparseMat Mfull = assemble_full_mass(mesh);

    Eigen::VectorXd z(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) z[i] = benchmark_datum(order, mesh.node(i));
    Eigen::VectorXd b_f = assemble_interior_load(mesh, benchmark_rhs);

    PenalizedSolveInputs inputs;
    inputs.prebuilt_A = &A;
    Eigen::VectorXd u_D = solve_dirichlet_eliminated(mesh, order, benchmark_rhs, z, config.solve_tol, inputs);

    RateReport vs_exact;
    std::vector<std::pair<double, double>> rows;
    for (double n : config.n_values) {
        RobinSystem sys{A, M, n, b_f + n * (M * z)};
        auto [u, report] = solve_robin(sys, config.solve_tol);
        (void)report;
        rows.emplace_back(n, mass_norm(Mfull, u - u_D));
        vs_exact.rows.emplace_back(
            n, l2_error(mesh, Region::Interior, u,
                        [&](const Eigen::Vector2d& x) { return benchmark_exact(order, x); }));
    }
    RateReport report = fit_rate(rows);
    write_rates_csv(config.outdir + "/rates.csv", report);
    write_rates_csv(config.outdir + "/rates_vs_exact.csv", vs_exact);

    Manifest m = manifest_of(config, "rate_vs_n");
    m.add("dofs", std::to_string(mesh.num_nodes()));
    m.add("slope", format_double(report.slope));
    m.add("wall_seconds", format_double(wall_since(t0)));
    m.write(config.outdir + "/manifest.txt");
    return report;
}

std::vector<RateCurve> run_rate_vs_dofs(const ExperimentConfig& config) {
    config.validate();
    if (config.refinements < 2)
        throw std::invalid_argument("rate_vs_dofs: need at least 2 refinements (3 data rows)");
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(config.outdir);

    GeometrySpec geom = resolve_geometry(config);
    int base_target = std::max(8, static_cast<int>(config.target_dofs /
                                                   std::pow(config.geometry == "interval" ? 2.0 : 4.0,
                                                            config.refinements)));
    double h = config.target_h > 0 ? config.target_h : pick_h_for_dofs(geom, base_target);

    std::vector<Mesh> meshes;
    meshes.push_back(generate(geom, h));
    for (int r = 0; r < config.refinements; ++r) meshes.push_back(refine(meshes.back()));

    std::vector<RateCurve> curves;
    for (double s : config.s_values) {
        std::vector<std::vector<std::pair<double, double>>> rows_per_n(config.n_values.size());
        for (const Mesh& mesh : meshes) {
            FractionalOrder order(s, mesh.dim);
            SparseMat A = assemble_stiffness(mesh, order, tail_of(config), assembly_options(config));
            CoefficientField kappa = CoefficientField::indicator(
                mesh, config.kappa == "exterior" ? CoefficientField::Support::ExteriorAll
                                                 : CoefficientField::Support::ControlOnly);
            SparseMat M = assemble_exterior_mass(mesh, kappa);
            Eigen::VectorXd z(mesh.num_nodes());
            for (int i = 0; i < mesh.num_nodes(); ++i) z[i] = benchmark_datum(order, mesh.node(i));
            Eigen::VectorXd b_f = assemble_interior_load(mesh, benchmark_rhs);
            for (size_t k = 0; k < config.n_values.size(); ++k) {
                double n = config.n_values[k];
                RobinSystem sys{A, M, n, b_f + n * (M * z)};
                auto [u, rep] = solve_robin(sys, config.solve_tol);
                (void)rep;
                double err = l2_error(mesh, Region::Interior, u, [&](const Eigen::Vector2d& x) {
                    return benchmark_exact(order, x);
                });
                rows_per_n[k].emplace_back(static_cast<double>(mesh.num_nodes()), err);
            }
        }
        for (size_t k = 0; k < config.n_values.size(); ++k) {
            RateCurve curve;
            curve.s = s;
            curve.n = config.n_values[k];
            curve.report = fit_rate(rows_per_n[k]);
            write_rates_csv(config.outdir + "/rates_s" + tag_of(s) + "_n" + tag_of(curve.n) + ".csv",
                            curve.report);
            curves.push_back(std::move(curve));
        }
    }
    if (curves.size() == 1) write_rates_csv(config.outdir + "/rates.csv", curves.front().report);

    Manifest m = manifest_of(config, "rate_vs_dofs");
    for (const auto& c : curves)
        m.add("slope_s" + tag_of(c.s) + "_n" + tag_of(c.n), format_double(c.report.slope));
    m.add("wall_seconds", format_double(wall_since(t0)));
    m.write(config.outdir + "/manifest.txt");
    return curves;
}

namespace {

ControlProblem make_control_problem(const Mesh& mesh, const ExperimentConfig& config, double s,
                                    double xi, const Eigen::VectorXd& u_d) {
    ControlProblem p;
    p.mesh = &mesh;
    p.order = FractionalOrder(s, mesh.dim);
    p.n = config.n_values.front();
    p.kappa = CoefficientField::indicator(mesh, CoefficientField::Support::ControlOnly);
    p.xi = xi;
    p.u_d = u_d;
    p.variant = ControlVariant::DirichletViaRobin;
    p.tail = tail_of(config);
    p.assembly = assembly_options(config);
    p.solve_tol = config.solve_tol;
    DofPartition part = partition_dofs(mesh);
    int m = static_cast<int>(part.control_dofs.size());
    p.bounds = config.bounds == "free" ? ControlBounds::box_free(m) : ControlBounds::nonnegative(m);
    return p;
}

} // namespace

std::vector<SourceIdRow> run_source_identification(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(config.outdir);

    GeometrySpec geom = resolve_geometry(config);
    double h = config.target_h > 0 ? config.target_h : pick_h_for_dofs(geom, config.target_dofs);
    Mesh mesh = generate(geom, h);
    DofPartition part = partition_dofs(mesh);

    std::vector<SourceIdRow> rows;
    std::ofstream csv(config.outdir + "/controls.csv");
    csv << "s,xi,control_norm,tracking_error,iterations,status\n";

    for (size_t si = 0; si < config.s_values.size(); ++si) {
        double s = config.s_values[si];
        // synthesize observations from the unit source, then add noise on the
        // observation domain
        Eigen::VectorXd u_d = Eigen::VectorXd::Zero(mesh.num_nodes());
        ControlProblem synth = make_control_problem(mesh, config, s, 0.0, u_d);
        ReducedProblem reduced_synth(synth);
        Eigen::VectorXd z_true = Eigen::VectorXd::Ones(reduced_synth.num_controls());
        Eigen::VectorXd u_true = reduced_synth.state(z_true);
        std::vector<double> noise =
            gaussian_samples(config.noise_seed + si, static_cast<int>(part.interior_dofs.size()),
                             config.noise_std);
        u_d = u_true;
        for (size_t k = 0; k < part.interior_dofs.size(); ++k) u_d[part.interior_dofs[k]] += noise[k];

        for (double xi : config.xi_values) {
            ControlProblem prob = make_control_problem(mesh, config, s, xi, u_d);
            ReducedProblem reduced(prob);
            OptimizeOptions opts;
            opts.tol = config.opt_tol;
            opts.max_iterations = config.max_iterations;
            OptimizeResult res = optimize(reduced, Eigen::VectorXd::Zero(reduced.num_controls()), opts);
            SourceIdRow row;
            row.s = s;
            row.xi = xi;
            row.control_norm = reduced.control_norm(res.z);
            // tracking against the (noisy) observations
            {
                Eigen::VectorXd diff = res.u - u_d;
                SparseMat Mo = assemble_region_mass(mesh, Region::Interior);
                row.tracking_error = mass_norm(Mo, diff);
            }
            row.iterations = static_cast<int>(res.history.size()) - 1;
            row.status = res.status;
            rows.push_back(row);
            csv << format_double(s) << "," << format_double(xi) << ","
                << format_double(row.control_norm) << "," << format_double(row.tracking_error) << ","
                << row.iterations << "," << static_cast<int>(row.status) << "\n";
            write_field_file(config.outdir + "/control_s" + tag_of(s) + "_xi" + tag_of(xi) + ".field",
                             mesh, reduced.extend(res.z));
            write_field_file(config.outdir + "/state_s" + tag_of(s) + "_xi" + tag_of(xi) + ".field",
                             mesh, res.u);
        }
    }
    Manifest m = manifest_of(config, "source_id");
    m.add("dofs", std::to_string(mesh.num_nodes()));
    m.add("wall_seconds", format_double(wall_since(t0)));
    m.write(config.outdir + "/manifest.txt");
    return rows;
}

std::vector<ControlExampleRow> run_dirichlet_control(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(config.outdir);

    GeometrySpec geom = resolve_geometry(config);
    double h = config.target_h > 0 ? config.target_h : pick_h_for_dofs(geom, config.target_dofs);
    Mesh mesh = generate(geom, h);

    Eigen::VectorXd u_d = Eigen::VectorXd::Ones(mesh.num_nodes());
    auto one = [](const Eigen::Vector2d&) { return 1.0; };

    std::vector<ControlExampleRow> rows;
    std::ofstream csv(config.outdir + "/controls.csv");
    csv << "s,tracking_error,baseline_error,control_norm,iterations\n";
    for (double s : config.s_values) {
        ControlProblem prob = make_control_problem(mesh, config, s, config.xi_values.front(), u_d);
        ReducedProblem reduced(prob);
        OptimizeOptions opts;
        opts.tol = config.opt_tol;
        opts.max_iterations = config.max_iterations;
        OptimizeResult res = optimize(reduced, Eigen::VectorXd::Zero(reduced.num_controls()), opts);

        ControlExampleRow row;
        row.s = s;
        row.tracking_error = l2_error(mesh, Region::Interior, res.u, one);
        Eigen::VectorXd u0 = reduced.state(Eigen::VectorXd::Zero(reduced.num_controls()));
        row.baseline_error = l2_error(mesh, Region::Interior, u0, one);
        row.control_norm = reduced.control_norm(res.z);
        row.iterations = static_cast<int>(res.history.size()) - 1;
        rows.push_back(row);
        csv << format_double(s) << "," << format_double(row.tracking_error) << ","
            << format_double(row.baseline_error) << "," << format_double(row.control_norm) << ","
            << row.iterations << "\n";
        write_field_file(config.outdir + "/control_s" + tag_of(s) + ".field", mesh, reduced.extend(res.z));
        write_field_file(config.outdir + "/state_s" + tag_of(s) + ".field", mesh, res.u);
        write_field_file(config.outdir + "/adjoint_s" + tag_of(s) + ".field", mesh, res.p);
    }
    Manifest m = manifest_of(config, "dirichlet_control");
    m.add("dofs", std::to_string(mesh.num_nodes()));
    m.add("wall_seconds", format_double(wall_since(t0)));
    m.write(config.outdir + "/manifest.txt");
    return rows;
}

bool check_config(const ExperimentConfig& config, std::vector<std::string>& messages) {
    bool ok = true;
    auto note = [&](bool pass, const std::string& text) {
        messages.push_back(std::string(pass ? "[pass] " : "[FAIL] ") + text);
        ok = ok && pass;
    };
    switch (config.kind) {
        case ExperimentConfig::Kind::RateVsN: {
            RateReport r = run_rate_vs_n(config);
            note(r.slope >= -1.15 && r.slope <= -0.85,
                 "penalization-rate slope " + format_double(r.slope) + " within [-1.15, -0.85]");
            break;
        }
        case ExperimentConfig::Kind::RateVsDofs: {
            std::vector<RateCurve> curves = run_rate_vs_dofs(config);
            for (const auto& c : curves)
                note(c.report.slope >= -0.65 && c.report.slope <= -0.35,
                     "mesh-rate slope " + format_double(c.report.slope) + " (s=" + tag_of(c.s) +
                         ", n=" + tag_of(c.n) + ") within [-0.65, -0.35]");
            // n-stability between extreme penalty values at equal s
            for (double s : config.s_values) {
                std::vector<const RateCurve*> same;
                for (const auto& c : curves)
                    if (c.s == s) same.push_back(&c);
                if (same.size() < 2) continue;
                const RateCurve* lo = same.front();
                const RateCurve* hi = same.back();
                double worst = 0.0;
                for (size_t k = 0; k < lo->report.rows.size(); ++k) {
                    double a = lo->report.rows[k].second, b = hi->report.rows[k].second;
                    worst = std::max(worst, std::abs(a - b) / std::max(a, b));
                }
                note(worst < 0.20, "error curves stable in n at s=" + tag_of(s) +
                                       " (max relative spread " + format_double(worst) + " < 0.20)");
            }
            break;
        }
        case ExperimentConfig::Kind::SourceId: {
            std::vector<SourceIdRow> rows = run_source_identification(config);
            for (double s : config.s_values) {
                // monotone growth of the recovered control as xi decreases
                std::vector<const SourceIdRow*> per;
                for (const auto& r : rows)
                    if (r.s == s) per.push_back(&r);
                if (per.size() >= 2) {
                    std::sort(per.begin(), per.end(),
                              [](const SourceIdRow* a, const SourceIdRow* b) { return a->xi > b->xi; });
                    bool mono = true;
                    for (size_t k = 0; k + 1 < per.size(); ++k)
                        if (per[k + 1]->control_norm < per[k]->control_norm * (1.0 - 1e-6)) mono = false;
                    note(mono, "control magnitude nondecreasing as xi decreases (s=" + tag_of(s) + ")");
                    const SourceIdRow* at8 = nullptr;
                    const SourceIdRow* at10 = nullptr;
                    for (const auto* r : per) {
                        if (std::abs(r->xi - 1e-8) < 1e-12) at8 = r;
                        if (std::abs(r->xi - 1e-10) < 1e-14) at10 = r;
                    }
                    if (at8 && at10)
                        note(at10->control_norm - at8->control_norm <= 0.10 * std::max(at8->control_norm, 1e-300),
                             "saturation by xi = 1e-8 (s=" + tag_of(s) + ")");
                }
            }
            const SourceIdRow* lo_s = nullptr;
            const SourceIdRow* hi_s = nullptr;
            for (const auto& r : rows) {
                if (std::abs(r.s - 0.1) < 1e-12) lo_s = &r;
                if (std::abs(r.s - 0.9) < 1e-12) hi_s = &r;
            }
            if (lo_s && hi_s)
                note(hi_s->control_norm <= 0.05 * lo_s->control_norm,
                     "recovered control at s=0.9 at most 5% of s=0.1");
            break;
        }
        case ExperimentConfig::Kind::DirichletControl: {
            std::vector<ControlExampleRow> rows = run_dirichlet_control(config);
            for (const auto& r : rows)
                note(r.tracking_error < r.baseline_error,
                     "tracking below the uncontrolled baseline at s=" + tag_of(r.s));
            if (rows.size() >= 2) {
                const auto lo = std::min_element(rows.begin(), rows.end(),
                                                 [](const auto& a, const auto& b) { return a.s < b.s; });
                const auto hi = std::max_element(rows.begin(), rows.end(),
                                                 [](const auto& a, const auto& b) { return a.s < b.s; });
                note(lo->tracking_error < hi->tracking_error,
                     "tracking at s=" + tag_of(lo->s) + " better than at s=" + tag_of(hi->s));
            }
            break;
        }
    }
    return ok;
}

void run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentConfig::Kind::RateVsN: run_rate_vs_n(config); break;
        case ExperimentConfig::Kind::RateVsDofs: run_rate_vs_dofs(config); break;
        case ExperimentConfig::Kind::SourceId: run_source_identification(config); break;
        case ExperimentConfig::Kind::DirichletControl: run_dirichlet_control(config); break;
    }
}

} // namespace fracext
