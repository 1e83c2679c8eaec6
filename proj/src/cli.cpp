// cli.cpp — command-line front end (argument parsing and run dispatch)
#include "ptwalk/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptwalk/bloch.hpp"
#include "ptwalk/io.hpp"
#include "ptwalk/observables.hpp"
#include "ptwalk/propagate.hpp"
#include "ptwalk/sweep.hpp"

namespace ptwalk {

namespace {

constexpr double kPi = std::numbers::pi;

struct OutputOpts {
    std::string out;            // empty -> stdout
    std::string format = "csv";
    std::string summary;        // optional JSON digest path
    bool strict = false;
};

void add_output_opts(CLI::App* cmd, OutputOpts& o) {
    cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
    cmd->add_option("--format", o.format, "Table format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--summary", o.summary, "Write a JSON run digest to this file");
    cmd->add_flag("--strict", o.strict, "Exit 3 if any result failed to converge");
}

std::string table_json(const SweepTable& t) {
    nlohmann::json j;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [key, value] : t.config) cfg[key] = value;
    j["config"] = cfg;
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& r : t.rows) {
        nlohmann::json row{{"v_a", r.va},       {"v_b", r.vb},
                           {"gamma", r.gamma},  {"theta", r.theta},
                           {"phi", r.phi},      {"eta", r.eta},
                           {"mean_disp", r.mean_disp},
                           {"converged", r.converged},
                           {"phase", std::string(phase_name(r.phase)) + (r.on_boundary ? "*" : "")},
                           {"flag", r.flag}};
        row["tail"] = std::isfinite(r.tail) ? nlohmann::json(r.tail)
                                            : nlohmann::json(format_g17(r.tail));
        for (std::size_t c = 0; c < t.extra_columns.size() && c < r.extras.size(); ++c) {
            const double e = r.extras[c];
            row[t.extra_columns[c]] =
                std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(format_g17(e));
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

// Summary lines go to stderr when the table itself occupies stdout.
std::ostream& note_stream(const OutputOpts& o) {
    return o.out.empty() ? std::cerr : std::cout;
}

int finish_table(const SweepTable& t, const OutputOpts& o, double wall,
                 const std::string& label) {
    std::string text;
    if (o.format == "csv") {
        std::ostringstream ss;
        write_csv(ss, t);
        text = ss.str();
    } else {
        text = table_json(t);
    }
    write_text(o.out, text);
    if (!o.summary.empty()) write_text(o.summary, summary_json(t, wall) + "\n");
    std::size_t bad = 0;
    for (const SweepRow& r : t.rows)
        if (r.flag != "ok") ++bad;
    note_stream(o) << label << ": " << t.rows.size() << " rows, " << bad
                   << " flagged, " << format_g17(wall) << " s\n";
    if (o.strict && bad > 0) return 3;
    return 0;
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- single-spec options shared by spectrum / phase / evolve / meandisp -----

struct SpecOpts {
    double va = 0.25;
    double vb = 0.75;
    double gamma = 0.5;
    int n_dimers = 41;
    std::string boundary = "open";
};

void add_spec_opts(CLI::App* cmd, SpecOpts& s, bool with_lattice) {
    cmd->add_option("--va", s.va, "Intra-dimer coupling")->capture_default_str();
    cmd->add_option("--vb", s.vb, "Inter-dimer coupling")->capture_default_str();
    cmd->add_option("--gamma", s.gamma, "Gain/loss strength")->capture_default_str();
    if (with_lattice) {
        cmd->add_option("--n", s.n_dimers, "Number of dimers (odd)")->capture_default_str();
        cmd->add_option("--boundary", s.boundary, "open or periodic")
            ->check(CLI::IsMember({"open", "periodic"}))
            ->capture_default_str();
    }
}

LatticeSpec to_spec(const SpecOpts& s) {
    LatticeSpec spec;
    spec.va = s.va;
    spec.vb = s.vb;
    spec.gamma = s.gamma;
    spec.n_dimers = s.n_dimers;
    spec.boundary = s.boundary == "periodic" ? Boundary::Periodic : Boundary::Open;
    spec.validate();
    return spec;
}

struct StepOpts {
    double dt = 0.0;
    double t_max = 0.0;
    int stride = 1;
    double rel_tol = 1e-6;
    double cap = 1e12;
    long budget = 10'000'000;
};

void add_step_opts(CLI::App* cmd, StepOpts& s, bool nonlinear) {
    cmd->add_option("--dt", s.dt, "Sample spacing (0 = 0.02/(va+vb+gamma))");
    cmd->add_option("--tmax", s.t_max, "Integration horizon (0 = decay-based)");
    cmd->add_option("--stride", s.stride, "Record every stride-th sample");
    if (nonlinear) {
        cmd->add_option("--rel-tol", s.rel_tol, "Adaptive step error target")
            ->capture_default_str();
        cmd->add_option("--cap", s.cap, "Intensity abort threshold")->capture_default_str();
        cmd->add_option("--budget", s.budget, "Accepted-step budget")->capture_default_str();
    }
}

StepControl to_ctrl(const StepOpts& s) {
    StepControl c;
    c.dt = s.dt;
    c.t_max = s.t_max;
    c.sample_stride = s.stride;
    c.rel_tol = s.rel_tol;
    c.intensity_cap = s.cap;
    c.max_steps = s.budget;
    c.validate();
    return c;
}

std::vector<std::pair<std::string, std::string>> spec_config(const LatticeSpec& spec) {
    return {{"v_a", format_g17(spec.va)},
            {"v_b", format_g17(spec.vb)},
            {"gamma", format_g17(spec.gamma)},
            {"n_dimers", std::to_string(spec.n_dimers)},
            {"boundary", spec.boundary == Boundary::Open ? "open" : "periodic"}};
}

// --- subcommand bodies ------------------------------------------------------

int cmd_spectrum(const SpecOpts& so, int n_k, const OutputOpts& oo) {
    const LatticeSpec spec = to_spec(so);
    if (n_k < 2) throw CLI::ValidationError("--nk", "needs at least 2 points");
    std::ostringstream ss;
    for (const auto& [key, value] : spec_config(spec)) ss << "# " << key << "=" << value << "\n";
    ss << "k,lambda_plus_re,lambda_plus_im,lambda_minus_re,lambda_minus_im\n";
    for (int j = 0; j < n_k; ++j) {
        const double k = 2.0 * kPi * j / n_k;
        const BandPair bands = band_eigenvalues(spec, k);
        ss << format_g17(k) << ',' << format_g17(bands.plus.real()) << ','
           << format_g17(bands.plus.imag()) << ',' << format_g17(bands.minus.real()) << ','
           << format_g17(bands.minus.imag()) << '\n';
    }
    write_text(oo.out, ss.str());
    const PhasePoint p = classify_phase(spec);
    note_stream(oo) << "spectrum: " << n_k << " k-points, phase=" << phase_name(p.phase)
                    << (p.on_boundary ? "*" : "") << ", pt_threshold="
                    << format_g17(pt_threshold(spec)) << "\n";
    return 0;
}

int cmd_phase(const SpecOpts& so) {
    const LatticeSpec spec = to_spec(so);
    const PhasePoint p = classify_phase(spec);
    std::cout << "phase=" << phase_name(p.phase) << (p.on_boundary ? "*" : "")
              << " pt_threshold=" << format_g17(pt_threshold(spec))
              << " full_breaking=" << format_g17(full_breaking_scale(spec)) << "\n";
    return 0;
}

int cmd_evolve(const SpecOpts& so, double theta, double phi, int cell,
               const std::string& model, double eta, const StepOpts& po,
               const OutputOpts& oo) {
    const LatticeSpec spec = to_spec(so);
    const BlochState bloch = bloch_state(theta, phi);
    const WaveFunction psi0 = localized_state(spec, cell, bloch);
    const StepControl ctrl = to_ctrl(po);
    WaveTrajectory traj;
    if (model == "pt")
        traj = evolve_pt(spec, psi0, ctrl);
    else if (model == "lossy")
        traj = evolve_lossy(spec, psi0, ctrl);
    else
        traj = evolve_nonlinear(spec, eta, psi0, ctrl);

    std::ostringstream ss;
    auto config = spec_config(spec);
    config.push_back({"model", model});
    config.push_back({"theta", format_g17(bloch.theta)});
    config.push_back({"phi", format_g17(bloch.phi)});
    config.push_back({"cell", std::to_string(cell)});
    if (model == "nonlinear") config.push_back({"eta", format_g17(eta)});
    for (const auto& [key, value] : config) ss << "# " << key << "=" << value << "\n";
    ss << "t,cell,sublattice,intensity\n";
    for (const IntensitySample& s : intensity_map(traj)) {
        ss << format_g17(s.t) << ',' << s.cell << ','
           << (s.s == Sublattice::A ? 'A' : 'B') << ',' << format_g17(s.intensity) << '\n';
    }
    write_text(oo.out, ss.str());
    note_stream(oo) << "evolve: " << traj.samples.size() << " samples, flag="
                    << flag_name(traj.flag) << ", steps=" << traj.accepted_steps << "\n";
    return oo.strict && traj.flag != TrajectoryFlag::Ok ? 3 : 0;
}

int cmd_meandisp(const SpecOpts& so, double theta, double phi, const std::string& route,
                 const std::string& model, int n_k, double tol, const StepOpts& po,
                 const OutputOpts& oo) {
    const LatticeSpec spec = to_spec(so);
    const BlochState bloch = bloch_state(theta, phi);

    SweepTable table;
    table.config = spec_config(spec);
    table.config.push_back({"route", route});
    table.config.push_back({"theta", format_g17(bloch.theta)});
    table.config.push_back({"phi", format_g17(bloch.phi)});
    table.config.push_back({"tol", format_g17(tol)});

    SweepRow row;
    row.va = spec.va;
    row.vb = spec.vb;
    row.gamma = spec.gamma;
    row.theta = bloch.theta;
    row.phi = bloch.phi;
    const PhasePoint p = classify_phase(spec);
    row.phase = p.phase;
    row.on_boundary = p.on_boundary;

    double analytic = std::numeric_limits<double>::quiet_NaN();
    try {
        analytic = analytic_mean_disp(spec, bloch);
    } catch (const std::exception&) {
    }

    if (route == "analytic") {
        if (std::isnan(analytic))
            throw std::domain_error("closed form undefined here (va = vb branch point)");
        row.mean_disp = analytic;
        row.tail = 0.0;
        row.converged = true;
        table.extra_columns = {};
    } else if (route == "kspace") {
        QuadratureControl qc;
        qc.dt = po.dt;
        qc.tol = tol;
        if (po.t_max > 0.0) qc.t_cap = po.t_max;
        const MeanDispResult res = kspace_mean_disp(spec, bloch, n_k, qc);
        row.mean_disp = res.value;
        row.tail = res.tail_estimate;
        row.converged = res.converged;
        if (!res.converged) row.flag = "non-converged";
        table.extra_columns = {"analytic", "imag_residue"};
        row.extras = {analytic, res.imag_residue};
    } else {
        const WaveFunction psi0 = localized_state(spec, 0, bloch);
        const StepControl ctrl = to_ctrl(po);
        const WaveTrajectory traj =
            model == "pt" ? evolve_pt(spec, psi0, ctrl) : evolve_lossy(spec, psi0, ctrl);
        const MeanDispResult res = mean_displacement(traj, tol);
        row.mean_disp = res.value;
        row.tail = res.tail_estimate;
        row.converged = res.converged;
        if (traj.flag != TrajectoryFlag::Ok)
            row.flag = flag_name(traj.flag);
        else if (!res.converged)
            row.flag = "non-converged";
        table.extra_columns = {"analytic"};
        row.extras = {analytic};
    }
    table.rows.push_back(row);

    const auto t0 = std::chrono::steady_clock::now();
    const int rc = finish_table(table, oo, wall_since(t0), "meandisp");
    note_stream(oo) << "mean_disp=" << format_g17(row.mean_disp)
                    << " tail=" << format_g17(row.tail) << " converged=" << row.converged
                    << "\n";
    return rc;
}

int cmd_fit_mass(std::vector<double> vas, int n_dimers, double tol, int jobs,
                 const OutputOpts& oo) {
    if (vas.empty()) vas = {0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9};
    SweepOptions opt;
    opt.n_dimers = n_dimers;
    opt.tol = tol;
    opt.jobs = jobs;

    const std::vector<double> gammas = {0.25, 0.4, 0.6};
    const std::vector<double> phis = {kPi / 2.0, -kPi / 2.0, kPi / 3.0};
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<MassFitSample> samples;
    std::size_t bad = 0;
    for (const double x : vas) {
        if (!(x > 0.0 && x < 1.0))
            throw std::invalid_argument("fit-mass needs va/(va+vb) strictly inside (0, 1)");
        for (const double g : gammas) {
            const LatticeSpec spec = spec_from_ratios(x, g, n_dimers);
            const BlochState base_state = bloch_state(kPi / 2.0, 0.0);
            const WaveTrajectory base_traj =
                evolve_lossy(spec, localized_state(spec, 0, base_state), opt.ctrl);
            const MeanDispResult base = mean_displacement(base_traj, tol);
            for (const double phi : phis) {
                const BlochState bloch = bloch_state(kPi / 2.0, phi);
                const WaveTrajectory traj =
                    evolve_lossy(spec, localized_state(spec, 0, bloch), opt.ctrl);
                const MeanDispResult full = mean_displacement(traj, tol);
                if (!base.converged || !full.converged) {
                    ++bad;
                    continue;
                }
                samples.push_back({spec, bloch, quasiclassical_part(base, full)});
            }
        }
    }
    const std::vector<MassFit> fits = fit_effective_mass(samples);

    std::ostringstream ss;
    ss << "# fit=effective-mass\n# n_dimers=" << n_dimers << "\n# tol=" << format_g17(tol)
       << "\n";
    ss << "v_a,mu_inverse_fit,mu_inverse_closed_form,rel_err,residual_rms,n_samples\n";
    double worst = 0.0;
    for (const MassFit& f : fits) {
        LatticeSpec spec = spec_from_ratios(f.va, 0.5, n_dimers);
        const double closed = effective_mass_inverse(spec);
        const double rel = std::abs(f.mu_inverse - closed) / closed;
        worst = std::max(worst, rel);
        ss << format_g17(f.va) << ',' << format_g17(f.mu_inverse) << ','
           << format_g17(closed) << ',' << format_g17(rel) << ','
           << format_g17(f.residual_rms) << ',' << f.n_samples << '\n';
    }
    write_text(oo.out, ss.str());
    note_stream(oo) << "fit-mass: " << fits.size() << " couplings, worst rel err "
                    << format_g17(worst) << ", dropped " << bad << " samples, "
                    << format_g17(wall_since(t0)) << " s\n";
    return oo.strict && bad > 0 ? 3 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Quantum walks on lossy and gain/loss dimer lattices"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI file (flags win)");
    long seed = 0;
    app.add_option("--seed", seed, "Reserved for future stochastic features (unused)");

    // spectrum
    auto* sc_spectrum = app.add_subcommand("spectrum", "Bloch band pair on a k-grid");
    SpecOpts spectrum_spec;
    int spectrum_nk = 512;
    OutputOpts spectrum_out;
    add_spec_opts(sc_spectrum, spectrum_spec, false);
    sc_spectrum->add_option("--nk", spectrum_nk, "k-grid size")->capture_default_str();
    add_output_opts(sc_spectrum, spectrum_out);

    // phase
    auto* sc_phase = app.add_subcommand("phase", "Classify the symmetry phase");
    SpecOpts phase_spec;
    add_spec_opts(sc_phase, phase_spec, false);

    // evolve
    auto* sc_evolve = app.add_subcommand("evolve", "Propagate one initial state, dump intensities");
    SpecOpts evolve_spec;
    double evolve_theta = 0.0, evolve_phi = 0.0, evolve_eta = 0.0;
    int evolve_cell = 0;
    std::string evolve_model = "pt";
    StepOpts evolve_step;
    OutputOpts evolve_out;
    add_spec_opts(sc_evolve, evolve_spec, true);
    sc_evolve->add_option("--theta", evolve_theta, "Initial-state polar angle (radians)");
    sc_evolve->add_option("--phi", evolve_phi, "Initial-state azimuth (radians)");
    sc_evolve->add_option("--cell", evolve_cell, "Starting cell")->capture_default_str();
    sc_evolve->add_option("--model", evolve_model, "pt, lossy, or nonlinear")
        ->check(CLI::IsMember({"pt", "lossy", "nonlinear"}))
        ->capture_default_str();
    sc_evolve->add_option("--eta", evolve_eta, "Kerr strength (nonlinear model)");
    add_step_opts(sc_evolve, evolve_step, true);
    add_output_opts(sc_evolve, evolve_out);

    // meandisp
    auto* sc_mean = app.add_subcommand("meandisp", "Mean displacement of the decay record");
    SpecOpts mean_spec;
    double mean_theta = 0.0, mean_phi = 0.0, mean_tol = 1e-4;
    std::string mean_route = "real", mean_model = "lossy";
    int mean_nk = 2048;
    StepOpts mean_step;
    OutputOpts mean_out;
    add_spec_opts(sc_mean, mean_spec, true);
    sc_mean->add_option("--theta", mean_theta, "Initial-state polar angle (radians)");
    sc_mean->add_option("--phi", mean_phi, "Initial-state azimuth (radians)");
    sc_mean->add_option("--route", mean_route, "real, kspace, or analytic")
        ->check(CLI::IsMember({"real", "kspace", "analytic"}))
        ->capture_default_str();
    sc_mean->add_option("--model", mean_model, "Gauge for the real route: pt or lossy")
        ->check(CLI::IsMember({"pt", "lossy"}))
        ->capture_default_str();
    sc_mean->add_option("--nk", mean_nk, "k-grid size (kspace route)")->capture_default_str();
    sc_mean->add_option("--tol", mean_tol, "Settling tolerance")->capture_default_str();
    add_step_opts(sc_mean, mean_step, false);
    add_output_opts(sc_mean, mean_out);

    // sweep-coupling
    auto* sc_coupling = app.add_subcommand("sweep-coupling", "Mean displacement vs coupling ratio");
    int sw_points = 33, sw_n = 41, sw_jobs = 0;
    double sw_min = 0.0, sw_max = 1.0, sw_gamma = 0.5, sw_tol = 1e-4;
    std::vector<std::string> sw_states;
    OutputOpts sw_out;
    sc_coupling->add_option("--points", sw_points, "Grid size")->capture_default_str();
    sc_coupling->add_option("--min", sw_min, "Smallest va/(va+vb)")->capture_default_str();
    sc_coupling->add_option("--max", sw_max, "Largest va/(va+vb)")->capture_default_str();
    sc_coupling->add_option("--gamma", sw_gamma, "Gain/loss strength (units va+vb=1)")
        ->capture_default_str();
    sc_coupling->add_option("--state", sw_states,
                            "Initial state 'theta,phi' in radians (repeatable; default 0,0)");
    sc_coupling->add_option("--n", sw_n, "Number of dimers")->capture_default_str();
    sc_coupling->add_option("--tol", sw_tol, "Settling tolerance")->capture_default_str();
    sc_coupling->add_option("--jobs", sw_jobs, "Worker threads (0 = hardware)");
    add_output_opts(sc_coupling, sw_out);

    // sweep-gamma-map
    auto* sc_gmap = app.add_subcommand("sweep-gamma-map", "Drift map over coupling and gain/loss");
    int gm_va_points = 33, gm_g_points = 20, gm_n = 41, gm_jobs = 0;
    double gm_va_min = 0.0, gm_va_max = 1.0, gm_g_min = 0.05, gm_g_max = 1.0;
    double gm_theta = kPi / 2.0, gm_phi = kPi / 2.0, gm_tol = 1e-4;
    OutputOpts gm_out;
    sc_gmap->add_option("--va-points", gm_va_points, "Coupling grid size")->capture_default_str();
    sc_gmap->add_option("--va-min", gm_va_min, "")->capture_default_str();
    sc_gmap->add_option("--va-max", gm_va_max, "")->capture_default_str();
    sc_gmap->add_option("--gamma-points", gm_g_points, "Gain/loss grid size")->capture_default_str();
    sc_gmap->add_option("--gamma-min", gm_g_min, "")->capture_default_str();
    sc_gmap->add_option("--gamma-max", gm_g_max, "")->capture_default_str();
    sc_gmap->add_option("--theta", gm_theta, "Initial-state polar angle")->capture_default_str();
    sc_gmap->add_option("--phi", gm_phi, "Initial-state azimuth")->capture_default_str();
    sc_gmap->add_option("--n", gm_n, "Number of dimers")->capture_default_str();
    sc_gmap->add_option("--tol", gm_tol, "Settling tolerance")->capture_default_str();
    sc_gmap->add_option("--jobs", gm_jobs, "Worker threads (0 = hardware)");
    add_output_opts(sc_gmap, gm_out);

    // sweep-nonlinear
    auto* sc_nl = app.add_subcommand("sweep-nonlinear", "Kerr-model displacement map");
    int nl_va_points = 21, nl_g_points = 21, nl_n = 21, nl_jobs = 0;
    double nl_va_min = 0.1, nl_va_max = 0.9, nl_g_min = 0.1, nl_g_max = 1.0;
    double nl_eta = 0.01, nl_theta = 0.0, nl_phi = 0.0, nl_tol = 1e-4;
    StepOpts nl_step;
    OutputOpts nl_out;
    sc_nl->add_option("--eta", nl_eta, "Kerr strength")->capture_default_str();
    sc_nl->add_option("--va-points", nl_va_points, "Coupling grid size")->capture_default_str();
    sc_nl->add_option("--va-min", nl_va_min, "")->capture_default_str();
    sc_nl->add_option("--va-max", nl_va_max, "")->capture_default_str();
    sc_nl->add_option("--gamma-points", nl_g_points, "Gain/loss grid size")->capture_default_str();
    sc_nl->add_option("--gamma-min", nl_g_min, "")->capture_default_str();
    sc_nl->add_option("--gamma-max", nl_g_max, "")->capture_default_str();
    sc_nl->add_option("--theta", nl_theta, "Initial-state polar angle")->capture_default_str();
    sc_nl->add_option("--phi", nl_phi, "Initial-state azimuth")->capture_default_str();
    sc_nl->add_option("--n", nl_n, "Number of dimers")->capture_default_str();
    sc_nl->add_option("--tol", nl_tol, "Settling tolerance")->capture_default_str();
    sc_nl->add_option("--jobs", nl_jobs, "Worker threads (0 = hardware)");
    add_step_opts(sc_nl, nl_step, true);
    add_output_opts(sc_nl, nl_out);

    // fit-mass
    auto* sc_fit = app.add_subcommand("fit-mass", "Fit the drift coefficient vs closed form");
    std::vector<double> fit_vas;
    int fit_n = 41, fit_jobs = 0;
    double fit_tol = 1e-4;
    OutputOpts fit_out;
    sc_fit->add_option("--va", fit_vas, "Coupling ratios to fit (repeatable)");
    sc_fit->add_option("--n", fit_n, "Number of dimers")->capture_default_str();
    sc_fit->add_option("--tol", fit_tol, "Settling tolerance")->capture_default_str();
    sc_fit->add_option("--jobs", fit_jobs, "Worker threads (0 = hardware)");
    add_output_opts(sc_fit, fit_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (sc_spectrum->parsed()) return cmd_spectrum(spectrum_spec, spectrum_nk, spectrum_out);
        if (sc_phase->parsed()) return cmd_phase(phase_spec);
        if (sc_evolve->parsed())
            return cmd_evolve(evolve_spec, evolve_theta, evolve_phi, evolve_cell,
                              evolve_model, evolve_eta, evolve_step, evolve_out);
        if (sc_mean->parsed())
            return cmd_meandisp(mean_spec, mean_theta, mean_phi, mean_route, mean_model,
                                mean_nk, mean_tol, mean_step, mean_out);
        if (sc_coupling->parsed()) {
            std::vector<BlochState> states;
            for (const std::string& s : sw_states) {
                const auto comma = s.find(',');
                if (comma == std::string::npos)
                    throw std::invalid_argument("--state expects 'theta,phi', got " + s);
                states.push_back(bloch_state(std::stod(s.substr(0, comma)),
                                             std::stod(s.substr(comma + 1))));
            }
            if (states.empty()) states.push_back(bloch_state(0.0, 0.0));
            SweepOptions opt;
            opt.n_dimers = sw_n;
            opt.tol = sw_tol;
            opt.jobs = sw_jobs;
            const auto t0 = std::chrono::steady_clock::now();
            const SweepTable t = sweep_coupling({"va", sw_min, sw_max, sw_points},
                                                sw_gamma, states, opt);
            return finish_table(t, sw_out, wall_since(t0), "sweep-coupling");
        }
        if (sc_gmap->parsed()) {
            SweepOptions opt;
            opt.n_dimers = gm_n;
            opt.tol = gm_tol;
            opt.jobs = gm_jobs;
            const auto t0 = std::chrono::steady_clock::now();
            const SweepTable t = sweep_gamma_map({"va", gm_va_min, gm_va_max, gm_va_points},
                                                 {"gamma", gm_g_min, gm_g_max, gm_g_points},
                                                 bloch_state(gm_theta, gm_phi), opt);
            return finish_table(t, gm_out, wall_since(t0), "sweep-gamma-map");
        }
        if (sc_nl->parsed()) {
            SweepOptions opt;
            opt.n_dimers = nl_n;
            opt.tol = nl_tol;
            opt.jobs = nl_jobs;
            opt.ctrl = to_ctrl(nl_step);
            const auto t0 = std::chrono::steady_clock::now();
            const SweepTable t = sweep_nonlinear({"va", nl_va_min, nl_va_max, nl_va_points},
                                                 {"gamma", nl_g_min, nl_g_max, nl_g_points},
                                                 nl_eta, bloch_state(nl_theta, nl_phi), opt);
            return finish_table(t, nl_out, wall_since(t0), "sweep-nonlinear");
        }
        if (sc_fit->parsed()) return cmd_fit_mass(fit_vas, fit_n, fit_tol, fit_jobs, fit_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace ptwalk
