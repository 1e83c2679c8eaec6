// sweep.cpp — phase classification and parallel parameter-grid drivers
#include "ptwalk/sweep.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ptwalk/io.hpp"
#include "window_integrator.hpp"

namespace ptwalk {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::PTSymmetric: return "pt-symmetric";
        case Phase::PTBroken: return "pt-broken";
        case Phase::FullyBroken: return "fully-broken";
    }
    return "unknown";
}

PhasePoint classify_phase(const LatticeSpec& spec) {
    spec.validate();
    const double band = 1e-9 * spec.vt();
    const double gap = pt_threshold(spec);
    const double top = full_breaking_scale(spec);
    PhasePoint p{spec.va, spec.vb, spec.gamma, Phase::PTSymmetric, false};
    if (spec.gamma < gap - band) {
        p.phase = Phase::PTSymmetric;
    } else if (spec.gamma <= gap + band) {
        p.phase = Phase::PTBroken;  // threshold itself counts as broken
        p.on_boundary = true;
    } else if (spec.gamma < top - band) {
        p.phase = Phase::PTBroken;
    } else if (spec.gamma <= top + band) {
        p.phase = Phase::FullyBroken;
        p.on_boundary = true;
    } else {
        p.phase = Phase::FullyBroken;
    }
    return p;
}

void AxisSpec::validate() const {
    if (count < 1)
        throw std::invalid_argument("axis count must be >= 1");
    if (!std::isfinite(min) || !std::isfinite(max) || max < min)
        throw std::invalid_argument("axis range must be finite with max >= min");
    if (count == 1 && max != min)
        throw std::invalid_argument("single-point axis needs max == min");
}

std::vector<double> AxisSpec::values() const {
    validate();
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = min;
        return v;
    }
    for (int i = 0; i < count; ++i)
        v[i] = min + (max - min) * i / (count - 1);
    v[count - 1] = max;
    return v;
}

namespace {

// Fixed task list, dynamic claiming, results into pre-sized disjoint slots:
// output is identical for any worker count.
void run_parallel(int jobs, int n_tasks, const std::function<void(int)>& task) {
    if (jobs <= 0) {
        jobs = static_cast<int>(std::thread::hardware_concurrency());
        if (jobs < 1) jobs = 1;
    }
    jobs = std::min(jobs, n_tasks);
    if (jobs <= 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) task(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

// Wrap a point computation so one bad grid point flags its row instead of
// killing the sweep.
std::function<void(int)> guarded(std::vector<SweepRow>& rows,
                                 std::function<void(int, SweepRow&)> body) {
    return [&rows, body = std::move(body)](int i) {
        try {
            body(i, rows[i]);
        } catch (const std::exception& e) {
            rows[i].mean_disp = kNan;
            rows[i].tail = std::numeric_limits<double>::infinity();
            rows[i].converged = false;
            rows[i].flag = std::string("error: ") + e.what();
        }
    };
}

void fill_identity(SweepRow& row, const LatticeSpec& spec, const BlochState& bloch,
                   double eta) {
    row.va = spec.va;
    row.vb = spec.vb;
    row.gamma = spec.gamma;
    row.theta = bloch.theta;
    row.phi = bloch.phi;
    row.eta = eta;
    const PhasePoint p = classify_phase(spec);
    row.phase = p.phase;
    row.on_boundary = p.on_boundary;
}

void fill_result(SweepRow& row, const WaveTrajectory& traj, const MeanDispResult& res) {
    row.mean_disp = res.value;
    row.tail = res.tail_estimate;
    row.converged = res.converged;
    if (traj.flag != TrajectoryFlag::Ok)
        row.flag = flag_name(traj.flag);
    else
        row.flag = res.converged ? "ok" : "non-converged";
}

LatticeSpec grid_spec(double x, double gamma, const SweepOptions& opt) {
    LatticeSpec spec;
    spec.n_dimers = opt.n_dimers;
    spec.va = x;
    spec.vb = 1.0 - x;
    spec.gamma = gamma;
    spec.boundary = opt.boundary;
    spec.validate();
    return spec;
}

void check_ratio_axis(const AxisSpec& axis) {
    axis.validate();
    if (axis.min < 0.0 || axis.max > 1.0)
        throw std::invalid_argument("coupling axis is va/(va+vb), must lie in [0, 1]");
}

std::string states_label(const std::vector<BlochState>& states) {
    std::string s;
    for (const BlochState& b : states) {
        if (!s.empty()) s += ";";
        s += format_g17(b.theta) + ":" + format_g17(b.phi);
    }
    return s;
}

}  // namespace

SweepTable sweep_coupling(const AxisSpec& va_axis, double gamma,
                          const std::vector<BlochState>& states,
                          const SweepOptions& opt) {
    check_ratio_axis(va_axis);
    opt.ctrl.validate();
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("sweep gamma must be positive");
    if (states.empty())
        throw std::invalid_argument("sweep needs at least one initial state");
    for (const BlochState& b : states) b.validate();

    const std::vector<double> xs = va_axis.values();
    const int n_states = static_cast<int>(states.size());

    SweepTable table;
    table.config = {{"sweep", "coupling"},
                    {"n_dimers", std::to_string(opt.n_dimers)},
                    {"boundary", opt.boundary == Boundary::Open ? "open" : "periodic"},
                    {"gamma", format_g17(gamma)},
                    {"tol", format_g17(opt.tol)},
                    {"points", std::to_string(xs.size())},
                    {"states", states_label(states)}};
    table.extra_columns = {"analytic"};
    table.rows.resize(xs.size() * states.size());

    auto body = [&](int i, SweepRow& row) {
        const double x = xs[i / n_states];
        const BlochState& bloch = states[i % n_states];
        const LatticeSpec spec = grid_spec(x, gamma, opt);
        fill_identity(row, spec, bloch, 0.0);
        // Lossy gauge keeps amplitudes bounded deep in the broken phase; the
        // displacement integrand is identical to the balanced model's.
        const WaveTrajectory traj = evolve_lossy(spec, localized_state(spec, 0, bloch), opt.ctrl);
        const MeanDispResult res = mean_displacement(traj, opt.tol);
        fill_result(row, traj, res);
        double analytic = kNan;
        try {
            analytic = analytic_mean_disp(spec, bloch);
        } catch (const std::exception&) {
        }
        row.extras = {analytic};
    };
    run_parallel(opt.jobs, static_cast<int>(table.rows.size()), guarded(table.rows, body));
    return table;
}

SweepTable sweep_gamma_map(const AxisSpec& va_axis, const AxisSpec& gamma_axis,
                           const BlochState& state, const SweepOptions& opt) {
    check_ratio_axis(va_axis);
    gamma_axis.validate();
    opt.ctrl.validate();
    state.validate();
    if (gamma_axis.min <= 0.0)
        throw std::invalid_argument("gamma axis must be positive");

    const std::vector<double> xs = va_axis.values();
    const std::vector<double> gs = gamma_axis.values();
    const int n_g = static_cast<int>(gs.size());

    SweepTable table;
    table.config = {{"sweep", "gamma-map"},
                    {"n_dimers", std::to_string(opt.n_dimers)},
                    {"boundary", opt.boundary == Boundary::Open ? "open" : "periodic"},
                    {"tol", format_g17(opt.tol)},
                    {"theta", format_g17(state.theta)},
                    {"phi", format_g17(state.phi)}};
    table.extra_columns = {"baseline", "drift"};
    table.rows.resize(xs.size() * gs.size());

    auto body = [&](int i, SweepRow& row) {
        const double x = xs[i / n_g];
        const double g = gs[i % n_g];
        const LatticeSpec spec = grid_spec(x, g, opt);
        fill_identity(row, spec, state, 0.0);
        const BlochState base_state = bloch_state(state.theta, 0.0);
        const WaveTrajectory base_traj =
            evolve_lossy(spec, localized_state(spec, 0, base_state), opt.ctrl);
        const MeanDispResult base = mean_displacement(base_traj, opt.tol);
        const WaveTrajectory traj =
            evolve_lossy(spec, localized_state(spec, 0, state), opt.ctrl);
        const MeanDispResult full = mean_displacement(traj, opt.tol);
        row.mean_disp = full.value;
        row.tail = std::max(full.tail_estimate, base.tail_estimate);
        row.converged = full.converged && base.converged;
        if (traj.flag != TrajectoryFlag::Ok)
            row.flag = flag_name(traj.flag);
        else if (base_traj.flag != TrajectoryFlag::Ok)
            row.flag = flag_name(base_traj.flag);
        else
            row.flag = row.converged ? "ok" : "non-converged";
        row.extras = {base.value, row.converged ? full.value - base.value : kNan};
    };
    run_parallel(opt.jobs, static_cast<int>(table.rows.size()), guarded(table.rows, body));
    return table;
}

namespace {

struct NonlinearPoint {
    MeanDispResult res;
    std::string flag;
};

// Drive one Kerr grid point in chunks of roughly one decay time, feeding the
// weighted displacement integrand into a settling integrator after each chunk.
// Chunks stop early when the projected cost of ever settling (at the measured
// growth rate) would blow through the intensity cap or the step budget first.
NonlinearPoint run_nonlinear_point(const LatticeSpec& spec, double eta,
                                   const WaveFunction& psi0, const StepControl& base,
                                   double tol) {
    const double gamma = spec.gamma;
    const double dt = base.dt > 0.0 ? base.dt : 0.02 / (spec.vt() + gamma);
    const double t_cap = base.t_max > 0.0 ? base.t_max : default_horizon(spec);
    const double chunk = std::max(1.0 / gamma, 20.0 * dt);
    detail::WindowIntegrator integ(dt, 1.0 / gamma, tol, gamma, /*self_measure=*/true);

    const int m_half = spec.half_width();
    WaveFunction psi = psi0;
    long budget = base.max_steps;
    double carried_dt = 0.0;
    double kappa_hat = 0.0;
    double t_end = 0.0;
    bool settled = false;
    TrajectoryFlag hard = TrajectoryFlag::Ok;

    while (true) {
        StepControl c = base;
        c.dt = dt;
        c.sample_stride = 1;
        c.t_max = std::min(psi.time + chunk, t_cap);
        c.max_steps = budget;
        c.dt_init = carried_dt;
        const double norm_in = psi.amps.norm();
        const WaveTrajectory tr = evolve_nonlinear(spec, eta, psi, c);

        for (std::size_t j = 1; j < tr.samples.size() && !settled; ++j) {
            const WaveFunction& wf = tr.samples[j];
            double msum = 0.0;
            for (int cell = -m_half; cell <= m_half; ++cell)
                msum += cell * std::norm(wf.amps(site_index(spec, cell, Sublattice::B)));
            settled = integ.add(4.0 * gamma * std::exp(-2.0 * gamma * wf.time) * msum);
            t_end = wf.time;
        }
        budget -= tr.accepted_steps;
        if (settled) break;
        t_end = tr.samples.back().time;
        const double span = t_end - tr.samples.front().time;
        if (span > 0.0 && norm_in > 0.0) {
            const double norm_out = tr.samples.back().amps.norm();
            kappa_hat = std::log(std::max(norm_out / norm_in, 1e-300)) / span;
        }
        if (tr.flag != TrajectoryFlag::Ok) {
            hard = tr.flag;
            break;
        }
        if (budget <= 0) {
            hard = TrajectoryFlag::OverBudget;
            break;
        }
        if (t_end >= t_cap - 1e-9) break;  // horizon exhausted without settling

        if (t_end >= 3.0 * chunk) {
            const double margin_hat = gamma - kappa_hat;
            if (margin_hat <= 1e-3) break;  // growth matches the weight: hopeless
            const double peak = integ.last_peak();
            if (peak > 0.0 && kappa_hat > 0.0) {
                const double target = tol * std::max(1.0, std::abs(integ.total()));
                const double need = std::log(std::max(peak / target, 1.0)) / (2.0 * margin_hat);
                if (need > 0.0 && span > 0.0) {
                    double imax = 0.0;
                    for (Eigen::Index q = 0; q < tr.samples.back().amps.size(); ++q)
                        imax = std::max(imax, std::norm(tr.samples.back().amps(q)));
                    const double log_ipred =
                        std::log(std::max(imax, 1e-300)) + 2.0 * kappa_hat * need;
                    if (log_ipred > std::log(base.intensity_cap)) {
                        hard = TrajectoryFlag::Diverged;  // would hit the cap before settling
                        break;
                    }
                    const double rate = static_cast<double>(tr.accepted_steps) / span;
                    const double log_steps =
                        std::log(std::max(rate, 1.0)) + 2.0 * kappa_hat * need -
                        std::log(2.0 * kappa_hat);
                    if (log_steps > std::log(static_cast<double>(budget))) {
                        hard = TrajectoryFlag::OverBudget;  // would exhaust the budget first
                        break;
                    }
                }
            }
        }
        psi = tr.samples.back();
        carried_dt = tr.last_dt;
    }
    if (!settled) integ.flush();

    NonlinearPoint out;
    out.res.value = integ.total();
    out.res.horizon = t_end;
    out.res.tail_estimate = integ.tail_bound();
    out.res.converged =
        settled || out.res.tail_estimate <= tol * std::max(1.0, std::abs(out.res.value));
    if (settled)
        out.flag = "ok";
    else if (hard != TrajectoryFlag::Ok)
        out.flag = flag_name(hard);
    else
        out.flag = out.res.converged ? "ok" : "non-converged";
    return out;
}

}  // namespace

SweepTable sweep_nonlinear(const AxisSpec& va_axis, const AxisSpec& gamma_axis,
                           double eta, const BlochState& state,
                           const SweepOptions& opt) {
    check_ratio_axis(va_axis);
    gamma_axis.validate();
    opt.ctrl.validate();
    state.validate();
    if (!std::isfinite(eta))
        throw std::invalid_argument("eta must be finite");
    if (gamma_axis.min <= 0.0)
        throw std::invalid_argument("gamma axis must be positive");

    const std::vector<double> xs = va_axis.values();
    const std::vector<double> gs = gamma_axis.values();
    const int n_g = static_cast<int>(gs.size());

    SweepTable table;
    table.config = {{"sweep", "nonlinear"},
                    {"n_dimers", std::to_string(opt.n_dimers)},
                    {"boundary", opt.boundary == Boundary::Open ? "open" : "periodic"},
                    {"eta", format_g17(eta)},
                    {"tol", format_g17(opt.tol)},
                    {"theta", format_g17(state.theta)},
                    {"phi", format_g17(state.phi)}};
    table.extra_columns = {"linear_disp", "delta"};
    table.rows.resize(xs.size() * gs.size());

    auto body = [&](int i, SweepRow& row) {
        const double x = xs[i / n_g];
        const double g = gs[i % n_g];
        const LatticeSpec spec = grid_spec(x, g, opt);
        fill_identity(row, spec, state, eta);
        const WaveFunction psi0 = localized_state(spec, 0, state);
        const WaveTrajectory lin_traj = evolve_lossy(spec, psi0, opt.ctrl);
        const MeanDispResult lin = mean_displacement(lin_traj, opt.tol);
        const NonlinearPoint nl = run_nonlinear_point(spec, eta, psi0, opt.ctrl, opt.tol);
        row.mean_disp = nl.res.value;
        row.tail = nl.res.tail_estimate;
        row.converged = nl.res.converged;
        row.flag = nl.flag;
        const bool both = nl.res.converged && lin.converged;
        row.extras = {lin.value, both ? nl.res.value - lin.value : kNan};
    };
    run_parallel(opt.jobs, static_cast<int>(table.rows.size()), guarded(table.rows, body));
    return table;
}

void write_csv(std::ostream& os, const SweepTable& table) {
    for (const auto& [key, value] : table.config)
        os << "# " << key << "=" << value << "\n";
    os << "v_a,v_b,gamma,theta,phi,eta,mean_disp,tail,converged";
    for (const std::string& c : table.extra_columns) os << "," << c;
    os << ",phase,flag\n";
    for (const SweepRow& r : table.rows) {
        os << format_g17(r.va) << ',' << format_g17(r.vb) << ',' << format_g17(r.gamma)
           << ',' << format_g17(r.theta) << ',' << format_g17(r.phi) << ','
           << format_g17(r.eta) << ',' << format_g17(r.mean_disp) << ','
           << format_g17(r.tail) << ',' << (r.converged ? '1' : '0');
        for (double e : r.extras) os << ',' << format_g17(e);
        os << ',' << phase_name(r.phase) << (r.on_boundary ? "*" : "") << ',' << r.flag
           << '\n';
    }
}

std::string summary_json(const SweepTable& table, double wall_seconds) {
    nlohmann::json j;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [key, value] : table.config) cfg[key] = value;
    j["config"] = cfg;
    j["rows"] = table.rows.size();
    std::size_t conv = 0;
    std::map<std::string, int> flags;
    for (const SweepRow& r : table.rows) {
        if (r.converged) ++conv;
        ++flags[r.flag];
    }
    j["converged"] = conv;
    j["flags"] = flags;
    j["wall_seconds"] = wall_seconds;
    return j.dump(2);
}

}  // namespace ptwalk
