// propagate.cpp — time evolution: exact linear stepping, adaptive nonlinear RK4
#include "ptwalk/propagate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>

#include "ptwalk/bloch.hpp"

namespace ptwalk {

void StepControl::validate() const {
    if (dt < 0.0 || !std::isfinite(dt))
        throw std::invalid_argument("dt must be finite and >= 0");
    if (t_max < 0.0 || !std::isfinite(t_max))
        throw std::invalid_argument("t_max must be finite and >= 0");
    if (sample_stride < 1)
        throw std::invalid_argument("sample_stride must be >= 1");
    if (!(rel_tol > 1e-14 && rel_tol < 1e-2))
        throw std::invalid_argument("rel_tol must lie in (1e-14, 1e-2)");
    if (intensity_cap <= 0.0)
        throw std::invalid_argument("intensity_cap must be positive");
    if (max_steps < 1)
        throw std::invalid_argument("max_steps must be >= 1");
}

const char* flag_name(TrajectoryFlag flag) {
    switch (flag) {
        case TrajectoryFlag::Ok: return "ok";
        case TrajectoryFlag::Diverged: return "diverged";
        case TrajectoryFlag::Stalled: return "stalled";
        case TrajectoryFlag::OverBudget: return "over-budget";
    }
    return "unknown";
}

double default_horizon(const LatticeSpec& spec, double tail_target) {
    spec.validate();
    if (!(tail_target > 0.0 && tail_target < 1.0))
        throw std::invalid_argument("tail_target must lie in (0, 1)");
    const double lo = 20.0 / spec.vt();
    const double hi = 400.0 / spec.vt();
    if (spec.gamma <= 0.0) return 50.0 / spec.vt();
    const double margin = spec.gamma - max_imag_eigenvalue(spec);
    if (margin <= 0.0) return hi;
    const double t = -std::log(tail_target) / (2.0 * margin);
    return std::clamp(t, lo, hi);
}

namespace {

double resolve_dt(const LatticeSpec& spec, const StepControl& ctrl) {
    return ctrl.dt > 0.0 ? ctrl.dt : 0.02 / (spec.vt() + spec.gamma);
}

double resolve_t_max(const LatticeSpec& spec, const StepControl& ctrl) {
    return ctrl.t_max > 0.0 ? ctrl.t_max : default_horizon(spec);
}

double peak_intensity(const ComplexVector& v) {
    double peak = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        peak = std::max(peak, std::norm(v(i)));
    return peak;
}

}  // namespace

WaveTrajectory evolve_linear(const LatticeSpec& spec, TrajectoryKind kind,
                             const ComplexMatrix& h, const WaveFunction& psi0,
                             const StepControl& ctrl) {
    spec.validate();
    ctrl.validate();
    if (kind == TrajectoryKind::NonlinearPT)
        throw std::invalid_argument("linear stepper cannot produce a nonlinear trajectory");
    if (h.rows() != spec.sites() || h.cols() != spec.sites())
        throw std::invalid_argument("Hamiltonian dimension does not match lattice");
    if (psi0.amps.size() != spec.sites())
        throw std::invalid_argument("state dimension does not match lattice");

    const double dt = resolve_dt(spec, ctrl);
    const double t_end = resolve_t_max(spec, ctrl);
    if (t_end <= psi0.time)
        throw std::invalid_argument("t_max must exceed the initial time");
    long n_steps = static_cast<long>(std::ceil((t_end - psi0.time) / dt - 1e-9));
    n_steps = ctrl.sample_stride *
              ((n_steps + ctrl.sample_stride - 1) / ctrl.sample_stride);  // whole strides

    const ComplexMatrix u = (-I_UNIT * dt * h).exp();

    WaveTrajectory traj;
    traj.spec = spec;
    traj.kind = kind;
    traj.sample_dt = dt * ctrl.sample_stride;
    traj.samples.reserve(static_cast<std::size_t>(n_steps / ctrl.sample_stride) + 1);
    traj.samples.push_back(psi0);

    ComplexVector psi = psi0.amps;
    for (long i = 1; i <= n_steps; ++i) {
        psi = u * psi;
        if (peak_intensity(psi) > ctrl.intensity_cap) {
            traj.flag = TrajectoryFlag::Diverged;
            break;
        }
        if (i % ctrl.sample_stride == 0)
            traj.samples.push_back({psi, psi0.time + i * dt});
    }
    traj.accepted_steps = n_steps;
    traj.min_dt = traj.last_dt = dt;
    return traj;
}

WaveTrajectory evolve_pt(const LatticeSpec& spec, const WaveFunction& psi0,
                         const StepControl& ctrl) {
    return evolve_linear(spec, TrajectoryKind::LinearPT,
                         build_h0(spec) + build_gamma_pt(spec), psi0, ctrl);
}

WaveTrajectory evolve_lossy(const LatticeSpec& spec, const WaveFunction& psi0,
                            const StepControl& ctrl) {
    return evolve_linear(spec, TrajectoryKind::LinearLossy,
                         build_h0(spec) + build_gamma_lossy(spec), psi0, ctrl);
}

namespace {

// Right-hand side -i*(H psi + eta*|psi|^2 psi) and one classical RK4 step.
struct KerrSystem {
    const ComplexMatrix& h;
    double eta;

    ComplexVector deriv(const ComplexVector& psi) const {
        ComplexVector out = h * psi;
        out.array() += eta * psi.array().abs2() * psi.array();
        return Complex(0.0, -1.0) * out;
    }

    ComplexVector rk4(const ComplexVector& y, double step) const {
        const ComplexVector k1 = deriv(y);
        const ComplexVector k2 = deriv(y + 0.5 * step * k1);
        const ComplexVector k3 = deriv(y + 0.5 * step * k2);
        const ComplexVector k4 = deriv(y + step * k3);
        return y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

}  // namespace

WaveTrajectory evolve_nonlinear(const LatticeSpec& spec, double eta,
                                const WaveFunction& psi0, const StepControl& ctrl) {
    spec.validate();
    ctrl.validate();
    if (!std::isfinite(eta))
        throw std::invalid_argument("eta must be finite");
    if (psi0.amps.size() != spec.sites())
        throw std::invalid_argument("state dimension does not match lattice");

    const double dt = resolve_dt(spec, ctrl);
    const double t_end = resolve_t_max(spec, ctrl);
    if (t_end <= psi0.time)
        throw std::invalid_argument("t_max must exceed the initial time");
    const double sample_dt = dt * ctrl.sample_stride;
    const double dt_floor = 1e-12 * sample_dt;
    const ComplexMatrix h = build_h0(spec) + build_gamma_pt(spec);
    const KerrSystem sys{h, eta};

    WaveTrajectory traj;
    traj.spec = spec;
    traj.kind = TrajectoryKind::NonlinearPT;
    traj.eta = eta;
    traj.sample_dt = sample_dt;
    traj.samples.push_back(psi0);
    traj.min_dt = sample_dt;

    ComplexVector psi = psi0.amps;
    double t = psi0.time;
    double h_try = ctrl.dt_init > 0.0 ? std::min(ctrl.dt_init, sample_dt) : dt;
    long next_sample = 1;
    while (t < t_end - 1e-12 * sample_dt) {
        const double t_target = psi0.time + next_sample * sample_dt;
        bool lands_on_sample = false;
        double step = h_try;
        if (t + step >= t_target - 1e-12 * sample_dt) {
            step = t_target - t;
            lands_on_sample = true;
        }

        const ComplexVector full = sys.rk4(psi, step);
        ComplexVector fine = sys.rk4(psi, 0.5 * step);
        fine = sys.rk4(fine, 0.5 * step);
        const double scale = fine.norm();
        const double est = (fine - full).norm() / std::max(scale, 1e-300);

        if (!std::isfinite(est) || est > ctrl.rel_tol) {
            ++traj.rejected_steps;
            h_try = 0.5 * step;
            if (h_try < dt_floor) {
                traj.flag = TrajectoryFlag::Stalled;
                break;
            }
            continue;
        }

        psi = fine;
        t = lands_on_sample ? t_target : t + step;
        ++traj.accepted_steps;
        traj.min_dt = std::min(traj.min_dt, step);
        if (est < 0.01 * ctrl.rel_tol)
            h_try = std::min(2.0 * step, sample_dt);
        else
            h_try = std::max(step, dt_floor);

        if (peak_intensity(psi) > ctrl.intensity_cap) {
            traj.flag = TrajectoryFlag::Diverged;
            break;
        }
        if (lands_on_sample) {
            traj.samples.push_back({psi, t_target});
            ++next_sample;
        }
        if (traj.accepted_steps >= ctrl.max_steps && t < t_end - 1e-12 * sample_dt) {
            traj.flag = TrajectoryFlag::OverBudget;
            break;
        }
    }
    traj.last_dt = h_try;
    return traj;
}

std::vector<IntensitySample> intensity_map(const WaveTrajectory& traj) {
    std::vector<IntensitySample> out;
    const int m = traj.spec.half_width();
    out.reserve(traj.samples.size() * traj.spec.sites());
    for (const WaveFunction& wf : traj.samples) {
        for (int cell = -m; cell <= m; ++cell) {
            for (Sublattice s : {Sublattice::A, Sublattice::B}) {
                out.push_back({wf.time, cell, s,
                               std::norm(wf.amps(site_index(traj.spec, cell, s)))});
            }
        }
    }
    return out;
}

}  // namespace ptwalk
