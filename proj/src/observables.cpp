// observables.cpp — displacement functionals and the effective-mass fit
#include "ptwalk/observables.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "window_integrator.hpp"

namespace ptwalk {

MeanDispResult mean_displacement(const WaveTrajectory& traj, double tol) {
    traj.spec.validate();
    if (traj.spec.gamma <= 0.0)
        throw std::domain_error("mean displacement requires gamma > 0");
    if (tol <= 0.0)
        throw std::invalid_argument("tol must be positive");
    if (traj.samples.size() < 3 || traj.sample_dt <= 0.0)
        throw std::invalid_argument("trajectory too short for a displacement integral");

    const LatticeSpec& spec = traj.spec;
    const double gamma = spec.gamma;
    const bool weighted = traj.kind != TrajectoryKind::LinearLossy;
    const bool nonlinear = traj.kind == TrajectoryKind::NonlinearPT;
    // The balanced model's own growth rate bounds the weighted envelope; a
    // nonlinear run can exceed it, so there the decay is measured from the data.
    const double margin = gamma - max_imag_eigenvalue(spec);
    detail::WindowIntegrator integ(traj.sample_dt, 1.0 / gamma, tol,
                                   nonlinear ? gamma : margin, nonlinear);

    const int m_half = spec.half_width();
    const double t0 = traj.samples.front().time;
    bool settled = false;
    std::size_t used = traj.samples.size();
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const WaveFunction& wf = traj.samples[i];
        double msum = 0.0;
        for (int cell = -m_half; cell <= m_half; ++cell)
            msum += cell * std::norm(wf.amps(site_index(spec, cell, Sublattice::B)));
        const double w = weighted ? std::exp(-2.0 * gamma * (wf.time - t0)) : 1.0;
        if (integ.add(4.0 * gamma * w * msum)) {
            settled = true;
            used = i + 1;
            break;
        }
    }
    if (!settled) integ.flush();

    MeanDispResult out;
    out.value = integ.total();
    out.horizon = traj.samples[used - 1].time - t0;
    out.tail_estimate = integ.tail_bound();
    if (traj.flag != TrajectoryFlag::Ok && !settled) {
        out.tail_estimate = std::numeric_limits<double>::infinity();
        out.converged = false;
        return out;
    }
    out.converged = settled ||
                    out.tail_estimate <= tol * std::max(1.0, std::abs(out.value));
    return out;
}

double quasiclassical_part(const MeanDispResult& base, const MeanDispResult& full) {
    if (!base.converged || !full.converged)
        throw std::invalid_argument("quasiclassical part needs two converged displacements");
    return full.value - base.value;
}

std::vector<MassFit> fit_effective_mass(const std::vector<MassFitSample>& samples) {
    std::map<double, std::vector<std::pair<double, double>>> groups;  // va -> (x, y)
    for (const MassFitSample& s : samples) {
        s.spec.validate();
        s.bloch.validate();
        if (s.spec.gamma <= 0.0)
            throw std::invalid_argument("fit samples need gamma > 0");
        const double x = std::sin(s.bloch.theta) * std::sin(s.bloch.phi) / (4.0 * s.spec.gamma);
        groups[s.spec.va].push_back({x, s.drift});
    }

    std::vector<MassFit> fits;
    for (const auto& [va, pts] : groups) {
        const int n = static_cast<int>(pts.size());
        if (n < 3)
            throw std::invalid_argument("effective-mass fit needs >= 3 samples per coupling");
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : pts) { mx += x; my += y; }
        mx /= n;
        my /= n;
        double sxx = 0.0, sxy = 0.0;
        for (const auto& [x, y] : pts) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        if (sxx <= 1e-20)
            throw std::invalid_argument("effective-mass fit is rank deficient: no spread in p0/(4*gamma)");
        MassFit fit;
        fit.va = va;
        fit.mu_inverse = sxy / sxx;
        fit.intercept = my - fit.mu_inverse * mx;
        double ss = 0.0;
        for (const auto& [x, y] : pts) {
            const double r = y - (fit.intercept + fit.mu_inverse * x);
            ss += r * r;
        }
        fit.residual_rms = std::sqrt(ss / n);
        fit.n_samples = n;
        fits.push_back(fit);
    }
    return fits;
}

}  // namespace ptwalk
