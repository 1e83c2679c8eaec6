// observables.hpp — displacement functionals and the effective-mass fit
#pragma once

#include "ptwalk/bloch.hpp"
#include "ptwalk/propagate.hpp"

#include <vector>

namespace ptwalk {

// Mean displacement 4*gamma * \int dt w(t) \sum_m m |psi_{m,B}(t)|^2 from a
// sampled trajectory. The weight w(t) = exp(-2*gamma*t) for trajectories of the
// balanced (gain/loss) model; the lossy model already carries the decay in its
// own norm, so w = 1 there. Simpson blocks of length ~1/gamma are accumulated
// until the running total settles to `tol`; tail_estimate bounds what was cut.
MeanDispResult mean_displacement(const WaveTrajectory& traj, double tol = 1e-4);

// Difference full - base of two converged displacement results, intended for
// isolating the drift of an azimuthal initial state against its phi = 0 twin.
double quasiclassical_part(const MeanDispResult& base, const MeanDispResult& full);

// One measurement for the effective-mass fit: the drift part observed at a
// known gain/loss strength and initial-state momentum p0 = sin(theta)*sin(phi).
struct MassFitSample {
    LatticeSpec spec;
    BlochState bloch;
    double drift = 0.0;  // quasiclassical_part of the measured displacement pair
};

struct MassFit {
    double va = 0.0;           // group key (couplings shared within a group)
    double mu_inverse = 0.0;   // fitted slope of drift vs p0/(4*gamma)
    double intercept = 0.0;
    double residual_rms = 0.0;
    int n_samples = 0;
};

// Least-squares line (with intercept) through drift vs p0/(4*gamma), grouped by
// va. Throws std::invalid_argument when a group has fewer than three samples or
// no spread in the abscissa.
std::vector<MassFit> fit_effective_mass(const std::vector<MassFitSample>& samples);

}  // namespace ptwalk
