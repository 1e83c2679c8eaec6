// propagate.hpp — time evolution: exact linear stepping, adaptive nonlinear RK4
#pragma once

#include "ptwalk/lattice.hpp"

#include <vector>

namespace ptwalk {

struct StepControl {
    double dt = 0.0;             // sample grid spacing; 0 -> 0.02 / (va + vb + gamma)
    double t_max = 0.0;          // evolve until this absolute time; 0 -> decay-based horizon
    int sample_stride = 1;       // record every stride-th grid point
    double rel_tol = 1e-6;       // nonlinear step-doubling error target (relative)
    double intensity_cap = 1e12; // abort when any |psi_i|^2 exceeds this
    long max_steps = 10'000'000; // accepted-step budget (nonlinear)
    double dt_init = 0.0;        // starting trial step for the adaptive loop; 0 -> dt
    void validate() const;
};

enum class TrajectoryKind { LinearPT, LinearLossy, NonlinearPT };

enum class TrajectoryFlag { Ok, Diverged, Stalled, OverBudget };

const char* flag_name(TrajectoryFlag flag);

struct WaveTrajectory {
    LatticeSpec spec;
    TrajectoryKind kind = TrajectoryKind::LinearPT;
    double eta = 0.0;            // Kerr coefficient (nonlinear runs only)
    double sample_dt = 0.0;      // uniform spacing of `samples`
    std::vector<WaveFunction> samples;
    TrajectoryFlag flag = TrajectoryFlag::Ok;
    long accepted_steps = 0;
    long rejected_steps = 0;
    double min_dt = 0.0;         // smallest accepted step (nonlinear)
    double last_dt = 0.0;        // trial step at exit, for seamless resumption
};

// Horizon at which the exp(-2*gamma*t)-weighted integrand has decayed to
// roughly tail_target relative weight, clamped to [20, 400] / vt.
double default_horizon(const LatticeSpec& spec, double tail_target = 1e-6);

// Evolve i d/dt psi = H psi from psi0.time to ctrl.t_max with the one-step
// propagator exp(-i*H*dt) (scaling-and-squaring matrix exponential; no
// eigendecomposition, so exceptional points are harmless). H must match the
// lattice dimension; `kind` records which model H represents.
WaveTrajectory evolve_linear(const LatticeSpec& spec, TrajectoryKind kind,
                             const ComplexMatrix& h, const WaveFunction& psi0,
                             const StepControl& ctrl);

// Convenience wrappers assembling the balanced and lossy Hamiltonians.
WaveTrajectory evolve_pt(const LatticeSpec& spec, const WaveFunction& psi0,
                         const StepControl& ctrl);
WaveTrajectory evolve_lossy(const LatticeSpec& spec, const WaveFunction& psi0,
                            const StepControl& ctrl);

// Evolve i d/dt psi = (H0 + Gamma_pt) psi + eta * |psi|^2 psi with classical
// RK4 under step-doubling control: a step is accepted when the two-half-step
// and full-step results agree to rel_tol (relative, 2-norm), the half-step
// result is kept, the trial step halves on rejection and doubles when the
// estimate drops below rel_tol/100. Steps are clipped to the sample grid.
WaveTrajectory evolve_nonlinear(const LatticeSpec& spec, double eta,
                                const WaveFunction& psi0, const StepControl& ctrl);

struct IntensitySample {
    double t = 0.0;
    int cell = 0;
    Sublattice s = Sublattice::A;
    double intensity = 0.0;
};

// |psi|^2 per site and sample, ordered by time, then cell, then A before B.
std::vector<IntensitySample> intensity_map(const WaveTrajectory& traj);

}  // namespace ptwalk
