// sweep.hpp — phase classification and parallel parameter-grid drivers
#pragma once

#include "ptwalk/observables.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ptwalk {

enum class Phase { PTSymmetric, PTBroken, FullyBroken };

const char* phase_name(Phase p);

struct PhasePoint {
    double va = 0.0;
    double vb = 0.0;
    double gamma = 0.0;
    Phase phase = Phase::PTSymmetric;
    bool on_boundary = false;  // within 1e-9*vt of a threshold
};

// Closed-form phase diagram: symmetric below gamma = |va - vb|, fully broken
// above gamma = va + vb, broken in between. Points within 1e-9*vt of a
// threshold are assigned to the more-broken side and flagged on_boundary.
PhasePoint classify_phase(const LatticeSpec& spec);

// Uniformly spaced axis, inclusive of both ends.
struct AxisSpec {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    void validate() const;
    std::vector<double> values() const;
};

struct SweepOptions {
    int n_dimers = 41;
    Boundary boundary = Boundary::Open;
    double tol = 1e-4;      // settling tolerance for each displacement integral
    StepControl ctrl{};     // dt / t_max of 0 resolve per grid point
    int jobs = 0;           // worker threads; 0 -> hardware concurrency
};

struct SweepRow {
    double va = 0.0;
    double vb = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    double eta = 0.0;
    double mean_disp = 0.0;
    double tail = 0.0;
    bool converged = false;
    std::vector<double> extras;  // aligned with SweepTable::extra_columns
    Phase phase = Phase::PTSymmetric;
    bool on_boundary = false;
    std::string flag = "ok";
};

struct SweepTable {
    std::vector<std::pair<std::string, std::string>> config;  // echoed into the header
    std::vector<std::string> extra_columns;
    std::vector<SweepRow> rows;
};

// Couplings swept at fixed gamma (units of vt = 1: va = x, vb = 1 - x), one row
// per (x, initial state), x outermost. Linear model; extra column `analytic`
// holds the closed-form value (nan where it is undefined).
SweepTable sweep_coupling(const AxisSpec& va_axis, double gamma,
                          const std::vector<BlochState>& states,
                          const SweepOptions& opt);

// Coupling x gain/loss grid for one initial state, x outermost. Extras:
// `baseline` (same point, phi = 0) and `drift` (row value minus baseline, nan
// unless both converged).
SweepTable sweep_gamma_map(const AxisSpec& va_axis, const AxisSpec& gamma_axis,
                           const BlochState& state, const SweepOptions& opt);

// Same grid for the Kerr model at strength eta. Extras: `linear_disp` (the
// eta = 0 value on the same lattice) and `delta` (nonlinear minus linear).
// Each point integrates until the displacement settles, the trajectory hits a
// hard stop (divergence, stall, step budget), or the projected cost of
// settling exceeds the intensity cap / step budget; unsettled rows are
// flagged, never dropped.
SweepTable sweep_nonlinear(const AxisSpec& va_axis, const AxisSpec& gamma_axis,
                           double eta, const BlochState& state,
                           const SweepOptions& opt);

// CSV with "# key=value" header comments; fixed columns
// v_a,v_b,gamma,theta,phi,eta,mean_disp,tail,converged[,extras...],phase,flag.
void write_csv(std::ostream& os, const SweepTable& table);

// Serialized JSON digest: config echo, row/flag counts, wall time.
std::string summary_json(const SweepTable& table, double wall_seconds);

}  // namespace ptwalk
