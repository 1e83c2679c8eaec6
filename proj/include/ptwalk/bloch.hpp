// bloch.hpp — momentum-space analysis: bands, winding, closed-form displacement
#pragma once

#include "ptwalk/lattice.hpp"

namespace ptwalk {

// Two-band Bloch Hamiltonian h(k) = hx*sx + hy*sy + i*gamma*sz, where
// hx + i*hy = va + vb*exp(i*k).
struct BlochHamiltonian {
    double k = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    double gamma = 0.0;
    Eigen::Matrix2cd matrix() const;
};

BlochHamiltonian bloch_hamiltonian(const LatticeSpec& spec, double k);

// Band pair +/- sqrt(va^2 + vb^2 + 2*va*vb*cos k - gamma^2); purely real or
// purely imaginary depending on the sign under the root.
struct BandPair {
    Complex plus;
    Complex minus;
};

BandPair band_eigenvalues(const LatticeSpec& spec, double k);

// Largest imaginary part of any band eigenvalue over the Brillouin zone:
// sqrt(max(0, gamma^2 - (va - vb)^2)).
double max_imag_eigenvalue(const LatticeSpec& spec);

// Gain/loss strength at which bands first touch (|va - vb|) and at which the
// whole zone has complex bands (va + vb).
double pt_threshold(const LatticeSpec& spec);
double full_breaking_scale(const LatticeSpec& spec);

// Polar form va + vb*exp(i*k) = u * exp(i*theta), u > 0, theta in (-pi, pi].
// Throws std::domain_error at the branch point (u = 0, only at va = vb, k = pi).
struct PolarFactor {
    double u = 0.0;
    double theta = 0.0;
};

PolarFactor polar_factor(const LatticeSpec& spec, double k);

// One-cell Bloch propagator exp(-i*h(k)*t), evaluated through even functions of
// lambda^2 so exceptional points need no special casing.
Eigen::Matrix2cd propagator_k(const LatticeSpec& spec, double k, double t);

// Real scalar pair (g_a, g_b): the B-sublattice response of exp(-i*h(k)*t) to
// A- and B-concentrated initial spinors, up to the phase split
// [G psi0]_B = -i*cos(theta/2)*g_a*e^{i*theta_k} + sin(theta/2)*e^{i*phi}*g_b.
struct GPair {
    double g_a = 0.0;
    double g_b = 0.0;
};

GPair g_functions(const LatticeSpec& spec, double k, double t);

// Winding of va + vb*exp(i*k) around the origin, from unwrapped phase
// increments on a uniform k-grid (grid doubled until every increment is safely
// below pi/2). well_defined goes false within 1e-9*vt of the branch point.
struct WindingResult {
    int winding = 0;
    bool well_defined = false;
};

WindingResult winding_number(const LatticeSpec& spec, int n_k = 2048);

// Inverse effective mass min(va, vb^2/va) of the quasiclassical drift term;
// throws std::domain_error when va = 0.
double effective_mass_inverse(const LatticeSpec& spec);

// Same quantity from the quadrature -2 * (1/2pi) \oint dk (d_k u) sin(theta_k),
// with the derivative taken by central differences on a uniform grid.
double effective_mass_inverse_quadrature(const LatticeSpec& spec, int n_k = 8192);

// Closed-form mean displacement: cos^2(theta/2)*winding +
// sin(theta)*sin(phi)*mu_inverse/(4*gamma). Requires gamma > 0.
double analytic_mean_disp(const LatticeSpec& spec, const BlochState& bloch);

// Shared result shape for every mean-displacement route.
struct MeanDispResult {
    double value = 0.0;
    double tail_estimate = 0.0;  // bound on the neglected time tail (inf if unbounded)
    double horizon = 0.0;        // time actually integrated over
    bool converged = false;
    double imag_residue = 0.0;   // |Im| of the k-space accumulator (that route only)
};

struct QuadratureControl {
    double dt = 0.0;        // time step; 0 -> 0.02 / (va + vb + gamma)
    double t_cap = 400.0;   // hard ceiling on the integration horizon
    double tol = 1e-4;      // settling tolerance for the time integral
};

// Mean displacement for the infinite chain: time integral of the weighted
// k-space current, trapezoid in k (n_k uniform points), Simpson in time with
// block-wise settling. Requires gamma > 0.
MeanDispResult kspace_mean_disp(const LatticeSpec& spec, const BlochState& bloch,
                                int n_k = 2048, const QuadratureControl& ctrl = {});

}  // namespace ptwalk
