// lattice.hpp — dimer-chain geometry, Hamiltonian builders, localized initial states
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ptwalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex I_UNIT{0.0, 1.0};

enum class Boundary { Open, Periodic };
enum class Sublattice { A, B };

// Chain of n_dimers two-site cells labeled m = -M..M (n_dimers = 2M+1, odd).
// va couples A and B inside a cell, vb couples (m,A) to (m+1,B); gamma is the
// gain/loss amplitude (+i*gamma on A, -i*gamma on B in the balanced model).
struct LatticeSpec {
    int n_dimers = 41;
    double va = 0.25;
    double vb = 0.75;
    double gamma = 0.5;
    Boundary boundary = Boundary::Open;

    void validate() const;  // throws std::invalid_argument naming the bad field
    int half_width() const { return (n_dimers - 1) / 2; }
    int sites() const { return 2 * n_dimers; }
    double vt() const { return va + vb; }  // characteristic coupling scale
};

// Build a spec in units where va + vb = 1.
LatticeSpec spec_from_ratios(double va_over_vt, double gamma_over_vt,
                             int n_dimers = 41, Boundary boundary = Boundary::Open);

// Superposition cos(theta/2)|A> + e^{i phi} sin(theta/2)|B> within one cell.
struct BlochState {
    double theta = 0.0;  // polar angle in [0, pi]
    double phi = 0.0;    // azimuth in [0, 2*pi)
    void validate() const;
};

// Canonicalize angles: wraps phi into [0, 2*pi), rejects theta outside [0, pi].
BlochState bloch_state(double theta, double phi);

struct WaveFunction {
    ComplexVector amps;  // length 2*n_dimers, cell-major, A before B
    double time = 0.0;
};

// Flat storage index of site (cell, s); cell must lie in [-M, M].
int site_index(const LatticeSpec& spec, int cell, Sublattice s);

// Hermitian hopping part (couplings only, no gain/loss).
ComplexMatrix build_h0(const LatticeSpec& spec);

// Balanced gain/loss diagonal: +i*gamma on A sites, -i*gamma on B sites.
ComplexMatrix build_gamma_pt(const LatticeSpec& spec);

// Purely lossy diagonal: -2i*gamma on B sites (the gauge-shifted twin of the
// balanced model, Gamma_lossy = Gamma_pt - i*gamma*Identity).
ComplexMatrix build_gamma_lossy(const LatticeSpec& spec);

// Unit-norm state occupying a single cell with the given internal superposition.
WaveFunction localized_state(const LatticeSpec& spec, int cell, const BlochState& bloch);

}  // namespace ptwalk
