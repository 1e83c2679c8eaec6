// lattice.cpp — dimer-chain geometry, Hamiltonian builders, localized initial states
#include "ptwalk/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptwalk {

void LatticeSpec::validate() const {
    if (n_dimers < 3 || n_dimers % 2 == 0)
        throw std::invalid_argument("n_dimers must be odd and >= 3, got " + std::to_string(n_dimers));
    if (!std::isfinite(va) || va < 0.0)
        throw std::invalid_argument("va must be finite and >= 0, got " + std::to_string(va));
    if (!std::isfinite(vb) || vb < 0.0)
        throw std::invalid_argument("vb must be finite and >= 0, got " + std::to_string(vb));
    if (va + vb <= 0.0)
        throw std::invalid_argument("va + vb must be positive");
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("gamma must be finite and >= 0, got " + std::to_string(gamma));
}

LatticeSpec spec_from_ratios(double va_over_vt, double gamma_over_vt,
                             int n_dimers, Boundary boundary) {
    LatticeSpec spec;
    spec.n_dimers = n_dimers;
    spec.va = va_over_vt;
    spec.vb = 1.0 - va_over_vt;
    spec.gamma = gamma_over_vt;
    spec.boundary = boundary;
    spec.validate();
    return spec;
}

void BlochState::validate() const {
    if (!std::isfinite(theta) || theta < 0.0 || theta > std::numbers::pi)
        throw std::invalid_argument("theta out of [0, pi], got " + std::to_string(theta));
    if (!std::isfinite(phi) || phi < 0.0 || phi >= 2.0 * std::numbers::pi)
        throw std::invalid_argument("phi out of [0, 2*pi), got " + std::to_string(phi));
}

BlochState bloch_state(double theta, double phi) {
    if (!std::isfinite(phi))
        throw std::invalid_argument("phi must be finite");
    const double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(phi, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    if (wrapped >= two_pi) wrapped = 0.0;  // guard against fmod rounding to 2*pi
    BlochState b{theta, wrapped};
    b.validate();
    return b;
}

int site_index(const LatticeSpec& spec, int cell, Sublattice s) {
    const int m = spec.half_width();
    if (cell < -m || cell > m)
        throw std::out_of_range("cell " + std::to_string(cell) + " outside [-" +
                                std::to_string(m) + ", " + std::to_string(m) + "]");
    return 2 * (cell + m) + (s == Sublattice::B ? 1 : 0);
}

ComplexMatrix build_h0(const LatticeSpec& spec) {
    spec.validate();
    const int m = spec.half_width();
    ComplexMatrix h = ComplexMatrix::Zero(spec.sites(), spec.sites());
    for (int cell = -m; cell <= m; ++cell) {
        const int a = site_index(spec, cell, Sublattice::A);
        const int b = site_index(spec, cell, Sublattice::B);
        h(a, b) = spec.va;
        h(b, a) = spec.va;
        if (cell < m) {
            const int b_next = site_index(spec, cell + 1, Sublattice::B);
            h(a, b_next) = spec.vb;
            h(b_next, a) = spec.vb;
        }
    }
    if (spec.boundary == Boundary::Periodic) {
        const int a_last = site_index(spec, m, Sublattice::A);
        const int b_first = site_index(spec, -m, Sublattice::B);
        h(a_last, b_first) += spec.vb;
        h(b_first, a_last) += spec.vb;
    }
    return h;
}

ComplexMatrix build_gamma_pt(const LatticeSpec& spec) {
    spec.validate();
    const int m = spec.half_width();
    ComplexMatrix g = ComplexMatrix::Zero(spec.sites(), spec.sites());
    for (int cell = -m; cell <= m; ++cell) {
        g(site_index(spec, cell, Sublattice::A), site_index(spec, cell, Sublattice::A)) =
            I_UNIT * spec.gamma;
        g(site_index(spec, cell, Sublattice::B), site_index(spec, cell, Sublattice::B)) =
            -I_UNIT * spec.gamma;
    }
    return g;
}

ComplexMatrix build_gamma_lossy(const LatticeSpec& spec) {
    spec.validate();
    const int m = spec.half_width();
    ComplexMatrix g = ComplexMatrix::Zero(spec.sites(), spec.sites());
    for (int cell = -m; cell <= m; ++cell)
        g(site_index(spec, cell, Sublattice::B), site_index(spec, cell, Sublattice::B)) =
            -2.0 * I_UNIT * spec.gamma;
    return g;
}

WaveFunction localized_state(const LatticeSpec& spec, int cell, const BlochState& bloch) {
    spec.validate();
    bloch.validate();
    WaveFunction psi;
    psi.amps = ComplexVector::Zero(spec.sites());
    psi.amps(site_index(spec, cell, Sublattice::A)) = std::cos(0.5 * bloch.theta);
    psi.amps(site_index(spec, cell, Sublattice::B)) =
        std::exp(I_UNIT * bloch.phi) * std::sin(0.5 * bloch.theta);
    psi.time = 0.0;
    return psi;
}

}  // namespace ptwalk
