// bloch.cpp — momentum-space analysis: bands, winding, closed-form displacement
#include "ptwalk/bloch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "window_integrator.hpp"

namespace ptwalk {

namespace {

constexpr double kPi = std::numbers::pi;

// cos(lambda*t) and sin(lambda*t)/lambda as functions of lambda^2, valid for
// either sign (trigonometric above, hyperbolic below zero). The series branch
// keeps both exact through lambda^2 = 0, where the pair degenerates to (1, t).
struct TrigPair {
    double c;
    double s;
};

TrigPair trig_pair(double lambda2, double t) {
    const double x = lambda2 * t * t;  // (lambda*t)^2, sign carries the phase type
    if (std::abs(x) < 1e-8) {          // |lambda*t| < 1e-4: fourth-order series
        return {1.0 - x / 2.0 + x * x / 24.0, t * (1.0 - x / 6.0 + x * x / 120.0)};
    }
    if (lambda2 > 0.0) {
        const double l = std::sqrt(lambda2);
        return {std::cos(l * t), std::sin(l * t) / l};
    }
    const double kap = std::sqrt(-lambda2);
    return {std::cosh(kap * t), std::sinh(kap * t) / kap};
}

double lambda_squared(const LatticeSpec& spec, double k) {
    return spec.va * spec.va + spec.vb * spec.vb +
           2.0 * spec.va * spec.vb * std::cos(k) - spec.gamma * spec.gamma;
}

}  // namespace

Eigen::Matrix2cd BlochHamiltonian::matrix() const {
    Eigen::Matrix2cd m;
    m << I_UNIT * gamma, Complex(hx, -hy), Complex(hx, hy), -I_UNIT * gamma;
    return m;
}

BlochHamiltonian bloch_hamiltonian(const LatticeSpec& spec, double k) {
    spec.validate();
    return {k, spec.va + spec.vb * std::cos(k), spec.vb * std::sin(k), spec.gamma};
}

BandPair band_eigenvalues(const LatticeSpec& spec, double k) {
    spec.validate();
    const double l2 = lambda_squared(spec, k);
    const Complex plus = l2 >= 0.0 ? Complex(std::sqrt(l2), 0.0)
                                   : Complex(0.0, std::sqrt(-l2));
    return {plus, -plus};
}

double max_imag_eigenvalue(const LatticeSpec& spec) {
    spec.validate();
    const double gap = spec.va - spec.vb;
    return std::sqrt(std::max(0.0, spec.gamma * spec.gamma - gap * gap));
}

double pt_threshold(const LatticeSpec& spec) {
    spec.validate();
    return std::abs(spec.va - spec.vb);
}

double full_breaking_scale(const LatticeSpec& spec) {
    spec.validate();
    return spec.va + spec.vb;
}

PolarFactor polar_factor(const LatticeSpec& spec, double k) {
    spec.validate();
    const double re = spec.va + spec.vb * std::cos(k);
    const double im = spec.vb * std::sin(k);
    const double u = std::hypot(re, im);
    if (u <= 1e-13 * spec.vt())
        throw std::domain_error("va + vb*exp(i*k) vanishes: polar phase undefined");
    return {u, std::atan2(im, re)};
}

Eigen::Matrix2cd propagator_k(const LatticeSpec& spec, double k, double t) {
    const BlochHamiltonian h = bloch_hamiltonian(spec, k);
    const TrigPair ts = trig_pair(lambda_squared(spec, k), t);
    Eigen::Matrix2cd g = ts.c * Eigen::Matrix2cd::Identity();
    g -= I_UNIT * ts.s * h.matrix();
    return g;
}

GPair g_functions(const LatticeSpec& spec, double k, double t) {
    spec.validate();
    const PolarFactor pf = polar_factor(spec, k);
    const TrigPair ts = trig_pair(lambda_squared(spec, k), t);
    return {pf.u * ts.s, ts.c - spec.gamma * ts.s};
}

namespace {

// Phase increment of va + vb*exp(i*k) across [k0, k1], bisected until each
// piece stays below pi/2 so the short-arc branch of arg is unambiguous.
double phase_increment(const LatticeSpec& spec, double k0, double k1,
                       const Complex& z0, const Complex& z1, int depth) {
    const double inc = std::arg(z1 * std::conj(z0));
    if (std::abs(inc) <= kPi / 2.0) return inc;
    if (depth <= 0)
        throw std::domain_error("phase increment refinement exhausted near branch point");
    const double km = 0.5 * (k0 + k1);
    const Complex zm(spec.va + spec.vb * std::cos(km), spec.vb * std::sin(km));
    return phase_increment(spec, k0, km, z0, zm, depth - 1) +
           phase_increment(spec, km, k1, zm, z1, depth - 1);
}

}  // namespace

WindingResult winding_number(const LatticeSpec& spec, int n_k) {
    spec.validate();
    if (n_k < 64) throw std::invalid_argument("winding grid needs n_k >= 64");
    // Closest approach of the loop to the origin is |va - vb| at k = pi.
    if (std::abs(spec.va - spec.vb) <= 1e-9 * spec.vt()) return {0, false};
    const double h = 2.0 * kPi / n_k;
    double sum = 0.0;
    Complex z0(spec.va + spec.vb, 0.0);
    try {
        for (int j = 0; j < n_k; ++j) {
            const double k1 = (j + 1) * h;
            const Complex z1(spec.va + spec.vb * std::cos(k1), spec.vb * std::sin(k1));
            sum += phase_increment(spec, j * h, k1, z0, z1, 48);
            z0 = z1;
        }
    } catch (const std::domain_error&) {
        return {0, false};
    }
    const double turns = sum / (2.0 * kPi);
    const int w = static_cast<int>(std::lround(turns));
    if (std::abs(turns - w) > 1e-6) return {0, false};
    return {w, true};
}

double effective_mass_inverse(const LatticeSpec& spec) {
    spec.validate();
    if (spec.va <= 0.0)
        throw std::domain_error("effective mass undefined at va = 0");
    return std::min(spec.va, spec.vb * spec.vb / spec.va);
}

double effective_mass_inverse_quadrature(const LatticeSpec& spec, int n_k) {
    spec.validate();
    if (n_k < 64) throw std::invalid_argument("quadrature grid needs n_k >= 64");
    const double h = 2.0 * kPi / n_k;
    std::vector<double> u(n_k), sin_theta(n_k);
    for (int j = 0; j < n_k; ++j) {
        const PolarFactor pf = polar_factor(spec, j * h);
        u[j] = pf.u;
        sin_theta[j] = std::sin(pf.theta);
    }
    double sum = 0.0;
    for (int j = 0; j < n_k; ++j) {
        const double du = (u[(j + 1) % n_k] - u[(j + n_k - 1) % n_k]) / (2.0 * h);
        sum += du * sin_theta[j];
    }
    return -2.0 * sum / n_k;
}

double analytic_mean_disp(const LatticeSpec& spec, const BlochState& bloch) {
    spec.validate();
    bloch.validate();
    if (spec.gamma <= 0.0)
        throw std::domain_error("mean displacement requires gamma > 0");
    const WindingResult w = winding_number(spec);
    if (!w.well_defined)
        throw std::domain_error("winding undefined: couplings at the branch point va = vb");
    // va = 0 is the tight-dimer limit of the drift coefficient, min(va, vb^2/va) -> 0.
    const double mu_inv = spec.va > 0.0 ? effective_mass_inverse(spec) : 0.0;
    const double c = std::cos(0.5 * bloch.theta);
    return c * c * w.winding +
           std::sin(bloch.theta) * std::sin(bloch.phi) * mu_inv / (4.0 * spec.gamma);
}

MeanDispResult kspace_mean_disp(const LatticeSpec& spec, const BlochState& bloch,
                                int n_k, const QuadratureControl& ctrl) {
    spec.validate();
    bloch.validate();
    if (spec.gamma <= 0.0)
        throw std::domain_error("mean displacement requires gamma > 0");
    if (n_k < 64) throw std::invalid_argument("k-space route needs n_k >= 64");
    if (ctrl.tol <= 0.0) throw std::invalid_argument("tol must be positive");

    const double dt = ctrl.dt > 0.0 ? ctrl.dt : 0.02 / (spec.vt() + spec.gamma);
    const double margin = spec.gamma - max_imag_eigenvalue(spec);
    double t_limit = ctrl.t_cap;
    if (margin > 1e-12)
        t_limit = std::min(t_limit, std::log(1e10) / (2.0 * margin));

    const double h = 2.0 * kPi / n_k;
    std::vector<double> lam2(n_k);
    std::vector<Complex> off(n_k);  // hx + i*hy per grid point
    for (int j = 0; j < n_k; ++j) {
        const double k = j * h;
        lam2[j] = lambda_squared(spec, k);
        off[j] = Complex(spec.va + spec.vb * std::cos(k), spec.vb * std::sin(k));
    }
    const Complex psi_a(std::cos(0.5 * bloch.theta), 0.0);
    const Complex psi_b = std::exp(I_UNIT * bloch.phi) * std::sin(0.5 * bloch.theta);

    // Work in the lossy gauge: w(k,t) = exp(-gamma*t) * [G(k,t) psi0]_B already
    // carries the full exp(-2*gamma*t) weight once |w|^2-type products form, so
    // every quantity below stays bounded even deep in the broken phase.
    detail::WindowIntegrator integ(dt, 1.0 / spec.gamma, ctrl.tol, margin);
    double residue = 0.0;  // trapezoid sum of the should-vanish quadrature part
    double prev_residue_f = 0.0;
    std::vector<Complex> w(n_k);
    bool settled = false;
    double t = 0.0;
    for (long step = 0;; ++step) {
        t = step * dt;
        const double damp = std::exp(-spec.gamma * t);
        for (int j = 0; j < n_k; ++j) {
            const TrigPair ts = trig_pair(lam2[j], t);
            w[j] = damp * (-I_UNIT * ts.s * off[j] * psi_a + (ts.c - spec.gamma * ts.s) * psi_b);
        }
        Complex s_k(0.0, 0.0);
        for (int j = 0; j < n_k; ++j) {
            const Complex dw = (w[(j + 1) % n_k] - w[(j + n_k - 1) % n_k]) / (2.0 * h);
            s_k += std::conj(w[j]) * dw;
        }
        s_k /= static_cast<double>(n_k);
        const Complex contrib = -4.0 * I_UNIT * spec.gamma * s_k;
        if (step > 0) residue += 0.5 * dt * (prev_residue_f + contrib.imag());
        prev_residue_f = contrib.imag();
        if (integ.add(contrib.real())) {
            settled = true;
            break;
        }
        if (t >= t_limit) break;
    }
    if (!settled) integ.flush();

    MeanDispResult out;
    out.value = integ.total();
    out.horizon = t;
    out.tail_estimate = integ.tail_bound();
    out.converged = settled ||
                    out.tail_estimate <= ctrl.tol * std::max(1.0, std::abs(out.value));
    out.imag_residue = std::abs(residue);
    return out;
}

}  // namespace ptwalk
