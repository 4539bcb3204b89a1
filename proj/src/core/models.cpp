// Copyright 2026 The qcoh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcoh/models.hpp"

#include "qcoh/coherence.hpp"
#include "qcoh/errors.hpp"
#include "qcoh/parallel.hpp"
#include "qcoh/rng.hpp"
#include "qcoh/trajectory.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace qcoh {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

// ---------------------------------------------------------------------------
// Central spin

void CentralSpinParams::validate() const {
    if (couplings.empty()) fail(ErrorKind::Domain, "central spin model needs at least one bath spin (M >= 1)");
    if (!finite(omega0)) fail(ErrorKind::Domain, "omega0 must be finite");
    for (double a : couplings)
        if (!finite(a)) fail(ErrorKind::Domain, "couplings must be finite");
    const double norm = std::norm(c1) + std::norm(c2);
    if (std::abs(norm - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "initial amplitudes not normalized: |c1|^2 + |c2|^2 = " << norm;
        fail(ErrorKind::Domain, os.str());
    }
}

Complex central_spin_coherence(const CentralSpinParams& p, double t) {
    p.validate();
    double envelope = 1.0;
    for (double a : p.couplings) envelope *= std::cos(0.5 * a * t);
    return p.c1 * std::conj(p.c2) * std::exp(-kI * (0.5 * p.omega0 * t)) * envelope;
}

double central_spin_decoherence_time(const CentralSpinParams& p) {
    p.validate();
    double sum = 0.0;
    for (double a : p.couplings) sum += a * a;
    if (sum == 0.0) fail(ErrorKind::UndefinedTimescale, "decoherence time undefined: all couplings are zero");
    return 1.0 / std::sqrt(sum);
}

Complex spin_echo_coherence(const CentralSpinParams& p, double t_e, double t) {
    p.validate();
    if (!(t_e > 0.0)) fail(ErrorKind::Domain, "echo pulse time must be positive");
    if (!(t >= 0.0)) fail(ErrorKind::Domain, "time must be >= 0");
    if (t <= t_e) return central_spin_coherence(p, t);
    // Per bath configuration the pulse swaps the amplitudes (up to a common
    // phase), so the phase accumulated before the pulse is unwound after it:
    // rho_12(t) = c2 c1* exp(-i omega0 (t - 2 t_e)/2) prod_k cos(A_k (t - 2 t_e)/2).
    const double tau = t - 2.0 * t_e;
    double envelope = 1.0;
    for (double a : p.couplings) envelope *= std::cos(0.5 * a * tau);
    return p.c2 * std::conj(p.c1) * std::exp(-kI * (0.5 * p.omega0 * tau)) * envelope;
}

ComplexMatrix central_spin_hamiltonian(const CentralSpinParams& p) {
    p.validate();
    const std::size_t m = p.couplings.size();
    const Index bath_dim = Index{1} << m;
    const ComplexMatrix sz = ops::spin_z();
    ComplexMatrix h = kron(0.5 * p.omega0 * sz, ops::identity(bath_dim));
    for (std::size_t k = 0; k < m; ++k) {
        // S_z on the central spin and on bath spin k.
        ComplexMatrix term = sz;
        for (std::size_t j = 0; j < m; ++j) term = kron(term, j == k ? sz : ops::identity(2));
        h += p.couplings[k] * term;
    }
    return h;
}

namespace {

ComplexMatrix central_spin_initial(const CentralSpinParams& p) {
    const Index bath_dim = Index{1} << p.couplings.size();
    ComplexVector psi(2);
    psi << p.c1, p.c2;
    return kron(psi * psi.adjoint(), ops::identity(bath_dim) / static_cast<double>(bath_dim));
}

Complex central_coherence_of(const ComplexMatrix& rho, std::size_t m) {
    std::vector<Index> dims(m + 1, 2);
    const std::size_t keep[] = {0};
    return partial_trace(rho, TensorFactorization(std::move(dims)), keep)(0, 1);
}

// (-i sigma_x (x) I) rho (-i sigma_x (x) I)^+ swaps the two central-spin blocks.
ComplexMatrix flip_central(const ComplexMatrix& rho) {
    const Index half = rho.rows() / 2;
    ComplexMatrix out(rho.rows(), rho.cols());
    out.topLeftCorner(half, half) = rho.bottomRightCorner(half, half);
    out.bottomRightCorner(half, half) = rho.topLeftCorner(half, half);
    out.topRightCorner(half, half) = rho.bottomLeftCorner(half, half);
    out.bottomLeftCorner(half, half) = rho.topRightCorner(half, half);
    return out;
}

// The joint Hamiltonian is diagonal in the product basis, so exp(-iHt) is a
// phase per basis state.
ComplexMatrix evolve_joint(const RealVector& energies, const ComplexMatrix& rho, double t) {
    const ComplexVector d = (energies.cast<Complex>() * Complex(0.0, -t)).array().exp();
    return d.asDiagonal() * rho * d.conjugate().asDiagonal();
}

RealVector joint_energies(const CentralSpinParams& p) {
    const ComplexMatrix h = central_spin_hamiltonian(p);
    if (max_abs(h - ComplexMatrix(h.diagonal().asDiagonal())) != 0.0)
        fail(ErrorKind::Model, "central spin hamiltonian is not diagonal in the product basis");
    return h.diagonal().real();
}

}  // namespace

std::vector<Complex> central_spin_coherence_exact(const CentralSpinParams& p, std::span<const double> times) {
    const RealVector e = joint_energies(p);
    const ComplexMatrix rho0 = central_spin_initial(p);
    std::vector<Complex> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(central_coherence_of(evolve_joint(e, rho0, t), p.couplings.size()));
    return out;
}

Complex central_spin_coherence_exact(const CentralSpinParams& p, double t) {
    const double ts[] = {t};
    return central_spin_coherence_exact(p, ts).front();
}

Complex spin_echo_coherence_exact(const CentralSpinParams& p, double t_e, double t) {
    if (!(t_e > 0.0)) fail(ErrorKind::Domain, "echo pulse time must be positive");
    if (!(t >= 0.0)) fail(ErrorKind::Domain, "time must be >= 0");
    if (t <= t_e) return central_spin_coherence_exact(p, t);
    const RealVector e = joint_energies(p);
    ComplexMatrix rho = evolve_joint(e, central_spin_initial(p), t_e);
    rho = evolve_joint(e, flip_central(rho), t - t_e);
    return central_coherence_of(rho, p.couplings.size());
}

// ---------------------------------------------------------------------------
// Disorder

Distribution Distribution::gaussian(double mean, double sigma) {
    if (!finite(mean) || !(sigma > 0.0) || !finite(sigma)) fail(ErrorKind::Domain, "gaussian disorder needs sigma > 0");
    return {Kind::Gaussian, mean, sigma};
}

Distribution Distribution::lorentzian(double center, double width) {
    if (!finite(center) || !(width > 0.0) || !finite(width))
        fail(ErrorKind::Domain, "lorentzian disorder needs width > 0");
    return {Kind::Lorentzian, center, width};
}

Distribution Distribution::uniform(double lo, double hi) {
    if (!finite(lo) || !finite(hi) || !(hi > lo)) fail(ErrorKind::Domain, "uniform disorder needs hi > lo");
    return {Kind::Uniform, lo, hi};
}

double Distribution::pdf(double w) const noexcept {
    switch (kind_) {
        case Kind::Gaussian: {
            const double z = (w - a_) / b_;
            return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * kPi));
        }
        case Kind::Lorentzian: {
            const double z = w - a_;
            return b_ / (kPi * (z * z + b_ * b_));
        }
        case Kind::Uniform:
            return (w >= a_ && w <= b_) ? 1.0 / (b_ - a_) : 0.0;
    }
    return 0.0;
}

Complex Distribution::characteristic(double s) const noexcept {
    switch (kind_) {
        case Kind::Gaussian:
            return std::exp(kI * (a_ * s)) * std::exp(-0.5 * b_ * b_ * s * s);
        case Kind::Lorentzian:
            return std::exp(kI * (a_ * s)) * std::exp(-b_ * std::abs(s));
        case Kind::Uniform:
            if (s == 0.0) return 1.0;
            return (std::exp(kI * (s * b_)) - std::exp(kI * (s * a_))) / (kI * s * (b_ - a_));
    }
    return 0.0;
}

double Distribution::sample(double u1, double u2) const noexcept {
    switch (kind_) {
        case Kind::Gaussian:
            // Box-Muller; 1 - u1 lies in (0, 1].
            return a_ + b_ * std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
        case Kind::Lorentzian:
            return a_ + b_ * std::tan(kPi * (u1 - 0.5));
        case Kind::Uniform:
            return a_ + (b_ - a_) * u1;
    }
    return 0.0;
}

void DisorderSpec::validate() const {
    const Index n = levels.size();
    if (n < 1) fail(ErrorKind::Domain, "disorder spec needs at least one level");
    if (slopes.size() != n) fail(ErrorKind::Shape, "disorder spec: slopes and levels differ in length");
    if (r.rows() != n || r.cols() != n) fail(ErrorKind::Shape, "disorder spec: initial matrix has wrong dimension");
    if (!levels.allFinite() || !slopes.allFinite()) fail(ErrorKind::Domain, "disorder spec: non-finite spectrum");
    QuantumState::mixed(r);  // hermitian, unit trace, positive
}

namespace {

struct GslWorkspace {
    explicit GslWorkspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)) {}
    ~GslWorkspace() { gsl_integration_workspace_free(w); }
    GslWorkspace(const GslWorkspace&) = delete;
    GslWorkspace& operator=(const GslWorkspace&) = delete;
    gsl_integration_workspace* w;
};

struct Integrand {
    const Distribution* dist;
    double delta;  // level-gap slope
    double gap;    // level gap at omega = 0
    double t;
    bool imag;
    // Lorentzian tail pieces, x >= 0 measured from the center.
    int sign;
};

void check_gsl(int status, double abserr, const char* what) {
    if (status != GSL_SUCCESS || !(abserr <= 1e-8)) {
        std::ostringstream os;
        os << "quadrature did not converge for " << what << ": " << gsl_strerror(status)
           << ", estimated error " << abserr;
        fail(ErrorKind::Numerical, os.str());
    }
}

constexpr double kQuadTol = 1e-10;
constexpr std::size_t kQuadLimit = 2000;

// int f(w) exp(-i (gap + delta w) t) dw on a finite window.
Complex quad_finite(const Distribution& d, double gap, double delta, double t, double lo, double hi) {
    GslWorkspace ws(kQuadLimit);
    Integrand in{&d, delta, gap, t, false, 0};
    gsl_function f;
    f.params = &in;
    f.function = [](double w, void* vp) {
        const auto* p = static_cast<const Integrand*>(vp);
        const double phase = -(p->gap + p->delta * w) * p->t;
        return p->dist->pdf(w) * (p->imag ? std::sin(phase) : std::cos(phase));
    };
    double re = 0.0, im = 0.0, err_re = 0.0, err_im = 0.0;
    int status = gsl_integration_qag(&f, lo, hi, kQuadTol, 0.0, kQuadLimit, GSL_INTEG_GAUSS61, ws.w, &re, &err_re);
    check_gsl(status, err_re, "Re gamma");
    in.imag = true;
    status = gsl_integration_qag(&f, lo, hi, kQuadTol, 0.0, kQuadLimit, GSL_INTEG_GAUSS61, ws.w, &im, &err_im);
    check_gsl(status, err_im, "Im gamma");
    return {re, im};
}

// Heavy-tailed case: fold onto [0, inf) about the center c and use the
// Fourier-integral routine on the even and odd parts.
Complex quad_lorentzian(const Distribution& d, double gap, double delta, double t) {
    const double c = d.first();
    const double s = -delta * t;  // exponent is i s w
    Integrand in{&d, delta, gap, t, false, +1};
    gsl_function f;
    f.params = &in;
    f.function = [](double x, void* vp) {
        const auto* p = static_cast<const Integrand*>(vp);
        const double c0 = p->dist->first();
        return p->dist->pdf(c0 + x) + p->sign * p->dist->pdf(c0 - x);
    };
    GslWorkspace ws(kQuadLimit), cycle(kQuadLimit);
    double even = 0.0, odd = 0.0, err_even = 0.0, err_odd = 0.0;
    if (s == 0.0) {
        int status = gsl_integration_qagiu(&f, 0.0, kQuadTol, 0.0, kQuadLimit, ws.w, &even, &err_even);
        check_gsl(status, err_even, "normalization");
    } else {
        const double as = std::abs(s);
        std::unique_ptr<gsl_integration_qawo_table, decltype(&gsl_integration_qawo_table_free)> cos_table(
            gsl_integration_qawo_table_alloc(as, 1.0, GSL_INTEG_COSINE, 50), &gsl_integration_qawo_table_free);
        int status = gsl_integration_qawf(&f, 0.0, kQuadTol, kQuadLimit, ws.w, cycle.w, cos_table.get(), &even,
                                          &err_even);
        check_gsl(status, err_even, "Re gamma");
        in.sign = -1;
        std::unique_ptr<gsl_integration_qawo_table, decltype(&gsl_integration_qawo_table_free)> sin_table(
            gsl_integration_qawo_table_alloc(as, 1.0, GSL_INTEG_SINE, 50), &gsl_integration_qawo_table_free);
        status = gsl_integration_qawf(&f, 0.0, kQuadTol, kQuadLimit, ws.w, cycle.w, sin_table.get(), &odd, &err_odd);
        check_gsl(status, err_odd, "Im gamma");
        if (s < 0.0) odd = -odd;
    }
    // int f(w) e^{i s w} dw = e^{i s c} (int_0^inf f_even cos(s x) + i int_0^inf f_odd sin(s x)).
    return std::exp(-kI * (gap * t)) * std::exp(kI * (s * c)) * Complex(even, odd);
}

}  // namespace

Complex disorder_gamma(const DisorderSpec& spec, Index m, Index n, double t, GammaRoute route) {
    if (m < 0 || n < 0 || m >= spec.dim() || n >= spec.dim()) fail(ErrorKind::Shape, "disorder_gamma: level index out of range");
    if (m == n) return 1.0;
    const double gap = spec.levels(m) - spec.levels(n);
    const double delta = spec.slopes(m) - spec.slopes(n);
    const Distribution& d = spec.distribution;
    if (route == GammaRoute::ClosedForm) return std::exp(-kI * (gap * t)) * d.characteristic(-delta * t);

    static const bool gsl_quiet = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)gsl_quiet;
    switch (d.kind()) {
        case Distribution::Kind::Gaussian: {
            const double half = 14.0 * d.second();
            return quad_finite(d, gap, delta, t, d.first() - half, d.first() + half);
        }
        case Distribution::Kind::Uniform:
            return quad_finite(d, gap, delta, t, d.first(), d.second());
        case Distribution::Kind::Lorentzian:
            return quad_lorentzian(d, gap, delta, t);
    }
    return 0.0;
}

DisorderAverage disorder_averaged_state(const DisorderSpec& spec, double t, const DisorderMethod& method) {
    spec.validate();
    const Index n = spec.dim();
    if (method.kind == DisorderMethod::Kind::ClosedForm) {
        ComplexMatrix rho(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) rho(i, j) = i == j ? spec.r(i, i) : spec.r(i, j) * disorder_gamma(spec, i, j, t);
        return {QuantumState::mixed(std::move(rho)), Eigen::MatrixXd::Zero(n, n), 0};
    }
    if (method.samples < 2) fail(ErrorKind::Configuration, "monte-carlo disorder average needs at least 2 samples");

    // Welford accumulation of the explicitly evolved realizations.
    CounterRng rng(method.seed, 0);
    ComplexMatrix mean = ComplexMatrix::Zero(n, n);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < method.samples; ++k) {
        const double u1 = rng.at(2 * k);
        const double u2 = rng.at(2 * k + 1);
        const double w = spec.distribution.sample(u1, u2);
        ComplexMatrix h = ComplexMatrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) h(i, i) = spec.levels(i) + spec.slopes(i) * w;
        const ComplexMatrix rho_w = conjugate_by(expm_hermitian_prop(h, t), spec.r);
        const ComplexMatrix delta = rho_w - mean;
        mean += delta / static_cast<double>(k + 1);
        const ComplexMatrix delta2 = rho_w - mean;
        m2 += (delta.real().cwiseProduct(delta2.real()) + delta.imag().cwiseProduct(delta2.imag()));
    }
    const double ns = static_cast<double>(method.samples);
    Eigen::MatrixXd se = (m2.cwiseMax(0.0) / (ns * (ns - 1.0))).cwiseSqrt();
    mean = 0.5 * (mean + mean.adjoint()).eval();
    return {QuantumState::mixed(std::move(mean), StateTolerance{1e-10, 1e-9, -1e-8}), std::move(se), method.samples};
}

// ---------------------------------------------------------------------------
// Three-level shelving

void ThreeLevelParams::validate() const {
    for (double v : {rabi, detuning, gamma_strong, gamma_shelve, gamma_deshelve})
        if (!finite(v)) fail(ErrorKind::Domain, "three-level parameters must be finite");
    if (gamma_strong < 0.0 || gamma_shelve < 0.0 || gamma_deshelve < 0.0)
        fail(ErrorKind::Domain, "three-level rates must be >= 0");
}

LindbladModel three_level_model(const ThreeLevelParams& p) {
    p.validate();
    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h(kGround, kExcited) = 0.5 * p.rabi;
    h(kExcited, kGround) = 0.5 * p.rabi;
    h(kExcited, kExcited) = p.detuning;
    std::vector<Channel> channels{
        {ops::transition(3, kGround, kExcited), p.gamma_strong},
        {ops::transition(3, kShelf, kExcited), p.gamma_shelve},
        {ops::transition(3, kGround, kShelf), p.gamma_deshelve},
    };
    return LindbladModel(std::move(h), std::move(channels));
}

double two_level_saturation(double rabi, double detuning, double gamma) {
    const double num = 0.25 * rabi * rabi;
    const double den = detuning * detuning + 0.25 * gamma * gamma + 0.5 * rabi * rabi;
    if (den == 0.0) return 0.0;
    return num / den;
}

namespace {

void finish_stats(PeriodStats& s) {
    const std::size_t n = s.durations.size();
    if (n == 0) return;
    double sum = 0.0;
    for (double d : s.durations) sum += d;
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double d : s.durations) ss += (d - s.mean) * (d - s.mean);
        s.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
}

}  // namespace

PeriodStats run_lengths(const std::vector<std::size_t>& counts, double bin, std::size_t dark_threshold, bool dark) {
    PeriodStats out;
    const std::size_t n = counts.size();
    std::size_t k = 0;
    while (k < n) {
        const bool is_dark = counts[k] <= dark_threshold;
        std::size_t end = k;
        while (end < n && (counts[end] <= dark_threshold) == is_dark) ++end;
        // Runs touching either end of the record have unknown length.
        if (is_dark == dark && k > 0 && end < n) out.durations.push_back(static_cast<double>(end - k) * bin);
        k = end;
    }
    finish_stats(out);
    return out;
}

DispersionTest poisson_dispersion(const std::vector<std::size_t>& counts) {
    DispersionTest out;
    const std::size_t n = counts.size();
    if (n < 2) return out;
    double sum = 0.0;
    for (auto c : counts) sum += static_cast<double>(c);
    out.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (auto c : counts) ss += (static_cast<double>(c) - out.mean) * (static_cast<double>(c) - out.mean);
    out.variance = ss / static_cast<double>(n - 1);
    out.dof = n - 1;
    if (out.mean <= 0.0) return out;
    out.fano = out.variance / out.mean;
    out.chi2 = ss / out.mean;
    const double lower = gsl_cdf_chisq_P(out.chi2, static_cast<double>(out.dof));
    const double upper = gsl_cdf_chisq_Q(out.chi2, static_cast<double>(out.dof));
    out.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
    out.consistent = out.p_value >= 0.01;
    return out;
}

TelegraphStats fluorescence_telegraph(const ThreeLevelParams& p, const TimeGrid& grid, std::size_t n_traj,
                                      std::uint64_t seed, double bin, std::size_t dark_threshold,
                                      std::size_t workers) {
    p.validate();
    grid.validate();
    if (n_traj < 1) fail(ErrorKind::Configuration, "telegraph statistics need n_traj >= 1");
    if (!(bin > 0.0)) fail(ErrorKind::Configuration, "bin width must be positive");
    const double bright_rate = p.gamma_strong * two_level_saturation(p.rabi, p.detuning, p.gamma_strong);
    const double expected = bright_rate * bin;
    if (expected < 5.0) {
        std::ostringstream os;
        os << "bin too small: expected bright-bin count " << expected << " < 5";
        fail(ErrorKind::Configuration, os.str());
    }
    const auto n_bins = static_cast<std::size_t>(std::floor((grid.t_end - grid.t_start) / bin));
    if (n_bins < 3) fail(ErrorKind::Configuration, "time grid shorter than three bins");

    const LindbladModel model = three_level_model(p);
    const JumpKernel kernel(model, grid.dt());
    const QuantumState psi0 = QuantumState::basis(3, kGround);
    TrajectoryOptions opts;
    opts.record_snapshots = false;

    TelegraphStats out;
    out.bin = bin;
    out.dark_threshold = dark_threshold;
    out.per_trajectory.resize(n_traj);
    parallel_for(n_traj, resolve_workers(workers), [&](std::size_t i) {
        const TrajectoryRecord rec = run_trajectory(psi0, kernel, grid, seed, i, opts);
        TelegraphTrajectory& tt = out.per_trajectory[i];
        tt.counts.assign(n_bins, 0);
        for (std::size_t k = 0; k < rec.jump_times.size(); ++k) {
            if (rec.jump_channels[k] != kStrongChannel) continue;
            const auto b = static_cast<std::size_t>(std::floor((rec.jump_times[k] - grid.t_start) / bin));
            if (b < n_bins) ++tt.counts[b];
        }
        tt.dark = run_lengths(tt.counts, bin, dark_threshold, true);
        tt.bright = run_lengths(tt.counts, bin, dark_threshold, false);
        std::size_t dark_bins = 0;
        for (auto c : tt.counts) dark_bins += c <= dark_threshold ? 1 : 0;
        tt.dark_fraction = static_cast<double>(dark_bins) / static_cast<double>(n_bins);
    });

    out.pooled_counts.assign(n_bins, 0);
    double dark_fraction = 0.0;
    for (const auto& tt : out.per_trajectory) {
        out.dark.durations.insert(out.dark.durations.end(), tt.dark.durations.begin(), tt.dark.durations.end());
        out.bright.durations.insert(out.bright.durations.end(), tt.bright.durations.begin(), tt.bright.durations.end());
        for (std::size_t b = 0; b < n_bins; ++b) out.pooled_counts[b] += tt.counts[b];
        dark_fraction += tt.dark_fraction;
    }
    out.dark_fraction = dark_fraction / static_cast<double>(n_traj);
    finish_stats(out.dark);
    finish_stats(out.bright);
    out.pooled_dispersion = poisson_dispersion(out.pooled_counts);
    return out;
}

// ---------------------------------------------------------------------------
// Damped oscillator

double DampedOscParams::max_alpha() const noexcept { return std::max(std::abs(alpha1), std::abs(alpha2)); }

void DampedOscParams::validate() const {
    for (double v : {omega, gamma, n_thermal, alpha1.real(), alpha1.imag(), alpha2.real(), alpha2.imag()})
        if (!finite(v)) fail(ErrorKind::Domain, "oscillator parameters must be finite");
    if (gamma < 0.0) fail(ErrorKind::Domain, "damping rate must be >= 0");
    if (n_thermal < 0.0) fail(ErrorKind::Domain, "thermal occupation must be >= 0");
    const double a = max_alpha();
    const double needed = 8.0 * (a * a + 1.0);
    if (static_cast<double>(n_fock) < needed) {
        std::ostringstream os;
        os << "Fock truncation " << n_fock << " too small: need at least 8 (max|alpha|^2 + 1) = " << needed;
        fail(ErrorKind::Truncation, os.str());
    }
}

LindbladModel damped_oscillator_model(const DampedOscParams& p) {
    p.validate();
    const ComplexMatrix a = ops::annihilation(p.n_fock);
    ComplexMatrix h = p.omega * (a.adjoint() * a);
    std::vector<Channel> channels{{a, p.gamma * (p.n_thermal + 1.0)}, {a.adjoint(), p.gamma * p.n_thermal}};
    return LindbladModel(std::move(h), std::move(channels));
}

ComplexVector coherent_state(Index n_fock, Complex alpha) {
    ComplexVector v(n_fock);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (Index k = 1; k < n_fock; ++k) v(k) = v(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    return v / v.norm();
}

QuantumState two_packet_state(const DampedOscParams& p) {
    p.validate();
    ComplexVector v = coherent_state(p.n_fock, p.alpha1) + coherent_state(p.n_fock, p.alpha2);
    const double norm = v.norm();
    if (norm == 0.0) fail(ErrorKind::Domain, "packet superposition vanishes");
    return QuantumState::pure(v / norm);
}

std::vector<double> default_position_grid(const DampedOscParams& p, std::size_t points) {
    if (points < 2) fail(ErrorKind::Configuration, "position grid needs at least 2 points");
    const double half = p.max_alpha() * std::sqrt(2.0) + 5.0;
    std::vector<double> x(points);
    for (std::size_t i = 0; i < points; ++i)
        x[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
    return x;
}

std::vector<double> position_density(const ComplexMatrix& rho, const std::vector<double>& x) {
    const Index n = rho.rows();
    std::vector<double> out(x.size());
    RealVector phi(n);
    const double norm0 = std::pow(kPi, -0.25);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        // Normalized Hermite functions by their three-term recurrence.
        phi(0) = norm0 * std::exp(-0.5 * xi * xi);
        if (n > 1) phi(1) = std::sqrt(2.0) * xi * phi(0);
        for (Index k = 1; k + 1 < n; ++k)
            phi(k + 1) = std::sqrt(2.0 / static_cast<double>(k + 1)) * xi * phi(k) -
                         std::sqrt(static_cast<double>(k) / static_cast<double>(k + 1)) * phi(k - 1);
        const ComplexVector pc = phi.cast<Complex>();
        out[i] = pc.dot(rho * pc).real();
    }
    return out;
}

double fringe_visibility(const std::vector<double>& x, const std::vector<double>& p, double half_width) {
    if (x.size() != p.size()) fail(ErrorKind::Shape, "fringe_visibility: grid and density differ in length");
    double pmax = -1.0, pmin = -1.0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (std::abs(x[i]) > half_width) continue;
        if (p[i] > p[i - 1] && p[i] >= p[i + 1]) pmax = std::max(pmax, p[i]);
        if (p[i] < p[i - 1] && p[i] <= p[i + 1]) pmin = pmin < 0.0 ? p[i] : std::min(pmin, p[i]);
    }
    if (pmax < 0.0 || pmin < 0.0 || pmax + pmin <= 0.0) return 0.0;
    return (pmax - pmin) / (pmax + pmin);
}

std::vector<double> merge_times(const DampedOscParams& p, double t_start, double t_end) {
    // Centres sqrt(2) Re(alpha_j e^{-i omega t}) coincide when
    // Re((alpha1 - alpha2) e^{-i omega t}) = 0.
    const Complex diff = p.alpha1 - p.alpha2;
    std::vector<double> out;
    if (std::abs(diff) == 0.0 || !(p.omega > 0.0)) return out;
    const double phase0 = std::arg(diff) + 0.5 * kPi;
    const double k0 = std::ceil((p.omega * t_start - phase0) / kPi - 1e-12);
    for (double k = k0;; k += 1.0) {
        const double t = (phase0 + k * kPi) / p.omega;
        if (t > t_end + 1e-12) break;
        if (t >= t_start - 1e-12) out.push_back(t);
    }
    return out;
}

DampedOscResult damped_osc_scenario(const DampedOscParams& p, const TimeGrid& grid, std::size_t x_points) {
    const LindbladModel model = damped_oscillator_model(p);
    const QuantumState psi0 = two_packet_state(p);
    const StateSeries series = integrate_master(psi0, model, grid);
    DampedOscResult out;
    out.x = default_position_grid(p, x_points);
    const ComplexMatrix a = ops::annihilation(p.n_fock);
    const ComplexMatrix number = a.adjoint() * a;
    const Index top = p.n_fock - 1;
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const ComplexMatrix rho = series.states[k].density();
        const double top_pop = rho(top, top).real();
        if (top_pop > 1e-6) {
            std::ostringstream os;
            os << "Fock truncation inadequate: top level population " << top_pop << " at t = " << series.times[k];
            fail(ErrorKind::Truncation, os.str());
        }
        OscFrame f;
        f.t = series.times[k];
        f.density = position_density(rho, out.x);
        f.trace = rho.trace().real();
        f.purity = purity(series.states[k]);
        f.mean_number = (number * rho).trace().real();
        out.frames.push_back(std::move(f));
    }
    return out;
}

}  // namespace qcoh
