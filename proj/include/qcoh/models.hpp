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

#pragma once

// Concrete open-system scenarios:
//  - central spin with an Ising-coupled spin bath (pure dephasing, spin echo)
//  - static-disorder ensemble dephasing
//  - three-level electron shelving (fluorescence telegraph)
//  - damped harmonic oscillator with a two-packet superposition

#include "qcoh/evolution.hpp"
#include "qcoh/hilbert.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qcoh {

// ---------------------------------------------------------------------------
// Central spin
//
// H = (omega0/2) S_z + sum_k A_k S_z (x) S_z^(k),  S_z = diag(1/2, -1/2),
// bath prepared in I/2^M, central spin in c1|up> + c2|down>.

struct CentralSpinParams {
    double omega0 = 0.0;
    std::vector<double> couplings;
    Complex c1{1.0 / 1.4142135623730951, 0.0};
    Complex c2{1.0 / 1.4142135623730951, 0.0};

    void validate() const;
};

/// <up|rho_S(t)|down> = c1 c2* exp(-i omega0 t / 2) prod_k cos(A_k t / 2).
Complex central_spin_coherence(const CentralSpinParams& p, double t);

/// (sum_k A_k^2)^(-1/2); UndefinedTimescale if every coupling is zero.
double central_spin_decoherence_time(const CentralSpinParams& p);

/// Coherence under free evolution to t_e, a pi rotation about x on the central
/// spin, then free evolution again. Full revival at t = 2 t_e.
Complex spin_echo_coherence(const CentralSpinParams& p, double t_e, double t);

/// Full 2^(M+1)-dimensional Hamiltonian; the central spin is factor 0.
ComplexMatrix central_spin_hamiltonian(const CentralSpinParams& p);

/// Coherence from exact joint evolution of system and bath followed by a
/// partial trace. Cost grows as 4^M; intended for M <= 10.
Complex central_spin_coherence_exact(const CentralSpinParams& p, double t);
std::vector<Complex> central_spin_coherence_exact(const CentralSpinParams& p, std::span<const double> times);

/// Echo coherence from exact joint evolution with the pulse -i sigma_x applied
/// to the central spin at t_e.
Complex spin_echo_coherence_exact(const CentralSpinParams& p, double t_e, double t);

// ---------------------------------------------------------------------------
// Static disorder: eigenbasis fixed, eigenvalues eps_n + g_n * omega with
// omega drawn from a distribution f.

class Distribution {
public:
    enum class Kind { Gaussian, Lorentzian, Uniform };

    static Distribution gaussian(double mean, double sigma);
    static Distribution lorentzian(double center, double width);
    static Distribution uniform(double lo, double hi);

    Kind kind() const noexcept { return kind_; }
    /// (mean, sigma), (center, width) or (lo, hi).
    double first() const noexcept { return a_; }
    double second() const noexcept { return b_; }

    double pdf(double omega) const noexcept;
    /// E[exp(i s omega)].
    Complex characteristic(double s) const noexcept;
    /// Maps two uniforms in [0, 1) onto one sample.
    double sample(double u1, double u2) const noexcept;

private:
    Distribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
    Kind kind_;
    double a_;
    double b_;
};

struct DisorderSpec {
    Distribution distribution = Distribution::gaussian(0.0, 1.0);
    RealVector levels;   // eps_n
    RealVector slopes;   // g_n
    ComplexMatrix r;     // initial density matrix in the eigenbasis

    void validate() const;
    Index dim() const noexcept { return levels.size(); }
};

enum class GammaRoute { ClosedForm, Quadrature };

/// gamma_{m,n}(t) = int f(w) exp(-i [eps_m(w) - eps_n(w)] t) dw.
/// The quadrature route targets 1e-8 absolute error and throws Numerical on
/// non-convergence.
Complex disorder_gamma(const DisorderSpec& spec, Index m, Index n, double t,
                       GammaRoute route = GammaRoute::ClosedForm);

struct DisorderMethod {
    enum class Kind { ClosedForm, MonteCarlo };
    Kind kind = Kind::ClosedForm;
    std::size_t samples = 0;
    std::uint64_t seed = 0;

    static DisorderMethod closed_form() { return {}; }
    static DisorderMethod monte_carlo(std::size_t samples, std::uint64_t seed) {
        return {Kind::MonteCarlo, samples, seed};
    }
};

struct DisorderAverage {
    QuantumState state;
    Eigen::MatrixXd std_error;  // per-element standard error; zero for the closed form
    std::size_t samples = 0;
};

DisorderAverage disorder_averaged_state(const DisorderSpec& spec, double t, const DisorderMethod& method);

// ---------------------------------------------------------------------------
// Three-level shelving model, basis (g, e, s) in the rotating frame:
// H = (rabi/2)(|g><e| + |e><g|) + detuning |e><e|,
// channels (|g><e|, gamma_strong), (|s><e|, gamma_shelve), (|g><s|, gamma_deshelve).

inline constexpr Index kGround = 0;
inline constexpr Index kExcited = 1;
inline constexpr Index kShelf = 2;
inline constexpr std::size_t kStrongChannel = 0;
inline constexpr std::size_t kShelveChannel = 1;
inline constexpr std::size_t kDeshelveChannel = 2;

struct ThreeLevelParams {
    double rabi = 1.0;
    double detuning = 0.0;
    double gamma_strong = 1.0;
    double gamma_shelve = 0.0;
    double gamma_deshelve = 0.0;

    void validate() const;
    /// True when gamma_shelve is not small against gamma_strong.
    bool shelving_not_weak() const noexcept { return gamma_shelve > 0.1 * gamma_strong; }
};

LindbladModel three_level_model(const ThreeLevelParams& p);

/// Steady-state excited population of the driven, damped two-level atom:
/// (rabi^2/4) / (detuning^2 + gamma^2/4 + rabi^2/2).
double two_level_saturation(double rabi, double detuning, double gamma);

struct PeriodStats {
    std::vector<double> durations;
    double mean = 0.0;
    double std_error = 0.0;
};

struct DispersionTest {
    double mean = 0.0;
    double variance = 0.0;
    double fano = 0.0;     // variance / mean
    double chi2 = 0.0;     // sum (c - mean)^2 / mean
    std::size_t dof = 0;
    double p_value = 0.0;  // two-sided
    bool consistent = false;  // p_value >= 0.01
};

struct TelegraphTrajectory {
    std::vector<std::size_t> counts;  // strong-channel emissions per bin
    PeriodStats dark;
    PeriodStats bright;
    double dark_fraction = 0.0;
};

struct TelegraphStats {
    double bin = 0.0;
    std::size_t dark_threshold = 0;
    std::vector<TelegraphTrajectory> per_trajectory;
    PeriodStats dark;    // pooled over trajectories
    PeriodStats bright;
    double dark_fraction = 0.0;
    std::vector<std::size_t> pooled_counts;  // per bin, summed over trajectories
    DispersionTest pooled_dispersion;
};

/// Runs n_traj jump trajectories from |g>, bins strong-channel emissions, and
/// classifies bins with count <= dark_threshold as dark. Periods touching
/// either end of a record are censored and not reported. Configuration error
/// if the expected bright-bin count is below 5.
TelegraphStats fluorescence_telegraph(const ThreeLevelParams& p, const TimeGrid& grid, std::size_t n_traj,
                                      std::uint64_t seed, double bin, std::size_t dark_threshold = 0,
                                      std::size_t workers = 0);

/// Telegraph statistics of a list of binned count series.
PeriodStats run_lengths(const std::vector<std::size_t>& counts, double bin, std::size_t dark_threshold, bool dark);
DispersionTest poisson_dispersion(const std::vector<std::size_t>& counts);

// ---------------------------------------------------------------------------
// Damped oscillator: H = omega a^+a, channels (a, gamma (n+1)), (a^+, gamma n)
// in a Fock space of n_fock states. Positions in ground-state widths.

struct DampedOscParams {
    Index n_fock = 40;
    double omega = 1.0;
    double gamma = 0.0;
    double n_thermal = 0.0;
    Complex alpha1{2.0, 0.0};
    Complex alpha2{-2.0, 0.0};

    void validate() const;
    double max_alpha() const noexcept;
};

LindbladModel damped_oscillator_model(const DampedOscParams& p);

/// Truncated coherent state, renormalized on the truncated space.
ComplexVector coherent_state(Index n_fock, Complex alpha);

/// Normalized |alpha1> + |alpha2>.
QuantumState two_packet_state(const DampedOscParams& p);

/// Uniform grid over +-(max|alpha| sqrt(2) + 5).
std::vector<double> default_position_grid(const DampedOscParams& p, std::size_t points = 512);

/// <x|rho|x> using Hermite functions.
std::vector<double> position_density(const ComplexMatrix& rho, const std::vector<double>& x);

/// (p_max - p_min)/(p_max + p_min) over the interior local maxima and minima of
/// p inside |x| <= half_width. Zero when there is no interior extremum pair.
double fringe_visibility(const std::vector<double>& x, const std::vector<double>& p, double half_width = 1.0);

/// Times in [t_start, t_end] at which the two packet centres coincide.
std::vector<double> merge_times(const DampedOscParams& p, double t_start, double t_end);

struct OscFrame {
    double t = 0.0;
    std::vector<double> density;
    double trace = 0.0;
    double purity = 0.0;
    double mean_number = 0.0;
};

struct DampedOscResult {
    std::vector<double> x;
    std::vector<OscFrame> frames;
};

/// Truncation error if the top Fock population exceeds 1e-6 at any sample.
DampedOscResult damped_osc_scenario(const DampedOscParams& p, const TimeGrid& grid, std::size_t x_points = 512);

}  // namespace qcoh
