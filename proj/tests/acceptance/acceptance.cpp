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


// Acceptance run: one PASS/FAIL line per criterion with the measured value,
// its tolerance, and the wall time against the time budget. Exit status is
// nonzero when any criterion fails.
//
//   qcoh_acceptance [--only N[,N...]] [--workers W]

#include "qcoh/coherence.hpp"
#include "qcoh/errors.hpp"
#include "qcoh/evolution.hpp"
#include "qcoh/models.hpp"
#include "qcoh/parallel.hpp"
#include "qcoh/trajectory.hpp"
#include "support/oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace {

using namespace qcoh;
constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::size_t g_workers = 0;

std::string g3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome purity_bounds() {
    std::mt19937_64 rng(20260101);
    const int n_states = 100000;
    double worst = -1.0;  // largest violation of either bound (negative: inside)
    for (int k = 0; k < n_states; ++k) {
        const Index n = 2 + k % 15;
        QuantumState rho = QuantumState::maximally_mixed(n);
        switch ((k / 15) % 4) {
            case 0: rho = QuantumState::pure(oracle::random_ket(n, rng)); break;
            case 1: rho = QuantumState::mixed(oracle::random_density(n, n, rng)); break;
            case 2: rho = QuantumState::mixed(oracle::random_density(n, 1 + (k / 60) % n, rng)); break;
            default: break;
        }
        const double p = purity(rho);
        worst = std::max({worst, 1.0 / static_cast<double>(n) - p, p - 1.0});
    }
    return {worst <= 1e-10, worst, 1e-10, "1e5 states, N = 2..16; value = max bound violation"};
}

Outcome interference_extremes() {
    const double s = 1.0 / std::sqrt(2.0);
    ComplexVector v(2), plus(2), minus(2);
    v << s, s;
    plus << s, s;
    minus << s, -s;
    const auto psi = QuantumState::pure(v);
    const double p_plus = measurement_probability(psi, QuantumState::pure(plus));
    const double p_minus = measurement_probability(psi, QuantumState::pure(minus));
    const double dev = std::max(std::abs(p_plus - 1.0), std::abs(p_minus));
    return {dev <= 1e-12, dev, 1e-12, "p(phi+) = " + g3(p_plus) + ", p(phi-) = " + g3(p_minus)};
}

CentralSpinParams random_bath(std::size_t m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coupling(0.1, 2.0), freq(-2.0, 2.0);
    CentralSpinParams p;
    p.omega0 = freq(rng);
    for (std::size_t k = 0; k < m; ++k) p.couplings.push_back(coupling(rng));
    const auto c = oracle::random_ket(2, rng);
    p.c1 = c(0);
    p.c2 = c(1);
    return p;
}

Outcome central_spin_oracle() {
    std::mt19937_64 rng(31337);
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        const std::size_t m = 1 + draw / 5;
        const auto p = random_bath(m, rng);
        const double td = central_spin_decoherence_time(p);
        std::uniform_real_distribution<double> tdist(0.0, 6.0 * td);
        std::vector<double> times(50);
        for (auto& t : times) t = tdist(rng);
        const auto brute = central_spin_coherence_exact(p, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Complex closed = central_spin_coherence(p, times[k]);
            const Complex sum = oracle::central_spin_coherence(p.omega0, p.couplings, p.c1, p.c2, times[k]);
            worst = std::max({worst, std::abs(closed - brute[k]), std::abs(closed - sum)});
        }
    }
    return {worst <= 1e-10, worst, 1e-10, "50 draws (5 per M, M = 1..10) x 50 times"};
}

Outcome spin_echo_revival() {
    std::mt19937_64 rng(4242);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const std::size_t m = 1 + draw % 8;
        const auto p = random_bath(m, rng);
        const double te = 10.0 * central_spin_decoherence_time(p);
        const double amp = std::abs(p.c1 * std::conj(p.c2));
        worst = std::max({worst, std::abs(std::abs(spin_echo_coherence_exact(p, te, 2.0 * te)) - amp),
                          std::abs(std::abs(spin_echo_coherence(p, te, 2.0 * te)) - amp)});
    }
    return {worst <= 1e-10, worst, 1e-10, "20 coupling sets, M = 1..8, t_e = 10 t_D, joint evolution and closed form"};
}

DisorderSpec disorder_spec(Distribution d, std::mt19937_64& rng) {
    const Index n = 4;
    DisorderSpec s{d, RealVector(n), RealVector(n), oracle::random_density(n, 2, rng)};
    s.levels << 0.0, 0.7, -0.4, 1.9;
    s.slopes << 1.0, -0.5, 0.25, 0.0;
    return s;
}

Outcome population_invariance() {
    std::mt19937_64 rng(777);
    std::size_t not_bit_equal = 0;
    double mc_excess = -1.0;
    for (const auto& d : {Distribution::gaussian(0.2, 0.8), Distribution::lorentzian(0.0, 0.5),
                          Distribution::uniform(-1.0, 1.5)}) {
        const auto spec = disorder_spec(d, rng);
        for (int k = 0; k <= 200; ++k) {
            const double t = 0.05 * k;
            const auto avg = disorder_averaged_state(spec, t, DisorderMethod::closed_form());
            for (Index i = 0; i < spec.dim(); ++i)
                if (avg.state.density()(i, i) != spec.r(i, i)) ++not_bit_equal;
        }
        for (double t : {0.5, 2.0, 7.0}) {
            const auto mc = disorder_averaged_state(spec, t, DisorderMethod::monte_carlo(10000, 99));
            for (Index i = 0; i < spec.dim(); ++i) {
                const double dev = std::abs(mc.state.density()(i, i).real() - spec.r(i, i).real());
                mc_excess = std::max(mc_excess, dev - 3.0 * mc.std_error(i, i) - 1e-12);
            }
        }
    }
    const bool ok = not_bit_equal == 0 && mc_excess <= 0.0;
    return {ok, static_cast<double>(not_bit_equal), 0.0,
            "closed-form diagonal mismatches (value); monte-carlo max(|dev| - 3 SE - 1e-12) = " +
                g3(mc_excess)};
}

Outcome dephasing_closed_forms() {
    // Two levels differing only through the disorder slope: delta = 1.3.
    const double delta = 1.3;
    double worst_formula = 0.0, worst_quad = 0.0;
    std::size_t points = 0;
    for (const auto& d : {Distribution::gaussian(0.0, 0.9), Distribution::lorentzian(0.0, 0.35)}) {
        DisorderSpec spec{d, RealVector::Zero(2), RealVector(2), ComplexMatrix::Constant(2, 2, 0.5)};
        spec.slopes << 0.5 * delta, -0.5 * delta;
        for (int k = 0;; ++k) {
            const double t = 0.02 * k;
            const double want = d.kind() == Distribution::Kind::Gaussian
                                    ? std::exp(-0.5 * d.second() * d.second() * delta * delta * t * t)
                                    : std::exp(-d.second() * delta * t);
            if (want < 1e-4) break;
            const Complex closed = disorder_gamma(spec, 0, 1, t, GammaRoute::ClosedForm);
            const Complex quad = disorder_gamma(spec, 0, 1, t, GammaRoute::Quadrature);
            worst_formula = std::max(worst_formula, std::abs(std::abs(closed) - want));
            worst_quad = std::max(worst_quad, std::abs(closed - quad));
            ++points;
        }
    }
    const double worst = std::max(worst_formula, worst_quad);
    return {worst <= 1e-8, worst, 1e-8,
            std::to_string(points) + " points down to |gamma| = 1e-4; closed form vs formula " +
                g3(worst_formula)};
}

struct UnravelingResult {
    double max_distance = 0.0;   // at the largest n
    double slope = 0.0;          // log-log fit over n = 1e2, 1e3, 1e4
};

UnravelingResult unraveling(const LindbladModel& model, const QuantumState& psi0, const TimeGrid& grid,
                            std::vector<std::size_t> checkpoints, std::uint64_t seed) {
    const auto master = integrate_master(psi0, model, grid);
    const auto est = run_ensemble_estimates(psi0, model, grid, seed, checkpoints, g_workers);
    std::vector<double> dist;
    for (const auto& e : est) {
        double d = 0.0;
        for (std::size_t k = 0; k < e.times.size(); ++k)
            d = std::max(d, trace_distance(e.mean_state[k].density(), master.states[k].density()));
        dist.push_back(d);
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double x = std::log10(static_cast<double>(checkpoints[i]));
        const double y = std::log10(dist[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return {dist.back(), (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx)};
}

Outcome unraveling_equivalence() {
    const LindbladModel two_level(ComplexMatrix::Zero(2, 2), {{ops::transition(2, 0, 1), 1.0}});
    const auto a = unraveling(two_level, QuantumState::basis(2, 1), TimeGrid{0.0, 5.0, 500, 10}, {100, 1000, 10000},
                              101);
    const ThreeLevelParams tl{2.0, 0.0, 1.0, 0.05, 0.02};
    const auto b = unraveling(three_level_model(tl), QuantumState::basis(3, kGround), TimeGrid{0.0, 20.0, 2000, 20},
                              {100, 1000, 10000, 40000}, 202);
    const double dist = std::max(a.max_distance, b.max_distance);
    const double slope_dev = std::max(std::abs(a.slope + 0.5), std::abs(b.slope + 0.5));
    const bool ok = dist <= 0.05 && slope_dev <= 0.15;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "two-level: D = %.4g slope %.3f; three-level (n = 4e4): D = %.4g slope %.3f; slope tol 0.15",
                  a.max_distance, a.slope, b.max_distance, b.slope);
    return {ok, dist, 0.05, buf};
}

Outcome telegraph_statistics() {
    const ThreeLevelParams p{2.0, 0.0, 1.0, 1e-3, 5e-4};
    const TimeGrid grid{0.0, 750000.0, 37500000, 37500000};
    const auto st = fluorescence_telegraph(p, grid, 4, 8080, 50.0, 0, g_workers);
    const double target = 1.0 / p.gamma_deshelve;
    const double z = std::abs(st.dark.mean - target) / st.dark.std_error;
    const bool mean_ok = st.dark.durations.size() >= 500 && z <= 3.0;
    const bool disp_ok = st.pooled_dispersion.consistent;
    char buf[300];
    std::snprintf(buf, sizeof buf,
                  "dark periods %zu, mean %.1f (target %.1f, SE %.1f, z %.2f) %s; pooled dispersion Fano %.3g, "
                  "p = %.3g %s",
                  st.dark.durations.size(), st.dark.mean, target, st.dark.std_error, z, mean_ok ? "ok" : "FAIL",
                  st.pooled_dispersion.fano, st.pooled_dispersion.p_value, disp_ok ? "ok" : "FAIL");
    return {mean_ok && disp_ok, z, 3.0, buf};
}

std::vector<double> merge_visibilities(const DampedOscParams& p, const DampedOscResult& res, double t_end) {
    std::vector<double> vis;
    for (double tm : merge_times(p, 1e-9, t_end))
        for (const auto& f : res.frames)
            if (std::abs(f.t - tm) < 1e-9) vis.push_back(fringe_visibility(res.x, f.density, 1.0));
    return vis;
}

Outcome damped_oscillator() {
    const double t_end = 3.5 * kPi;
    const TimeGrid grid{0.0, t_end, 1400, 20};
    DampedOscParams pure;
    const auto r0 = damped_osc_scenario(pure, grid, 512);
    double purity_dev = 0.0;
    for (const auto& f : r0.frames) purity_dev = std::max(purity_dev, std::abs(f.purity - 1.0));
    const auto v0 = merge_visibilities(pure, r0, t_end);

    DampedOscParams damped;
    damped.gamma = 0.002;
    damped.n_thermal = 0.5;
    const auto r1 = damped_osc_scenario(damped, grid, 512);
    double trace_dev = 0.0;
    for (const auto& f : r1.frames) trace_dev = std::max(trace_dev, std::abs(f.trace - 1.0));
    const auto v1 = merge_visibilities(damped, r1, t_end);
    bool decreasing = v1.size() >= 3;
    for (std::size_t k = 1; k < v1.size(); ++k) decreasing = decreasing && v1[k] < v1[k - 1];

    const double min_v0 = v0.empty() ? 0.0 : *std::min_element(v0.begin(), v0.end());
    const bool ok = purity_dev <= 1e-6 && !v0.empty() && min_v0 >= 0.98 && decreasing && trace_dev <= 1e-6;
    std::string detail = "gamma = 0: purity dev " + g3(purity_dev) + ", min merge visibility " +
                         g3(min_v0) + "; gamma = 0.002, n = 0.5: trace dev " + g3(trace_dev) +
                         ", visibilities";
    for (double v : v1) detail += " " + g3(v);
    return {ok, std::max(purity_dev, trace_dev), 1e-6, detail};
}

Outcome kraus_master_consistency() {
    const double gamma = 0.6;
    std::mt19937_64 rng(10);
    const auto rho0 = QuantumState::mixed(oracle::random_density(2, 2, rng));
    const LindbladModel model(ComplexMatrix::Zero(2, 2), {{ops::transition(2, 0, 1), gamma}});
    const auto series = integrate_master(rho0, model, TimeGrid{0.0, 6.0, 1200, 60});
    double worst = 0.0;
    std::size_t compared = 0;
    for (std::size_t k = 1; k < series.times.size(); ++k) {
        const double p = 1.0 - std::exp(-gamma * series.times[k]);
        const auto kraus = apply_kraus(rho0, KrausSet::amplitude_damping(p));
        worst = std::max(worst, max_abs(kraus.density() - series.states[k].density()));
        ++compared;
    }
    return {worst <= 1e-6 && compared == 20, worst, 1e-6, std::to_string(compared) + " time points"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcoh acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "run only these criteria")->delimiter(',');
    app.add_option("--workers", g_workers, "trajectory worker threads (0: default)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "purity_bounds", 10.0, purity_bounds},
        {2, "interference_extremes", 1.0, interference_extremes},
        {3, "central_spin_oracle", 60.0, central_spin_oracle},
        {4, "spin_echo_revival", 30.0, spin_echo_revival},
        {5, "population_invariance", 30.0, population_invariance},
        {6, "dephasing_closed_forms", 10.0, dephasing_closed_forms},
        {7, "unraveling_equivalence", 600.0, unraveling_equivalence},
        {8, "telegraph_statistics", 600.0, telegraph_statistics},
        {9, "damped_oscillator", 300.0, damped_oscillator},
        {10, "kraus_master_consistency", 5.0, kraus_master_consistency},
    };
    const std::set<int> selected(only.begin(), only.end());

    std::printf("qcoh acceptance, %zu worker(s)\n", resolve_workers(g_workers));
    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::nan(""), 0.0, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.passed && in_time;
        if (!pass) ++failures;
        std::printf("%s %2d %-26s value=%.6g tol=%.3g time=%.2fs budget=%.0fs%s | %s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name, o.value, o.tolerance, secs, c.budget_s, in_time ? "" : " (over budget)",
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
