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

#include "qcoh/scenario.hpp"

#include "qcoh/coherence.hpp"
#include "qcoh/errors.hpp"
#include "qcoh/format.hpp"
#include "qcoh/models.hpp"
#include "qcoh/trajectory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace qcoh {

using json = nlohmann::json;

namespace {

constexpr std::size_t kMaxExactBath = 12;

// ---------------------------------------------------------------------------
// Field reader: pulls typed values out of a JSON object, records defaults in a
// normalized copy, and collects every problem with its field path.

class ObjectReader {
public:
    ObjectReader(const json& in, json& out, std::string base, std::vector<std::string>& errors)
        : in_(&in), out_(&out), base_(std::move(base)), errors_(&errors) {
        if (!in.is_object()) {
            error_at(base_, "expected an object, got " + std::string(in.type_name()));
            bad_ = true;
        }
        if (!out_->is_object()) *out_ = json::object();
    }

    std::string path(std::string_view key) const {
        return base_.empty() ? std::string(key) : base_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return !bad_ && in_->contains(std::string(key)); }
    bool bad() const noexcept { return bad_; }
    const std::string& base() const noexcept { return base_; }

    void error(std::string_view key, const std::string& msg) { error_at(path(key), msg); }
    void error_at(const std::string& p, const std::string& msg) { errors_->push_back(p + ": " + msg); }

    std::optional<double> number(std::string_view key, std::optional<double> def = std::nullopt) {
        const json* v = fetch(key, def.has_value());
        if (v == nullptr) return store(key, def);
        if (!v->is_number()) return mismatch(key, "number", *v), std::nullopt;
        return store(key, std::optional<double>(v->get<double>()));
    }

    std::optional<std::uint64_t> uinteger(std::string_view key, std::optional<std::uint64_t> def = std::nullopt) {
        const json* v = fetch(key, def.has_value());
        if (v == nullptr) return store(key, def);
        if (v->is_number_unsigned()) return store(key, std::optional<std::uint64_t>(v->get<std::uint64_t>()));
        if (v->is_number_integer()) {
            error(key, "expected a non-negative integer, got " + v->dump());
            return std::nullopt;
        }
        if (v->is_number_float()) {
            const double d = v->get<double>();
            if (d >= 0.0 && d <= 9007199254740992.0 && std::floor(d) == d)
                return store(key, std::optional<std::uint64_t>(static_cast<std::uint64_t>(d)));
        }
        return mismatch(key, "non-negative integer", *v), std::nullopt;
    }

    std::optional<std::string> string(std::string_view key, std::optional<std::string> def = std::nullopt) {
        const json* v = fetch(key, def.has_value());
        if (v == nullptr) return store(key, def);
        if (!v->is_string()) return mismatch(key, "string", *v), std::nullopt;
        return store(key, std::optional<std::string>(v->get<std::string>()));
    }

    std::optional<Complex> complex(std::string_view key, std::optional<Complex> def = std::nullopt) {
        const json* v = fetch(key, def.has_value());
        if (v == nullptr) return store_complex(key, def);
        auto c = as_complex(*v);
        if (!c) return mismatch(key, "number or [re, im]", *v), std::nullopt;
        return store_complex(key, c);
    }

    std::optional<std::vector<double>> numbers(std::string_view key) {
        const json* v = fetch(key, false);
        if (v == nullptr) return std::nullopt;
        if (!v->is_array()) return mismatch(key, "array of numbers", *v), std::nullopt;
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number()) {
                error_at(path(key) + "[" + std::to_string(i) + "]", "expected number, got " + (*v)[i].dump());
                return std::nullopt;
            }
            out.push_back((*v)[i].get<double>());
        }
        (*out_)[std::string(key)] = out;
        return out;
    }

    std::optional<std::vector<Complex>> complexes(std::string_view key, bool required) {
        const json* v = fetch(key, !required);
        if (v == nullptr) return std::nullopt;
        if (!v->is_array()) return mismatch(key, "array of complex numbers", *v), std::nullopt;
        std::vector<Complex> out;
        json norm = json::array();
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto c = as_complex((*v)[i]);
            if (!c) {
                error_at(path(key) + "[" + std::to_string(i) + "]", "expected number or [re, im], got " + (*v)[i].dump());
                return std::nullopt;
            }
            out.push_back(*c);
            norm.push_back({c->real(), c->imag()});
        }
        (*out_)[std::string(key)] = norm;
        return out;
    }

    ObjectReader child(std::string_view key, bool required) {
        const json* v = fetch(key, !required);
        json& slot = (*out_)[std::string(key)];
        if (v == nullptr) {
            ObjectReader r(empty_object(), slot, path(key), *errors_);
            r.bad_ = required;  // already reported; no per-field noise
            return r;
        }
        return ObjectReader(*v, slot, path(key), *errors_);
    }

    /// Marks a key as consumed without reading it.
    void skip(std::string_view key) { seen_.insert(std::string(key)); }

    /// Overrides or removes an entry of the normalized table.
    void put(std::string_view key, json v) { (*out_)[std::string(key)] = std::move(v); }
    void drop(std::string_view key) { out_->erase(std::string(key)); }

    void finish() {
        if (bad_) return;
        for (auto it = in_->begin(); it != in_->end(); ++it)
            if (!seen_.count(it.key())) error(it.key(), "unknown field");
    }

private:
    static const json& empty_object() {
        static const json e = json::object();
        return e;
    }

    static std::optional<Complex> as_complex(const json& v) {
        if (v.is_number()) return Complex(v.get<double>(), 0.0);
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return Complex(v[0].get<double>(), v[1].get<double>());
        return std::nullopt;
    }

    const json* fetch(std::string_view key, bool optional) {
        seen_.insert(std::string(key));
        if (bad_) return nullptr;
        auto it = in_->find(std::string(key));
        if (it == in_->end() || it->is_null()) {
            if (!optional) error(key, "required field missing");
            return nullptr;
        }
        return &*it;
    }

    template <class T>
    std::optional<T> store(std::string_view key, std::optional<T> v) {
        if (v) (*out_)[std::string(key)] = *v;
        return v;
    }

    std::optional<Complex> store_complex(std::string_view key, std::optional<Complex> v) {
        if (v) (*out_)[std::string(key)] = {v->real(), v->imag()};
        return v;
    }

    void mismatch(std::string_view key, const char* expected, const json& got) {
        error(key, std::string("expected ") + expected + ", got " + std::string(got.type_name()) + " " + got.dump());
    }

    const json* in_;
    json* out_;
    std::string base_;
    std::vector<std::string>* errors_;
    std::set<std::string> seen_;
    bool bad_ = false;
};

// ---------------------------------------------------------------------------
// Per-scenario parameter readers. Each returns the typed parameters and fills
// the normalized table; the same reader is rerun on the normalized table at
// run time.

using Kind = EstimatorConfig::Kind;

std::optional<CentralSpinParams> read_central_spin(ObjectReader& r) {
    CentralSpinParams p;
    bool ok = true;
    p.omega0 = r.number("omega0", 0.0).value_or(0.0);
    if (r.has("bath_size")) {
        // Uniform bath: one coupling shared by every bath spin.
        auto m = r.uinteger("bath_size");
        auto a = r.number("couplings");
        r.drop("bath_size");
        if (!m || !a) {
            ok = false;
        } else if (*m < 1) {
            r.error("bath_size", "central spin model needs at least one bath spin (M >= 1)");
            ok = false;
        } else {
            p.couplings.assign(*m, *a);
            r.put("couplings", p.couplings);
        }
    } else {
        auto a = r.numbers("couplings");
        if (!a) {
            ok = false;
        } else {
            p.couplings = *a;
            if (p.couplings.empty()) r.error("couplings", "central spin model needs at least one bath spin (M >= 1)"), ok = false;
        }
    }
    auto c1 = r.complex("c1", Complex(1.0 / std::sqrt(2.0), 0.0));
    auto c2 = r.complex("c2", Complex(1.0 / std::sqrt(2.0), 0.0));
    if (!c1 || !c2) ok = false;
    if (!ok) return std::nullopt;
    p.c1 = *c1;
    p.c2 = *c2;
    try {
        p.validate();
    } catch (const Error& e) {
        r.error("c1", e.what());
        return std::nullopt;
    }
    return p;
}

std::optional<Distribution> read_distribution(ObjectReader& r) {
    auto kind = r.string("kind");
    if (!kind) return std::nullopt;
    try {
        if (*kind == "gaussian") {
            auto mean = r.number("mean", 0.0);
            auto sigma = r.number("sigma");
            if (!mean || !sigma) return std::nullopt;
            return Distribution::gaussian(*mean, *sigma);
        }
        if (*kind == "lorentzian") {
            auto center = r.number("center", 0.0);
            auto width = r.number("width");
            if (!center || !width) return std::nullopt;
            return Distribution::lorentzian(*center, *width);
        }
        if (*kind == "uniform") {
            auto lo = r.number("lo");
            auto hi = r.number("hi");
            if (!lo || !hi) return std::nullopt;
            return Distribution::uniform(*lo, *hi);
        }
    } catch (const Error& e) {
        r.error_at(r.base(), e.what());
        return std::nullopt;
    }
    r.error("kind", "unknown distribution '" + *kind + "' (expected gaussian, lorentzian or uniform)");
    return std::nullopt;
}

std::optional<DisorderSpec> read_disorder(ObjectReader& r) {
    DisorderSpec spec;
    ObjectReader dr = r.child("distribution", true);
    auto dist = read_distribution(dr);
    dr.finish();
    auto levels = r.numbers("levels");
    auto slopes = r.numbers("slopes");
    if (!levels || !slopes) return std::nullopt;
    if (levels->empty()) {
        r.error("levels", "at least one level required");
        return std::nullopt;
    }
    if (levels->size() != slopes->size()) {
        r.error("slopes", "length " + std::to_string(slopes->size()) + " differs from levels length " +
                              std::to_string(levels->size()));
        return std::nullopt;
    }
    const std::size_t n = levels->size();
    std::vector<Complex> amps;
    if (r.has("amplitudes")) {
        auto a = r.complexes("amplitudes", true);
        if (!a) return std::nullopt;
        amps = *a;
    } else {
        r.skip("amplitudes");
        amps.assign(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
        json norm = json::array();
        for (auto c : amps) norm.push_back({c.real(), c.imag()});
        r.put("amplitudes", norm);
    }
    if (amps.size() != n) {
        r.error("amplitudes", "length " + std::to_string(amps.size()) + " differs from levels length " +
                                  std::to_string(n));
        return std::nullopt;
    }
    if (!dist) return std::nullopt;
    ComplexVector psi(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) psi(static_cast<Index>(i)) = amps[i];
    if (std::abs(psi.norm() - 1.0) > 1e-10) {
        r.error("amplitudes", "initial amplitudes not normalized (norm " + fmt17(psi.norm()) + ")");
        return std::nullopt;
    }
    spec.distribution = *dist;
    spec.levels = Eigen::Map<const RealVector>(levels->data(), static_cast<Index>(n));
    spec.slopes = Eigen::Map<const RealVector>(slopes->data(), static_cast<Index>(n));
    spec.r = psi * psi.adjoint();
    return spec;
}

struct TelegraphParams {
    ThreeLevelParams model;
    double bin = 50.0;
    std::size_t dark_threshold = 0;
    std::size_t min_dark_periods = 500;
};

std::optional<ThreeLevelParams> read_three_level(ObjectReader& r, double shelve_default, double deshelve_default) {
    ThreeLevelParams p;
    auto rabi = r.number("rabi", 2.0);
    auto det = r.number("detuning", 0.0);
    auto gs = r.number("gamma_strong", 1.0);
    auto gsh = r.number("gamma_shelve", shelve_default);
    auto gd = r.number("gamma_deshelve", deshelve_default);
    if (!rabi || !det || !gs || !gsh || !gd) return std::nullopt;
    p.rabi = *rabi;
    p.detuning = *det;
    p.gamma_strong = *gs;
    p.gamma_shelve = *gsh;
    p.gamma_deshelve = *gd;
    try {
        p.validate();
    } catch (const Error& e) {
        r.error_at(r.base(), e.what());
        return std::nullopt;
    }
    return p;
}

std::optional<TelegraphParams> read_telegraph(ObjectReader& r) {
    TelegraphParams t;
    auto m = read_three_level(r, 1e-3, 5e-4);
    auto bin = r.number("bin", 50.0);
    auto thr = r.uinteger("dark_threshold", 0);
    auto min_dark = r.uinteger("min_dark_periods", 500);
    if (!m || !bin || !thr || !min_dark) return std::nullopt;
    if (!(*bin > 0.0)) {
        r.error("bin", "bin width must be positive");
        return std::nullopt;
    }
    if (m->gamma_deshelve <= 0.0) {
        r.error("gamma_deshelve", "telegraph statistics need gamma_deshelve > 0");
        return std::nullopt;
    }
    t.model = *m;
    t.bin = *bin;
    t.dark_threshold = *thr;
    t.min_dark_periods = *min_dark;
    return t;
}

struct OscScenarioParams {
    DampedOscParams model;
    std::size_t x_points = 512;
    double half_width = 1.0;
};

std::optional<OscScenarioParams> read_oscillator(ObjectReader& r) {
    OscScenarioParams o;
    auto n = r.uinteger("n_fock", 40);
    auto omega = r.number("omega", 1.0);
    auto gamma = r.number("gamma", 0.0);
    auto nth = r.number("n_thermal", 0.0);
    auto a1 = r.complex("alpha1", Complex(2.0, 0.0));
    auto a2 = r.complex("alpha2", Complex(-2.0, 0.0));
    auto xp = r.uinteger("x_points", 512);
    auto hw = r.number("visibility_half_width", 1.0);
    if (!n || !omega || !gamma || !nth || !a1 || !a2 || !xp || !hw) return std::nullopt;
    o.model.n_fock = static_cast<Index>(*n);
    o.model.omega = *omega;
    o.model.gamma = *gamma;
    o.model.n_thermal = *nth;
    o.model.alpha1 = *a1;
    o.model.alpha2 = *a2;
    o.x_points = *xp;
    o.half_width = *hw;
    bool ok = true;
    if (o.x_points < 3) r.error("x_points", "need at least 3 position points"), ok = false;
    if (!(o.half_width > 0.0)) r.error("visibility_half_width", "must be positive"), ok = false;
    if (!(o.model.omega > 0.0)) r.error("omega", "oscillator frequency must be positive"), ok = false;
    try {
        o.model.validate();
    } catch (const Error& e) {
        r.error(e.kind() == ErrorKind::Truncation ? "n_fock" : "gamma", e.what());
        ok = false;
    }
    if (!ok) return std::nullopt;
    return o;
}

struct UnravelParams {
    std::string model;
    LindbladModel lindblad{ComplexMatrix::Zero(1, 1), {}};
    Index initial = 0;
    double threshold = 0.05;
};

std::optional<UnravelParams> read_unraveling(ObjectReader& r) {
    UnravelParams u;
    auto model = r.string("model", std::string("two-level-decay"));
    auto thr = r.number("threshold", 0.05);
    if (!model || !thr) return std::nullopt;
    u.model = *model;
    u.threshold = *thr;
    Index dim = 0;
    if (*model == "two-level-decay") {
        auto gamma = r.number("gamma", 1.0);
        auto rabi = r.number("rabi", 0.0);
        auto det = r.number("detuning", 0.0);
        auto init = r.uinteger("initial", 1);
        if (!gamma || !rabi || !det || !init) return std::nullopt;
        if (!(*gamma >= 0.0)) {
            r.error("gamma", "decay rate must be >= 0");
            return std::nullopt;
        }
        // Basis (g, e).
        ComplexMatrix h = ComplexMatrix::Zero(2, 2);
        h(0, 1) = h(1, 0) = 0.5 * *rabi;
        h(1, 1) = *det;
        u.lindblad = LindbladModel(h, {{ops::transition(2, 0, 1), *gamma}});
        u.initial = static_cast<Index>(*init);
        dim = 2;
    } else if (*model == "three-level") {
        auto p = read_three_level(r, 0.05, 0.02);
        auto init = r.uinteger("initial", 0);
        if (!p || !init) return std::nullopt;
        u.lindblad = three_level_model(*p);
        u.initial = static_cast<Index>(*init);
        dim = 3;
    } else {
        r.error("model", "unknown model '" + *model + "' (expected two-level-decay or three-level)");
        return std::nullopt;
    }
    if (u.initial >= dim) {
        r.error("initial", "basis index out of range for dimension " + std::to_string(dim));
        return std::nullopt;
    }
    if (!(u.threshold > 0.0)) {
        r.error("threshold", "must be positive");
        return std::nullopt;
    }
    return u;
}

const std::vector<Kind>& allowed_estimators(const std::string& scenario) {
    static const std::vector<Kind> exact{Kind::ClosedForm, Kind::MasterEquation};
    static const std::vector<Kind> disorder{Kind::ClosedForm, Kind::Trajectories};
    static const std::vector<Kind> traj{Kind::Trajectories};
    static const std::vector<Kind> master{Kind::MasterEquation};
    if (scenario == "central-spin" || scenario == "spin-echo") return exact;
    if (scenario == "disorder") return disorder;
    if (scenario == "damped-oscillator") return master;
    return traj;
}

std::optional<Kind> estimator_kind(const std::string& s) {
    if (s == "closed-form") return Kind::ClosedForm;
    if (s == "master-equation") return Kind::MasterEquation;
    if (s == "trajectories") return Kind::Trajectories;
    return std::nullopt;
}

// Reads the params table of `scenario`; returns false on any error. `extra`
// receives derived values that depend on the grid.
bool read_params(const std::string& scenario, const json& in, json& out, const TimeGrid* grid, Kind kind,
                 std::vector<std::string>& errors) {
    const std::size_t before = errors.size();
    ObjectReader r(in, out, "params", errors);
    if (scenario == "central-spin") {
        auto p = read_central_spin(r);
        if (p && kind == Kind::MasterEquation && p->couplings.size() > kMaxExactBath)
            r.error("couplings", "exact joint evolution is limited to M <= " + std::to_string(kMaxExactBath));
    } else if (scenario == "spin-echo") {
        auto p = read_central_spin(r);
        std::optional<double> te;
        if (p) {
            double td = 0.0;
            try {
                td = central_spin_decoherence_time(*p);
            } catch (const Error& e) {
                r.error("couplings", e.what());
            }
            if (td > 0.0) te = r.number("t_echo", 10.0 * td);
            if (te && !(*te > 0.0)) r.error("t_echo", "echo pulse time must be positive");
            if (kind == Kind::MasterEquation && p->couplings.size() > kMaxExactBath)
                r.error("couplings", "exact joint evolution is limited to M <= " + std::to_string(kMaxExactBath));
        } else {
            r.number("t_echo", 1.0);
        }
        if (grid != nullptr && grid->t_start < 0.0) errors.push_back("grid.t_start: spin echo requires t_start >= 0");
    } else if (scenario == "disorder") {
        read_disorder(r);
    } else if (scenario == "three-level-telegraph") {
        auto t = read_telegraph(r);
        if (t) {
            const double rate = t->model.gamma_strong *
                                two_level_saturation(t->model.rabi, t->model.detuning, t->model.gamma_strong);
            if (rate * t->bin < 5.0)
                r.error("bin", "expected bright-bin count " + fmt17(rate * t->bin) + " < 5; use a wider bin");
            if (grid != nullptr && (grid->t_end - grid->t_start) < 3.0 * t->bin)
                errors.push_back("grid.t_end: time grid shorter than three bins");
        }
    } else if (scenario == "damped-oscillator") {
        read_oscillator(r);
    } else if (scenario == "unraveling-check") {
        read_unraveling(r);
    }
    r.finish();
    return errors.size() == before;
}

// Run-time re-read of an already validated table.
template <class T, class F>
T reread(const json& params, F&& reader) {
    std::vector<std::string> errors;
    json scratch;
    ObjectReader r(params, scratch, "params", errors);
    auto v = reader(r);
    if (!v || !errors.empty()) fail(ErrorKind::Validation, errors.empty() ? "invalid params" : errors.front());
    return *v;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += '\n';
        out += l;
    }
    return out;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"central-spin",          "spin-echo",         "disorder",
                                                "three-level-telegraph", "damped-oscillator", "unraveling-check"};
    return names;
}

const char* to_string(EstimatorConfig::Kind kind) noexcept {
    switch (kind) {
        case Kind::ClosedForm: return "closed-form";
        case Kind::MasterEquation: return "master-equation";
        case Kind::Trajectories: return "trajectories";
    }
    return "?";
}

ScenarioConfig parse_config(std::string_view text) {
    json doc;
    const bool blank = std::all_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(text.begin(), text.end());
        } catch (const json::parse_error& e) {
            fail(ErrorKind::Validation, std::string("<document>: malformed JSON: ") + e.what());
        }
    }

    std::vector<std::string> errors;
    ScenarioConfig cfg;
    json norm = json::object();
    ObjectReader root(doc, norm, "", errors);
    if (root.bad()) fail(ErrorKind::Validation, join_lines(errors));

    auto scenario = root.string("scenario");
    if (scenario) {
        const auto& names = scenario_names();
        if (std::find(names.begin(), names.end(), *scenario) == names.end()) {
            std::string list;
            for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
            root.error("scenario", "unknown scenario '" + *scenario + "' (expected one of: " + list + ")");
            scenario.reset();
        } else {
            cfg.scenario = *scenario;
        }
    }

    ObjectReader gr = root.child("grid", true);
    auto t0 = gr.number("t_start", 0.0);
    auto t1 = gr.number("t_end");
    auto ns = gr.uinteger("n_steps");
    auto se = gr.uinteger("sample_every", 1);
    gr.finish();
    bool grid_ok = t0 && t1 && ns && se;
    if (grid_ok) {
        cfg.grid = TimeGrid{*t0, *t1, static_cast<std::size_t>(*ns), static_cast<std::size_t>(*se)};
        try {
            cfg.grid.validate();
        } catch (const Error& e) {
            errors.push_back(std::string("grid: ") + e.what());
            grid_ok = false;
        }
    }

    ObjectReader er = root.child("estimator", true);
    auto kind_s = er.string("kind");
    std::optional<Kind> kind;
    if (kind_s) {
        kind = estimator_kind(*kind_s);
        if (!kind) er.error("kind", "unknown estimator '" + *kind_s + "' (expected closed-form, master-equation or trajectories)");
    }
    if (kind && *kind == Kind::Trajectories) {
        auto n = er.uinteger("n_traj");
        auto seed = er.uinteger("seed");
        if (n && *n < 1) er.error("n_traj", "trajectories requires n_traj >= 1");
        if (n) cfg.estimator.n_traj = static_cast<std::size_t>(*n);
        if (seed) cfg.estimator.seed = *seed;
    } else if (kind) {
        for (const char* k : {"n_traj", "seed"}) {
            if (er.has(k)) er.error(k, std::string("only valid with the trajectories estimator"));
            er.skip(k);
        }
    }
    er.finish();
    if (kind) {
        cfg.estimator.kind = *kind;
        if (scenario) {
            const auto& ok = allowed_estimators(*scenario);
            if (std::find(ok.begin(), ok.end(), *kind) == ok.end()) {
                std::string list;
                for (auto k : ok) list += std::string(list.empty() ? "" : ", ") + to_string(k);
                er.error("kind", "scenario " + *scenario + " supports: " + list);
                kind.reset();
            }
        }
    }

    ObjectReader orr = root.child("output", true);
    auto path = orr.string("path");
    if (path && path->empty()) orr.error("path", "must not be empty");
    auto format = orr.string("format", std::string("csv"));
    if (format && *format != "csv") orr.error("format", "unsupported format '" + *format + "' (expected csv)");
    std::optional<std::string> manifest;
    if (path) manifest = orr.string("manifest", *path + ".manifest.json");
    else orr.skip("manifest");
    auto profiles = orr.string("profiles", std::string());
    if (profiles && !profiles->empty() && scenario && *scenario != "damped-oscillator")
        orr.error("profiles", "only produced by the damped-oscillator scenario");
    orr.finish();
    if (path) cfg.output.path = *path;
    if (format) cfg.output.format = *format;
    if (manifest) cfg.output.manifest = *manifest;
    if (profiles) cfg.output.profiles = *profiles;

    if (scenario) {
        json params_out = json::object();
        const json& params_in = doc.is_object() && doc.contains("params") ? doc["params"] : json::object();
        read_params(*scenario, params_in, params_out, grid_ok ? &cfg.grid : nullptr,
                    kind.value_or(Kind::ClosedForm), errors);
        cfg.params = params_out;
    }
    root.skip("params");
    root.finish();

    if (!errors.empty()) fail(ErrorKind::Validation, join_lines(errors));
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json config_to_json(const ScenarioConfig& c) {
    json j = json::object();
    j["scenario"] = c.scenario;
    j["params"] = c.params;
    j["grid"] = {{"t_start", c.grid.t_start},
                 {"t_end", c.grid.t_end},
                 {"n_steps", c.grid.n_steps},
                 {"sample_every", c.grid.sample_every}};
    json e = {{"kind", to_string(c.estimator.kind)}};
    if (c.estimator.kind == Kind::Trajectories) {
        e["n_traj"] = c.estimator.n_traj;
        e["seed"] = c.estimator.seed;
    }
    j["estimator"] = e;
    j["output"] = {{"path", c.output.path},
                   {"format", c.output.format},
                   {"manifest", c.output.manifest},
                   {"profiles", c.output.profiles}};
    return j;
}

std::string emit_config(const ScenarioConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string config_hash(const ScenarioConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_output_paths(const ScenarioConfig& config) {
    namespace fs = std::filesystem;
    for (const std::string& p : {config.output.path, config.output.manifest, config.output.profiles}) {
        if (p.empty()) continue;
        const fs::path parent = fs::absolute(fs::path(p)).parent_path();
        std::error_code ec;
        if (!fs::is_directory(parent, ec)) fail(ErrorKind::Io, "output directory does not exist: " + parent.string());
        if (fs::is_directory(fs::path(p), ec)) fail(ErrorKind::Io, "output path is a directory: " + p);
    }
}

bool RunManifest::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

json RunManifest::to_json() const {
    json j = json::object();
    j["toolkit"] = "qcoh";
    j["version"] = version;
    j["config"] = config;
    j["config_hash"] = config_hash;
    j["derived"] = derived.is_null() ? json::object() : derived;
    j["wall_time_s"] = wall_time_s;
    json cs = json::array();
    json failures = json::array();
    for (const auto& c : checks) {
        json cj = {{"name", c.name}, {"passed", c.passed}, {"threshold", c.threshold}};
        cj["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
        if (!c.detail.empty()) cj["detail"] = c.detail;
        cs.push_back(cj);
        if (!c.passed) failures.push_back(c.name);
    }
    j["checks"] = cs;
    j["passed"] = passed();
    j["failures"] = failures;
    j["warnings"] = warnings;
    j["outputs"] = outputs;
    return j;
}

namespace {

// ---------------------------------------------------------------------------
// Output helpers

class Csv {
public:
    Csv(const std::string& comment, const std::vector<std::string>& header) {
        out_ << comment << '\n';
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt17(values[i]);
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

struct Run {
    const ScenarioConfig& cfg;
    std::size_t workers;
    RunManifest& manifest;
    std::vector<std::pair<std::string, std::string>>& files;
    std::string comment;

    void check(std::string name, bool passed, double value, double threshold, std::string detail = {}) {
        manifest.checks.push_back({std::move(name), passed, value, threshold, std::move(detail)});
    }
};

void run_central_spin(Run& run) {
    const auto p = reread<CentralSpinParams>(run.cfg.params, read_central_spin);
    const double td = central_spin_decoherence_time(p);
    run.manifest.derived["t_D"] = td;
    run.manifest.derived["bath_size"] = p.couplings.size();
    const bool exact = run.cfg.estimator.kind == Kind::MasterEquation;
    const double amp = std::abs(p.c1 * std::conj(p.c2));
    Csv csv(run.comment, {"t", "coherence_re", "coherence_im", "coherence_abs", "envelope"});
    double max_dev = 0.0;
    double max_excess = 0.0;
    const std::vector<double> times = run.cfg.grid.sample_times();
    const std::vector<Complex> exact_values = exact ? central_spin_coherence_exact(p, times) : std::vector<Complex>{};
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const Complex cf = central_spin_coherence(p, t);
        const Complex c = exact ? exact_values[k] : cf;
        double env = amp;
        for (double a : p.couplings) env *= std::abs(std::cos(0.5 * a * t));
        csv.row({t, c.real(), c.imag(), std::abs(c), env});
        max_dev = std::max(max_dev, std::abs(c - cf));
        max_excess = std::max(max_excess, std::abs(c) - amp);
    }
    run.files.emplace_back(run.cfg.output.path, csv.str());
    run.check("coherence_bounded", max_excess <= 1e-12, max_excess, 1e-12, "max(|rho_12(t)| - |c1 c2*|)");
    if (exact) run.check("closed_form_agreement", max_dev <= 1e-10, max_dev, 1e-10, "max |exact - closed form|");
}

void run_spin_echo(Run& run) {
    const auto p = reread<CentralSpinParams>(run.cfg.params, read_central_spin);
    const double te = run.cfg.params.at("t_echo").get<double>();
    const double td = central_spin_decoherence_time(p);
    run.manifest.derived["t_D"] = td;
    run.manifest.derived["revival_time"] = 2.0 * te;
    const bool exact = run.cfg.estimator.kind == Kind::MasterEquation;
    auto coherence = [&](double t) { return exact ? spin_echo_coherence_exact(p, te, t) : spin_echo_coherence(p, te, t); };
    Csv csv(run.comment, {"t", "coherence_re", "coherence_im", "coherence_abs"});
    double max_dev = 0.0;
    for (double t : run.cfg.grid.sample_times()) {
        const Complex c = coherence(t);
        csv.row({t, c.real(), c.imag(), std::abs(c)});
        max_dev = std::max(max_dev, std::abs(c - spin_echo_coherence(p, te, t)));
    }
    run.files.emplace_back(run.cfg.output.path, csv.str());
    const double amp = std::abs(p.c1 * std::conj(p.c2));
    const double revival = std::abs(std::abs(coherence(2.0 * te)) - amp);
    run.check("echo_revival", revival <= 1e-10, revival, 1e-10, "||rho_12(2 t_e)| - |c1 c2*||");
    if (exact) run.check("closed_form_agreement", max_dev <= 1e-10, max_dev, 1e-10, "max |exact - closed form|");
}

void run_disorder(Run& run) {
    const auto spec = reread<DisorderSpec>(run.cfg.params, read_disorder);
    const Index n = spec.dim();
    const bool mc = run.cfg.estimator.kind == Kind::Trajectories;
    const DisorderMethod method = mc ? DisorderMethod::monte_carlo(run.cfg.estimator.n_traj, run.cfg.estimator.seed)
                                     : DisorderMethod::closed_form();
    std::vector<std::string> header{"t"};
    for (Index i = 0; i < n; ++i) header.push_back("pop_" + std::to_string(i));
    if (mc)
        for (Index i = 0; i < n; ++i) header.push_back("pop_" + std::to_string(i) + "_stderr");
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            header.push_back("rho_" + std::to_string(i) + "_" + std::to_string(j) + "_re");
            header.push_back("rho_" + std::to_string(i) + "_" + std::to_string(j) + "_im");
        }
    Csv csv(run.comment, header);
    bool bit_equal = true;
    double max_pop_dev = 0.0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double max_quad_dev = 0.0;
    std::size_t quad_points = 0;
    for (double t : run.cfg.grid.sample_times()) {
        const DisorderAverage avg = disorder_averaged_state(spec, t, method);
        const ComplexMatrix rho = avg.state.density();
        std::vector<double> row{t};
        for (Index i = 0; i < n; ++i) {
            const double pop = rho(i, i).real();
            const double r = spec.r(i, i).real();
            row.push_back(pop);
            bit_equal = bit_equal && pop == r && rho(i, i).imag() == 0.0;
            max_pop_dev = std::max(max_pop_dev, std::abs(pop - r));
            if (mc) worst_excess = std::max(worst_excess, std::abs(pop - r) - 3.0 * avg.std_error(i, i));
        }
        if (mc)
            for (Index i = 0; i < n; ++i) row.push_back(avg.std_error(i, i));
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) {
                row.push_back(rho(i, j).real());
                row.push_back(rho(i, j).imag());
            }
        csv.row(row);
        if (!mc) {
            for (Index i = 0; i < n; ++i)
                for (Index j = i + 1; j < n; ++j) {
                    const Complex cf = disorder_gamma(spec, i, j, t);
                    if (std::abs(cf) < 1e-4) continue;
                    const Complex q = disorder_gamma(spec, i, j, t, GammaRoute::Quadrature);
                    max_quad_dev = std::max(max_quad_dev, std::abs(cf - q));
                    ++quad_points;
                }
        }
    }
    run.files.emplace_back(run.cfg.output.path, csv.str());
    if (mc) {
        run.check("populations_within_3se", worst_excess <= 1e-12, worst_excess, 1e-12,
                  "max(|pop - r_mm| - 3 stderr)");
    } else {
        run.check("population_invariance", bit_equal, max_pop_dev, 0.0, "averaged populations bit-equal to r_mm");
        run.check("quadrature_agreement", max_quad_dev <= 1e-8, max_quad_dev, 1e-8,
                  "max |closed form - quadrature| where |gamma| >= 1e-4, " + std::to_string(quad_points) + " points");
    }
}

void run_telegraph(Run& run) {
    const auto tp = reread<TelegraphParams>(run.cfg.params, read_telegraph);
    const TelegraphStats stats = fluorescence_telegraph(tp.model, run.cfg.grid, run.cfg.estimator.n_traj,
                                                        run.cfg.estimator.seed, tp.bin, tp.dark_threshold,
                                                        run.workers);
    const double expected = 1.0 / tp.model.gamma_deshelve;
    run.manifest.derived["expected_dark_mean"] = expected;
    run.manifest.derived["bright_emission_rate"] =
        tp.model.gamma_strong * two_level_saturation(tp.model.rabi, tp.model.detuning, tp.model.gamma_strong);
    run.manifest.derived["dark_periods"] = stats.dark.durations.size();
    run.manifest.derived["bright_periods"] = stats.bright.durations.size();
    run.manifest.derived["dark_mean"] = stats.dark.mean;
    run.manifest.derived["dark_mean_stderr"] = stats.dark.std_error;
    run.manifest.derived["bright_mean"] = stats.bright.mean;
    run.manifest.derived["dark_fraction"] = stats.dark_fraction;
    run.manifest.derived["pooled_fano"] = stats.pooled_dispersion.fano;
    if (tp.model.shelving_not_weak())
        run.manifest.warnings.push_back("gamma_shelve is not small against gamma_strong; dark periods are not well separated");

    Csv csv(run.comment, {"t", "pooled_count", "dark_trajectories"});
    for (std::size_t b = 0; b < stats.pooled_counts.size(); ++b) {
        std::size_t dark = 0;
        for (const auto& tt : stats.per_trajectory) dark += tt.counts[b] <= tp.dark_threshold ? 1 : 0;
        csv.row({run.cfg.grid.t_start + static_cast<double>(b) * tp.bin, static_cast<double>(stats.pooled_counts[b]),
                 static_cast<double>(dark)});
    }
    run.files.emplace_back(run.cfg.output.path, csv.str());

    const std::size_t nd = stats.dark.durations.size();
    run.check("dark_period_count", nd >= tp.min_dark_periods, static_cast<double>(nd),
              static_cast<double>(tp.min_dark_periods), "uncensored dark periods pooled over trajectories");
    const double z = nd >= 2 && stats.dark.std_error > 0.0
                         ? std::abs(stats.dark.mean - expected) / stats.dark.std_error
                         : std::numeric_limits<double>::quiet_NaN();
    run.check("dark_period_mean", std::isfinite(z) && z <= 3.0, z, 3.0, "|mean - 1/gamma_deshelve| / stderr");
    const auto& d = stats.pooled_dispersion;
    run.check("pooled_poisson_dispersion", d.consistent, d.p_value, 0.01,
              "two-sided chi-square index of dispersion, Fano " + fmt17(d.fano));
}

void run_oscillator(Run& run) {
    const auto op = reread<OscScenarioParams>(run.cfg.params, read_oscillator);
    const DampedOscResult res = damped_osc_scenario(op.model, run.cfg.grid, op.x_points);
    const auto merges = merge_times(op.model, run.cfg.grid.t_start, run.cfg.grid.t_end);
    run.manifest.derived["merge_times"] = merges;

    auto is_merge = [&](double t) {
        return std::any_of(merges.begin(), merges.end(),
                           [&](double m) { return std::abs(t - m) <= 1e-9 * std::max(1.0, std::abs(m)); });
    };
    Csv csv(run.comment, {"t", "trace", "purity", "mean_number", "visibility", "merge"});
    double max_trace_dev = 0.0, max_purity_dev = 0.0;
    std::vector<double> merge_vis, merge_t;
    const double p0 = res.frames.front().purity;
    for (const auto& f : res.frames) {
        const double vis = fringe_visibility(res.x, f.density, op.half_width);
        const bool m = is_merge(f.t);
        csv.row({f.t, f.trace, f.purity, f.mean_number, vis, m ? 1.0 : 0.0});
        max_trace_dev = std::max(max_trace_dev, std::abs(f.trace - 1.0));
        max_purity_dev = std::max(max_purity_dev, std::abs(f.purity - p0));
        if (m) {
            merge_vis.push_back(vis);
            merge_t.push_back(f.t);
        }
    }
    run.files.emplace_back(run.cfg.output.path, csv.str());
    if (!run.cfg.output.profiles.empty()) {
        Csv prof(run.comment, {"t", "x", "density"});
        for (const auto& f : res.frames)
            for (std::size_t i = 0; i < res.x.size(); ++i) prof.row({f.t, res.x[i], f.density[i]});
        run.files.emplace_back(run.cfg.output.profiles, prof.str());
    }
    run.manifest.derived["merge_visibility"] = merge_vis;
    run.manifest.derived["sampled_merge_times"] = merge_t;
    if (merge_t.size() < merges.size())
        run.manifest.warnings.push_back(std::to_string(merges.size() - merge_t.size()) +
                                        " merge time(s) fall between samples and were not evaluated");

    run.check("trace_conservation", max_trace_dev <= 1e-6, max_trace_dev, 1e-6, "max |tr rho - 1|");
    if (op.model.gamma == 0.0) {
        run.check("purity_conservation", max_purity_dev <= 1e-6, max_purity_dev, 1e-6, "max |P(t) - P(0)|");
        const double vmin = merge_vis.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : *std::min_element(merge_vis.begin(), merge_vis.end());
        run.check("merge_visibility", !merge_vis.empty() && vmin >= 0.98, vmin, 0.98,
                  "minimum fringe visibility over sampled merge times");
    } else {
        std::size_t run_len = merge_vis.empty() ? 0 : 1;
        for (std::size_t k = 1; k < merge_vis.size() && merge_vis[k] < merge_vis[k - 1]; ++k) ++run_len;
        const bool ok = run_len >= 3 && run_len == merge_vis.size();
        run.check("visibility_decreasing", ok, static_cast<double>(run_len), 3.0,
                  "merge times with strictly decreasing visibility (all sampled merges must decrease)");
    }
}

void run_unraveling(Run& run) {
    const auto up = reread<UnravelParams>(run.cfg.params, read_unraveling);
    const std::size_t n = run.cfg.estimator.n_traj;
    const QuantumState psi0 = QuantumState::basis(up.lindblad.dim(), up.initial);
    std::vector<std::size_t> cps;
    for (std::size_t c : {n / 100, n / 10, n})
        if (c >= 1 && (cps.empty() || c > cps.back())) cps.push_back(c);
    const auto estimates = run_ensemble_estimates(psi0, up.lindblad, run.cfg.grid, run.cfg.estimator.seed, cps,
                                                  run.workers);
    const StateSeries master = integrate_master(psi0, up.lindblad, run.cfg.grid);

    std::vector<double> max_td;
    for (const auto& est : estimates) {
        double m = 0.0;
        for (std::size_t k = 0; k < master.times.size(); ++k)
            m = std::max(m, trace_distance(est.mean_state[k].density(), master.states[k].density()));
        max_td.push_back(m);
    }
    const auto& full = estimates.back();
    const Index dim = up.lindblad.dim();
    std::vector<std::string> header{"t", "trace_distance"};
    for (Index i = 0; i < dim; ++i) header.push_back("traj_pop_" + std::to_string(i));
    for (Index i = 0; i < dim; ++i) header.push_back("traj_pop_" + std::to_string(i) + "_stderr");
    for (Index i = 0; i < dim; ++i) header.push_back("master_pop_" + std::to_string(i));
    Csv csv(run.comment, header);
    const double flag = 5.0 / std::sqrt(static_cast<double>(n));
    std::size_t flagged = 0;
    for (std::size_t k = 0; k < master.times.size(); ++k) {
        const ComplexMatrix rt = full.mean_state[k].density();
        const ComplexMatrix rm = master.states[k].density();
        const double td = trace_distance(rt, rm);
        flagged += td > flag ? 1 : 0;
        std::vector<double> row{master.times[k], td};
        for (Index i = 0; i < dim; ++i) row.push_back(rt(i, i).real());
        for (Index i = 0; i < dim; ++i) row.push_back(full.population_stderr[k](i));
        for (Index i = 0; i < dim; ++i) row.push_back(rm(i, i).real());
        csv.row(row);
    }
    run.files.emplace_back(run.cfg.output.path, csv.str());

    run.manifest.derived["checkpoints"] = cps;
    run.manifest.derived["max_trace_distance_at_checkpoints"] = max_td;
    run.manifest.derived["flag_threshold"] = flag;
    run.manifest.derived["flagged_times"] = flagged;
    if (flagged > 0)
        run.manifest.warnings.push_back(std::to_string(flagged) + " sample time(s) exceed 5/sqrt(n_traj)");
    run.check("max_trace_distance", max_td.back() <= up.threshold, max_td.back(), up.threshold,
              "max over sample times of the trace distance to the master equation");
    if (cps.size() == 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double x = std::log(static_cast<double>(cps[k]));
            const double y = std::log(std::max(max_td[k], 1e-300));
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
        run.manifest.derived["scaling_slope"] = slope;
        run.check("scaling_slope", std::abs(slope + 0.5) <= 0.15, slope, -0.5,
                  "log-log slope of max trace distance against n_traj, tolerance 0.15");
    }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, std::size_t workers) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    RunManifest& m = result.manifest;
    m.config = config_to_json(config);
    m.config_hash = config_hash(config);
    m.derived = json::object();
    Run run{config, workers, m, result.files,
            "# qcoh " + std::string(kVersion) + " scenario=" + config.scenario + " config_hash=" + m.config_hash};
    try {
        if (config.scenario == "central-spin") run_central_spin(run);
        else if (config.scenario == "spin-echo") run_spin_echo(run);
        else if (config.scenario == "disorder") run_disorder(run);
        else if (config.scenario == "three-level-telegraph") run_telegraph(run);
        else if (config.scenario == "damped-oscillator") run_oscillator(run);
        else if (config.scenario == "unraveling-check") run_unraveling(run);
        else fail(ErrorKind::Validation, "scenario: unknown scenario '" + config.scenario + "'");
    } catch (const IntegrationError& e) {
        throw IntegrationError(e.time(), config.scenario + ": " + e.what());
    } catch (const Error& e) {
        throw Error(e.kind(), config.scenario + ": " + e.what());
    }
    for (const auto& f : result.files) m.outputs.push_back(f.first);
    m.outputs.push_back(config.output.manifest);
    m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

void write_outputs(const RunResult& result) {
    auto write = [](const std::string& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
        out << text;
        if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
    };
    for (const auto& [path, text] : result.files) write(path, text);
    const auto& manifest_path = result.manifest.outputs.back();
    write(manifest_path, result.manifest.to_json().dump(2) + "\n");
}

}  // namespace qcoh
