// Copyright 2026 The oscmix Authors
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

// Scenario configs, preset mixed-state sources, sweep execution and
// persistent result records (CSV rows plus a full JSON record) backing the
// command-line tool. Everything here is deterministic given (config, seed):
// identical runs produce byte-identical CSV rows.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oscmix/continuum.hpp"
#include "oscmix/core.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"
#include "oscmix/oscillation.hpp"
#include "oscmix/pointer.hpp"
#include "oscmix/rng.hpp"
#include "oscmix/strong_equivalence.hpp"
#include "oscmix/version.hpp"
#include "oscmix/weak_values.hpp"

namespace oscmix {

using json = nlohmann::json;

enum class ScenarioKind { TwoState, Countable, Continuum, PointerMC, StrongEquivalence };

inline const char *to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::TwoState: return "two_state";
        case ScenarioKind::Countable: return "countable";
        case ScenarioKind::Continuum: return "continuum";
        case ScenarioKind::PointerMC: return "pointer_mc";
        case ScenarioKind::StrongEquivalence: return "strong_equivalence";
    }
    return "?";
}

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::TwoState;
    json parameters;      // kind-specific, validated
    double window_start = 0.0;
    double window_duration = 0.0; // 0 = kind default
    std::size_t window_nodes = 0; // 0 = kind default
    std::uint64_t seed = 1;
    std::string output_path;
    json raw; // canonical parsed config, hashed into the record
};

struct ResultRow {
    std::map<std::string, std::string> inputs; // sorted keys, printed as k=v;...
    cplx averaged{};                           // measured / time-averaged route
    cplx mixed{};                              // mixed-law route or prediction
    std::string verdict = "n/a";
    double gap = 0.0;
    json extra; // stderr, survivor counts, predictions, recovery errors
};

struct ResultRecord {
    std::string config_hash;
    std::string timestamp; // UTC ISO-8601; lives in the JSON record only
    std::string software_version;
    std::string kind;
    std::string verdict = "n/a"; // sweep-level verdict where applicable
    std::vector<ResultRow> rows;
    json notes;
    json config; // the effective config; rows are recomputable from it alone
};

// ---------------------------------------------------------------------------
// Formatting / hashing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

/// FNV-1a over the canonical serialization; json objects keep sorted keys,
/// so the hash is independent of the key order in the source file.
inline std::string config_hash_hex(const json &config) {
    const std::string dump = config.dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Source presets
// ---------------------------------------------------------------------------

/// Squared-amplitude laws for the preset sources. These are illustrative
/// level populations (thermal ladder, uniform, two-band), not derived
/// spectra; records carry an "illustrative" marker.
inline std::vector<double> preset_populations(const std::string &name, std::size_t levels,
                                              double temperature) {
    if (levels < 2) throw Error("preset needs at least 2 levels");
    std::vector<double> p(levels);
    if (name == "blackbody" || name == "unruh" || name == "hawking") {
        if (!(temperature > 0.0)) throw Error("thermal preset needs temperature > 0");
        for (std::size_t j = 0; j < levels; ++j) {
            p[j] = std::exp(-static_cast<double>(j) / temperature);
        }
    } else if (name == "decoherence") {
        for (double &x : p) x = 1.0;
    } else if (name == "solid_state") {
        const double lo = static_cast<double>(levels) / 4.0;
        const double hi = 3.0 * static_cast<double>(levels) / 4.0;
        const double width = std::max(1.0, static_cast<double>(levels) / 10.0);
        for (std::size_t j = 0; j < levels; ++j) {
            const double x = static_cast<double>(j);
            p[j] = std::exp(-(x - lo) * (x - lo) / (2.0 * width * width)) +
                   std::exp(-(x - hi) * (x - hi) / (2.0 * width * width));
        }
    } else {
        throw Error("unknown preset '" + name + "'");
    }
    double total = 0.0;
    for (double x : p) total += x;
    for (double &x : p) x /= total;
    return p;
}

/// Complex amplitudes for a preset source: square roots of the populations
/// with seeded uniform phases.
inline std::vector<cplx> preset_amplitudes(const std::string &name, std::size_t levels,
                                           double temperature, std::uint64_t seed) {
    const std::vector<double> pops = preset_populations(name, levels, temperature);
    SplitMix64 rng = substream(seed, 0x9E5ULL);
    std::vector<cplx> amps(levels);
    for (std::size_t j = 0; j < levels; ++j) {
        const double phase = rng.next_double() * kTwoPi;
        amps[j] = std::sqrt(pops[j]) * cplx{std::cos(phase), std::sin(phase)};
    }
    return amps;
}

// ---------------------------------------------------------------------------
// Config validation
// ---------------------------------------------------------------------------

namespace detail {

class Validator {
  public:
    explicit Validator(const json &j) : j_(j) {}

    double number(const std::string &path, std::optional<double> fallback = std::nullopt) {
        const json *node = find(path);
        if (node == nullptr) {
            if (fallback) return *fallback;
            add(path, "required number is missing");
            return std::nan(""); // marks "already reported" for range checks
        }
        if (!node->is_number()) {
            add(path, "must be a number");
            return fallback.value_or(std::nan(""));
        }
        return node->get<double>();
    }

    std::int64_t integer(const std::string &path,
                         std::optional<std::int64_t> fallback = std::nullopt) {
        const json *node = find(path);
        if (node == nullptr) {
            if (fallback) return *fallback;
            add(path, "required integer is missing");
            return 0;
        }
        if (!node->is_number_integer() && !node->is_number_unsigned()) {
            add(path, "must be an integer");
            return fallback.value_or(0);
        }
        return node->get<std::int64_t>();
    }

    std::string text(const std::string &path, std::optional<std::string> fallback) {
        const json *node = find(path);
        if (node == nullptr) {
            if (fallback) return *fallback;
            add(path, "required string is missing");
            return {};
        }
        if (!node->is_string()) {
            add(path, "must be a string");
            return fallback.value_or(std::string{});
        }
        return node->get<std::string>();
    }

    void require_positive(const std::string &path, double value) {
        if (!std::isnan(value) && !(value > 0.0)) add(path, "must be strictly positive");
    }

    void require_nonzero(const std::string &path, double value) {
        if (value == 0.0) add(path, "must be nonzero");
    }

    void add(const std::string &path, const std::string &message) {
        issues_.emplace_back(path, message);
    }

    bool ok() const { return issues_.empty(); }
    const std::vector<ValidationError::Issue> &issues() const { return issues_; }

    const json *find(const std::string &path) const {
        const json *node = &j_;
        std::size_t begin = 0;
        while (begin <= path.size()) {
            const std::size_t dot = path.find('.', begin);
            const std::string key = path.substr(begin, dot - begin);
            if (!node->is_object() || !node->contains(key)) return nullptr;
            node = &(*node)[key];
            if (dot == std::string::npos) break;
            begin = dot + 1;
        }
        return node;
    }

  private:
    const json &j_;
    std::vector<ValidationError::Issue> issues_;
};

} // namespace detail

/// Parses and validates a config object, reporting every problem found, not
/// just the first.
inline ScenarioConfig validate_config(const json &j) {
    detail::Validator v(j);
    ScenarioConfig cfg;
    cfg.raw = j;

    const std::string kind = v.text("kind", std::nullopt);
    if (kind == "two_state") {
        cfg.kind = ScenarioKind::TwoState;
    } else if (kind == "countable") {
        cfg.kind = ScenarioKind::Countable;
    } else if (kind == "continuum") {
        cfg.kind = ScenarioKind::Continuum;
    } else if (kind == "pointer_mc") {
        cfg.kind = ScenarioKind::PointerMC;
    } else if (kind == "strong_equivalence") {
        cfg.kind = ScenarioKind::StrongEquivalence;
    } else if (!kind.empty()) {
        v.add("kind", "unknown scenario kind '" + kind + "'");
    }

    const std::int64_t seed = v.integer("seed", 1);
    if (seed < 0) v.add("seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.output_path = v.text("output_path", std::string("results/") + kind);

    cfg.window_start = v.number("averaging.start", 0.0);
    cfg.window_duration = v.number("averaging.duration", 0.0);
    const std::int64_t nodes = v.integer("averaging.nodes", 0);
    if (nodes < 0) v.add("averaging.nodes", "must be non-negative");
    cfg.window_nodes = static_cast<std::size_t>(nodes);
    if (cfg.window_duration < 0.0) v.add("averaging.duration", "must be positive when given");

    if (v.find("parameters") != nullptr && !v.find("parameters")->is_object()) {
        v.add("parameters", "must be an object");
    }
    cfg.parameters = v.find("parameters") != nullptr && v.find("parameters")->is_object()
                         ? *v.find("parameters")
                         : json::object();

    switch (cfg.kind) {
        case ScenarioKind::TwoState: {
            v.require_positive("parameters.A", v.number("parameters.A", std::nullopt));
            v.require_positive("parameters.B", v.number("parameters.B", std::nullopt));
            v.require_nonzero("parameters.omega", v.number("parameters.omega", 1.0));
            const std::string source =
                v.text("parameters.source", std::string("oscillating"));
            if (source != "oscillating" && source != "mixed") {
                v.add("parameters.source", "must be 'oscillating' or 'mixed'");
            }
            const std::int64_t qn = v.integer("parameters.quadrature_nodes", 1 << 16);
            if (qn < 64) v.add("parameters.quadrature_nodes", "must be at least 64");
            break;
        }
        case ScenarioKind::Countable: {
            const std::int64_t a = v.integer("parameters.a_index", std::nullopt);
            const std::int64_t b = v.integer("parameters.b_index", std::nullopt);
            if (a == b) v.add("parameters.b_index", "must differ from a_index");
            v.require_positive("parameters.B", v.number("parameters.B", std::nullopt));
            v.number("parameters.chi", 0.0);
            const bool has_amps = v.find("parameters.amplitudes") != nullptr;
            const bool has_preset = v.find("parameters.preset") != nullptr;
            if (!has_amps && !has_preset) {
                v.add("parameters", "needs either 'amplitudes' or 'preset'");
            }
            if (has_preset) {
                const std::string name = v.text("parameters.preset", std::nullopt);
                if (name != "blackbody" && name != "decoherence" && name != "solid_state" &&
                    name != "unruh" && name != "hawking") {
                    v.add("parameters.preset", "unknown preset '" + name + "'");
                }
                const std::int64_t levels = v.integer("parameters.levels", 8);
                if (levels < 3) v.add("parameters.levels", "needs at least 3 levels");
                if (a < 0 || a >= levels) v.add("parameters.a_index", "out of range");
                if (b < 0 || b >= levels) v.add("parameters.b_index", "out of range");
                if (name == "blackbody" || name == "unruh" || name == "hawking") {
                    v.require_positive("parameters.temperature",
                                       v.number("parameters.temperature", 2.0));
                }
            }
            if (has_amps) {
                const json *amps = v.find("parameters.amplitudes");
                if (!amps->is_array() || amps->size() < 3) {
                    v.add("parameters.amplitudes", "must be an array of at least 3 entries");
                } else {
                    if (a < 0 || a >= static_cast<std::int64_t>(amps->size())) {
                        v.add("parameters.a_index", "out of range");
                    }
                    if (b < 0 || b >= static_cast<std::int64_t>(amps->size())) {
                        v.add("parameters.b_index", "out of range");
                    }
                }
            }
            break;
        }
        case ScenarioKind::Continuum: {
            const std::int64_t bins = v.integer("parameters.bins", 512);
            if (bins < 8) v.add("parameters.bins", "needs at least 8 bins");
            const double x_min = v.number("parameters.x_min", -4.0);
            const double x_max = v.number("parameters.x_max", 4.0);
            if (!(x_max > x_min)) v.add("parameters.x_max", "must exceed x_min");
            v.require_positive("parameters.width", v.number("parameters.width", 1.0));
            v.number("parameters.center", 0.0);
            v.require_nonzero("parameters.Omega", v.number("parameters.Omega", std::nullopt));
            v.number("parameters.Phi", 0.0);
            v.require_positive("parameters.delta_x", v.number("parameters.delta_x", 1e-3));
            v.require_positive("parameters.delta_t", v.number("parameters.delta_t", 1e-3));
            v.require_positive("parameters.C1", v.number("parameters.C1", std::nullopt));
            v.require_positive("parameters.C2", v.number("parameters.C2", std::nullopt));
            const std::int64_t shots = v.integer("parameters.shots", 2000000);
            if (shots < 1000) v.add("parameters.shots", "needs at least 1000 shots");
            // window must sit on the bin-edge lattice with >= 2 bins per half
            if (bins >= 8 && x_max > x_min) {
                const double h = (x_max - x_min) / static_cast<double>(bins);
                const double a = v.number("parameters.window_center", 0.0);
                const double da = v.number("parameters.window_half_width", 16.0 * h);
                const double edge = (a - x_min) / h;
                const double halves = da / h;
                if (std::abs(edge - std::round(edge)) > 1e-9 ||
                    std::abs(halves - std::round(halves)) > 1e-9) {
                    v.add("parameters.window_center",
                          "window must snap to bin edges (center and half-width on the "
                          "edge lattice)");
                } else if (std::llround(halves) < 2) {
                    v.add("parameters.window_half_width", "needs at least 2 bins per half");
                } else if (edge - halves < 0.0 ||
                           edge + halves > static_cast<double>(bins)) {
                    v.add("parameters.window_center", "window extends outside the grid");
                }
            }
            break;
        }
        case ScenarioKind::PointerMC: {
            v.require_positive("parameters.A", v.number("parameters.A", std::nullopt));
            v.require_positive("parameters.B", v.number("parameters.B", std::nullopt));
            v.require_nonzero("parameters.omega", v.number("parameters.omega", 1.0));
            v.number("parameters.phi0", 0.0);
            const double sigma = v.number("parameters.sigma", 1.0);
            v.require_positive("parameters.sigma", sigma);
            v.require_positive("parameters.g", v.number("parameters.g", 0.02 * sigma));
            const std::int64_t cells = v.integer("parameters.cells", 256);
            if (cells < 128) v.add("parameters.cells", "needs at least 128 cells");
            const double span = v.number("parameters.span", 16.0 * sigma);
            if (!(span >= 10.0 * sigma)) v.add("parameters.span", "must be at least 10 sigma");
            const std::int64_t trials = v.integer("parameters.trials", 200000);
            if (trials < 1) v.add("parameters.trials", "needs at least 1 trial");
            const std::int64_t bins = v.integer("parameters.bins", 0);
            if (bins < 0) v.add("parameters.bins", "must be non-negative");
            const std::string est = v.text("parameters.estimator", std::string("both"));
            if (est != "both" && est != "pooled" && est != "time_binned") {
                v.add("parameters.estimator", "must be 'both', 'pooled' or 'time_binned'");
            }
            break;
        }
        case ScenarioKind::StrongEquivalence: {
            const std::int64_t dim = v.integer("parameters.dim", 4);
            if (dim < 1) v.add("parameters.dim", "needs dimension >= 1");
            const std::int64_t trials = v.integer("parameters.trials", 20);
            if (trials < 1) v.add("parameters.trials", "needs at least 1 trial");
            v.require_positive("parameters.cycles", v.number("parameters.cycles", 1e4));
            break;
        }
    }

    if (!v.ok()) throw ValidationError(v.issues());
    return cfg;
}

inline ScenarioConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw ParseError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError("config root must be a JSON object");
    return validate_config(j);
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

namespace detail {

inline void put(ResultRow &row, const std::string &key, double value) {
    row.inputs[key] = format_double(value);
}

inline void put(ResultRow &row, const std::string &key, const std::string &value) {
    row.inputs[key] = value;
}

inline ResultRow run_two_state_point(const ScenarioConfig &cfg, double A, double B) {
    const double omega = cfg.parameters.value("omega", 1.0);
    const double phi0 = cfg.parameters.value("phi0", 0.0);
    const std::string source = cfg.parameters.value("source", "oscillating");
    const auto nodes =
        static_cast<std::size_t>(cfg.parameters.value("quadrature_nodes", 1 << 16));

    const TwoStateConfig ts(A, B, omega, phi0);
    const WeakValue averaged_prediction = two_state_averaged(ts);
    const WeakValue mixed_prediction = two_state_mixed(ts);
    const WeakValue measured = source == "oscillating"
                                   ? two_state_averaged_quadrature(ts, nodes)
                                   : two_state_mixed(ts);

    ResultRow row;
    put(row, "A", A);
    put(row, "B", B);
    put(row, "omega", omega);
    put(row, "phi0", phi0);
    put(row, "source", source);
    row.averaged = measured;
    row.mixed = mixed_prediction;
    row.gap = std::abs(averaged_prediction - mixed_prediction);
    row.extra["re_averaged_prediction"] = averaged_prediction.real();
    row.extra["re_mixed_prediction"] = mixed_prediction.real();
    return row;
}

inline std::vector<cplx> countable_amplitudes(const ScenarioConfig &cfg) {
    if (cfg.parameters.contains("amplitudes")) {
        std::vector<cplx> amps;
        for (const auto &entry : cfg.parameters["amplitudes"]) {
            if (entry.is_array() && entry.size() == 2) {
                amps.emplace_back(entry[0].get<double>(), entry[1].get<double>());
            } else if (entry.is_number()) {
                amps.emplace_back(entry.get<double>(), 0.0);
            } else {
                throw ValidationError("parameters.amplitudes",
                                      "entries must be numbers or [re, im] pairs");
            }
        }
        return amps;
    }
    const std::string preset = cfg.parameters.value("preset", "blackbody");
    const auto levels = static_cast<std::size_t>(cfg.parameters.value("levels", 8));
    const double temperature = cfg.parameters.value("temperature", 2.0);
    return preset_amplitudes(preset, levels, temperature, cfg.seed);
}

inline ResultRow run_countable(const ScenarioConfig &cfg) {
    const std::vector<cplx> amps = countable_amplitudes(cfg);
    const auto a_idx = static_cast<std::size_t>(cfg.parameters["a_index"].get<std::int64_t>());
    const auto b_idx = static_cast<std::size_t>(cfg.parameters["b_index"].get<std::int64_t>());
    const double B = cfg.parameters["B"].get<double>();
    const double chi = cfg.parameters.value("chi", 0.0);

    const CountableReduction red = countable_reduction(amps, a_idx, b_idx, B, chi);
    ResultRow row;
    put(row, "levels", static_cast<double>(amps.size()));
    put(row, "a_index", static_cast<double>(a_idx));
    put(row, "b_index", static_cast<double>(b_idx));
    put(row, "B", B);
    put(row, "chi", chi);
    put(row, "source", cfg.parameters.value("preset", "custom"));
    row.averaged = red.averaged;
    row.mixed = red.mixed;
    row.gap = std::abs(red.averaged - red.mixed);
    row.extra["effective_A"] = red.effective_A;
    return row;
}

/// The two-experiment protocol: a strong non-post-selected measurement first
/// recovers the amplitude profile from `shots` draws of the dephased
/// distribution, then the tailored post-selection is built from the
/// *recovered* amplitudes and the weak values are evaluated against the true
/// state.
inline ResultRow run_continuum(const ScenarioConfig &cfg) {
    const auto bins = static_cast<std::size_t>(cfg.parameters.value("bins", 512));
    const double x_min = cfg.parameters.value("x_min", -4.0);
    const double x_max = cfg.parameters.value("x_max", 4.0);
    const double center = cfg.parameters.value("center", 0.0);
    const double width = cfg.parameters.value("width", 1.0);
    const double Omega = cfg.parameters["Omega"].get<double>();
    const double Phi = cfg.parameters.value("Phi", 0.0);
    const double delta_x = cfg.parameters.value("delta_x", 1e-3);
    const double delta_t = cfg.parameters.value("delta_t", 1e-3);
    const double C1 = cfg.parameters["C1"].get<double>();
    const double C2 = cfg.parameters["C2"].get<double>();
    const auto shots = static_cast<std::size_t>(cfg.parameters.value("shots", 2000000));

    const ContinuumProfile truth = make_gaussian_profile(bins, x_min, x_max, center, width,
                                                         Omega, Phi, delta_x, delta_t);
    const double h = truth.spacing();
    const Window window(truth, cfg.parameters.value("window_center", 0.0),
                        cfg.parameters.value("window_half_width", 16.0 * h));

    // experiment one: strong measurement of the dephased distribution
    std::vector<double> cumulative(bins);
    double acc = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        acc += truth.amplitude(k) * truth.amplitude(k) * h;
        cumulative[k] = acc;
    }
    std::vector<std::size_t> counts(bins, 0);
    SplitMix64 rng = substream(cfg.seed, 0xC0117ULL);
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        ++counts[std::min(bins - 1, static_cast<std::size_t>(it - cumulative.begin()))];
    }
    std::vector<double> recovered(bins);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        recovered[k] = std::sqrt(static_cast<double>(counts[k]) /
                                 (static_cast<double>(shots) * h));
        norm2 += recovered[k] * recovered[k] * h;
    }
    for (double &a : recovered) a /= std::sqrt(norm2);
    const ContinuumProfile estimate(truth.x_center(0), h, recovered, Omega, Phi, delta_x,
                                    delta_t);
    double recovery_error = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        recovery_error = std::max(recovery_error,
                                  std::abs(estimate.amplitude(k) - truth.amplitude(k)));
    }

    // experiment two: weak measurement with the tailored post-selection
    const TailoredPostselection post = tailored_postselection(estimate, window, C1, C2);
    // the grid ratio is periodic with the per-bin winding period
    const double full_period = kTwoPi / (std::abs(Omega) * h);
    const double duration = cfg.window_duration > 0.0 ? cfg.window_duration : full_period;
    const std::size_t nodes = cfg.window_nodes > 0 ? cfg.window_nodes : 8192;
    const WeakValue measured_avg = continuum_time_average_quadrature(
        truth, post, window, AveragingWindow(cfg.window_start, duration, nodes));
    const WeakValue measured_mixed = continuum_mixed_weak_value(truth, post, window);

    const double r = C2 / C1;
    const double sgn_prediction = std::abs(r - 1.0) <= 1e-12 ? 0.0 : sgn(1.0 - r * r);
    const double mixed_prediction = (1.0 - r * r) / (1.0 + r * r);

    ResultRow row;
    put(row, "bins", static_cast<double>(bins));
    put(row, "C1", C1);
    put(row, "C2", C2);
    put(row, "Omega", Omega);
    put(row, "Phi", Phi);
    put(row, "window_center", window.center());
    put(row, "window_half_width", window.half_width());
    put(row, "shots", static_cast<double>(shots));
    row.averaged = measured_avg;
    row.mixed = measured_mixed;
    row.gap = std::abs(cplx{sgn_prediction, 0.0} - cplx{mixed_prediction, 0.0});
    row.extra["sgn_prediction"] = sgn_prediction;
    row.extra["mixed_prediction"] = mixed_prediction;
    row.extra["amplitude_recovery_max_error"] = recovery_error;
    // one-sigma scale of the recovered amplitude per bin
    row.extra["amplitude_recovery_expected_scale"] =
        0.5 / std::sqrt(static_cast<double>(shots) * h);
    row.extra["fast_condition_cycles"] = check_fast_condition(truth).cycles_in_window;
    row.extra["fast_condition_met"] = check_fast_condition(truth).is_fast;
    row.extra["position_mixing_detected"] = check_position_mixing(truth).is_fast;
    return row;
}

inline ResultRow run_pointer_mc(const ScenarioConfig &cfg) {
    const double A = cfg.parameters["A"].get<double>();
    const double B = cfg.parameters["B"].get<double>();
    const double omega = cfg.parameters.value("omega", 1.0);
    const double phi0 = cfg.parameters.value("phi0", 0.0);
    const double sigma = cfg.parameters.value("sigma", 1.0);
    const double g = cfg.parameters.value("g", 0.02 * sigma);
    const auto cells = static_cast<std::size_t>(cfg.parameters.value("cells", 256));
    const double span = cfg.parameters.value("span", 16.0 * sigma);
    const auto trials = static_cast<std::size_t>(cfg.parameters.value("trials", 200000));
    const auto bins = static_cast<std::size_t>(cfg.parameters.value("bins", 0));
    const std::string which = cfg.parameters.value("estimator", "both");

    const TwoStateConfig ts(A, B, omega, phi0);
    const OscillatingPureState source = two_state_oscillating(ts);
    const PureState post = two_state_post(ts);
    const PointerModel pm(cells, span, sigma, g);
    const double duration =
        cfg.window_duration > 0.0 ? cfg.window_duration : kTwoPi / std::abs(omega);
    const AveragingWindow window(cfg.window_start, duration, 2);

    ResultRow row;
    put(row, "A", A);
    put(row, "B", B);
    put(row, "omega", omega);
    put(row, "g", g);
    put(row, "sigma", sigma);
    put(row, "trials", static_cast<double>(trials));
    put(row, "estimator", which);
    row.averaged = {std::nan(""), std::nan("")};
    row.mixed = {std::nan(""), std::nan("")};
    if (which == "both" || which == "time_binned") {
        const McEstimate binned = monte_carlo(source, pauli_z(), post, pm, window, trials,
                                              cfg.seed, Estimator::TimeBinned, bins);
        row.averaged = binned.value;
        row.extra["binned_stderr_re"] = binned.stderr_re;
        row.extra["binned_stderr_im"] = binned.stderr_im;
        row.extra["binned_survivors"] = binned.survivors;
    }
    if (which == "both" || which == "pooled") {
        const McEstimate pooled = monte_carlo(source, pauli_z(), post, pm, window, trials,
                                              cfg.seed, Estimator::Pooled, bins);
        row.mixed = pooled.value;
        row.extra["pooled_stderr_re"] = pooled.stderr_re;
        row.extra["pooled_stderr_im"] = pooled.stderr_im;
        row.extra["pooled_survivors"] = pooled.survivors;
    }
    row.extra["sgn_prediction"] = two_state_averaged(ts).real();
    row.extra["mixed_prediction"] = two_state_mixed(ts).real();
    row.gap = std::abs(two_state_averaged(ts) - two_state_mixed(ts));
    return row;
}

inline std::vector<ResultRow> run_strong_equivalence(const ScenarioConfig &cfg) {
    const auto dim = static_cast<std::size_t>(cfg.parameters.value("dim", 4));
    const auto trials = static_cast<std::size_t>(cfg.parameters.value("trials", 20));
    const double cycles = cfg.parameters.value("cycles", 1e4);

    SplitMix64 rng = substream(cfg.seed, 0x5EEDULL);
    std::vector<double> amps(dim), freqs(dim), offsets(dim);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        amps[i] = 0.2 + rng.next_double();
        norm2 += amps[i] * amps[i];
        freqs[i] = static_cast<double>(i) + rng.next_double() * 0.5;
        offsets[i] = rng.next_double() * kTwoPi;
    }
    for (double &a : amps) a /= std::sqrt(norm2);
    const OscillatingPureState s(amps, freqs, offsets);
    const double min_gap = s.min_frequency_gap();
    const double duration =
        cfg.window_duration > 0.0
            ? cfg.window_duration
            : (std::isfinite(min_gap) ? kTwoPi * cycles / min_gap : 1.0);
    const AveragingWindow window(cfg.window_start, duration, 2);

    std::vector<ResultRow> rows;
    const auto reports = equivalence_suite(s, trials, window, cfg.seed);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto &r = reports[i];
        ResultRow row;
        put(row, "dim", static_cast<double>(dim));
        put(row, "trial", static_cast<double>(i / 4));
        put(row, "quantity", to_string(r.quantity));
        put(row, "cycles", cycles);
        row.averaged = r.oscillating_value;
        row.mixed = r.mixed_value;
        row.gap = r.deviation;
        row.verdict = r.pass ? "pass" : "fail";
        row.extra["bound"] = r.bound;
        row.extra["window_is_fast"] = r.window_is_fast;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/// Executes one scenario and assembles the persistent record.
inline ResultRecord run_scenario(const ScenarioConfig &cfg) {
    ResultRecord record;
    record.config_hash = config_hash_hex(cfg.raw);
    record.timestamp = detail::utc_timestamp();
    record.software_version = kVersion;
    record.kind = to_string(cfg.kind);
    record.config = cfg.raw;

    switch (cfg.kind) {
        case ScenarioKind::TwoState:
            record.rows.push_back(detail::run_two_state_point(
                cfg, cfg.parameters["A"].get<double>(), cfg.parameters["B"].get<double>()));
            break;
        case ScenarioKind::Countable:
            record.rows.push_back(detail::run_countable(cfg));
            break;
        case ScenarioKind::Continuum:
            record.rows.push_back(detail::run_continuum(cfg));
            record.notes["amplitude_law"] = "illustrative";
            break;
        case ScenarioKind::PointerMC:
            record.rows.push_back(detail::run_pointer_mc(cfg));
            break;
        case ScenarioKind::StrongEquivalence: {
            record.rows = detail::run_strong_equivalence(cfg);
            bool all = true;
            for (const auto &row : record.rows) all = all && row.verdict == "pass";
            record.verdict = all ? "pass" : "fail";
            break;
        }
    }
    if (cfg.kind == ScenarioKind::Countable && cfg.parameters.contains("preset")) {
        record.notes["amplitude_law"] = "illustrative";
    }
    return record;
}

/// Runs one scenario per axis value, concurrently up to `workers`, and
/// assembles rows in input order. For two-state sweeps the measured values
/// are handed to the discriminator for a sweep-level verdict.
inline ResultRecord sweep_scenario(const ScenarioConfig &cfg, const std::string &axis,
                                   const std::vector<double> &values, std::size_t workers = 1) {
    if (values.empty()) {
        throw ValidationError("values", "sweep needs at least one value");
    }
    const bool ab_axis = axis == "AB";
    if (ab_axis && cfg.kind != ScenarioKind::TwoState) {
        throw ValidationError("axis", "axis 'AB' applies to two_state scenarios only");
    }
    if (!ab_axis) {
        if (!cfg.parameters.contains(axis) || !cfg.parameters[axis].is_number()) {
            throw ValidationError(
                "axis", "'" + axis + "' is not a numeric parameter of this scenario");
        }
    }

    std::vector<ScenarioConfig> points;
    points.reserve(values.size());
    for (double value : values) {
        ScenarioConfig point = cfg;
        if (ab_axis) {
            point.parameters["A"] = value;
            point.parameters["B"] = 1.0;
        } else {
            point.parameters[axis] = value;
        }
        point.raw["parameters"] = point.parameters;
        validate_config(point.raw); // reject out-of-range sweep values up front
        points.push_back(std::move(point));
    }

    std::vector<ResultRecord> partial(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            partial[i] = run_scenario(points[i]);
        }
    };
    const std::size_t thread_count = std::max<std::size_t>(1, std::min(workers, points.size()));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }

    ResultRecord record;
    record.config_hash = config_hash_hex(cfg.raw);
    record.timestamp = detail::utc_timestamp();
    record.software_version = kVersion;
    record.kind = to_string(cfg.kind);
    record.config = cfg.raw;
    record.notes["sweep_axis"] = axis;
    record.notes["sweep_values"] = values;
    for (std::size_t i = 0; i < partial.size(); ++i) {
        for (auto &row : partial[i].rows) {
            row.inputs["sweep_index"] = std::to_string(i);
            record.rows.push_back(std::move(row));
        }
    }

    if (cfg.kind == ScenarioKind::TwoState) {
        std::vector<WeakValueSample> samples;
        for (const auto &row : record.rows) {
            samples.push_back({std::stod(row.inputs.at("A")), std::stod(row.inputs.at("B")),
                               row.averaged});
        }
        try {
            record.verdict = to_string(discriminate(samples).kind);
        } catch (const InsufficientSamples &) {
            record.verdict = "inconclusive";
        }
        for (auto &row : record.rows) row.verdict = record.verdict;
    }
    return record;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Fixed column order; doubles print with full round-trip precision so that
/// equal-seed reruns are byte-identical.
inline std::string to_csv(const ResultRecord &record) {
    std::string out = "kind,inputs,re_averaged,im_averaged,re_mixed,im_mixed,verdict\n";
    for (const auto &row : record.rows) {
        std::string inputs;
        for (const auto &[k, v] : row.inputs) {
            if (!inputs.empty()) inputs += ';';
            inputs += k + "=" + v;
        }
        out += record.kind + "," + inputs + "," + detail::format_double(row.averaged.real()) +
               "," + detail::format_double(row.averaged.imag()) + "," +
               detail::format_double(row.mixed.real()) + "," +
               detail::format_double(row.mixed.imag()) + "," + row.verdict + "\n";
    }
    return out;
}

inline json to_json(const ResultRecord &record) {
    json j;
    j["config_hash"] = record.config_hash;
    j["timestamp"] = record.timestamp;
    j["software_version"] = record.software_version;
    j["kind"] = record.kind;
    j["verdict"] = record.verdict;
    j["notes"] = record.notes;
    j["config"] = record.config;
    j["rows"] = json::array();
    for (const auto &row : record.rows) {
        json r;
        for (const auto &[k, v] : row.inputs) r["inputs"][k] = v;
        r["re_averaged"] = row.averaged.real();
        r["im_averaged"] = row.averaged.imag();
        r["re_mixed"] = row.mixed.real();
        r["im_mixed"] = row.mixed.imag();
        r["verdict"] = row.verdict;
        r["gap"] = row.gap;
        if (!row.extra.is_null()) r["extra"] = row.extra;
        j["rows"].push_back(std::move(r));
    }
    return j;
}

/// Writes `<base>.csv` and `<base>.json`. The OSCMIX_OUTPUT_DIR environment
/// variable, when set, overrides the directory part of the path.
inline std::pair<std::string, std::string> write_record(const ResultRecord &record,
                                                        std::string base_path) {
    namespace fs = std::filesystem;
    fs::path base(base_path);
    if (base.extension() == ".json" || base.extension() == ".csv") {
        base.replace_extension();
    }
    if (const char *dir = std::getenv("OSCMIX_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        base = fs::path(dir) / base.filename();
    }
    if (base.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(base.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create output directory '" + base.parent_path().string() +
                          "': " + ec.message());
        }
    }
    const std::string csv_path = base.string() + ".csv";
    const std::string json_path = base.string() + ".json";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open '" + csv_path + "' for writing");
    csv << to_csv(record);
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open '" + json_path + "' for writing");
    js << to_json(record).dump(2) << '\n';
    return {csv_path, json_path};
}

} // namespace oscmix
