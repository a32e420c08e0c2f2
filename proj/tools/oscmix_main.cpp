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

// Command-line front end: validate configs, run single scenarios, sweep a
// parameter axis, and list the available scenario kinds and source presets.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure
// (pole/overflow/no survivors), 4 I/O failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscmix/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::size_t workers = 1;
};

oscmix::ScenarioConfig load_with_overrides(const std::string &path, const Overrides &ov) {
    oscmix::ScenarioConfig cfg = oscmix::load_config(path);
    if (ov.seed) {
        cfg.seed = *ov.seed;
        cfg.raw["seed"] = *ov.seed; // the hash keys on the effective config
    }
    if (ov.out) cfg.output_path = *ov.out;
    return cfg;
}

void print_issues(const oscmix::ValidationError &e) {
    std::cerr << "invalid config:\n";
    for (const auto &[path, message] : e.issues()) {
        std::cerr << "  " << path << ": " << message << "\n";
    }
}

int write_and_report(const oscmix::ResultRecord &record, const std::string &out_path) {
    const auto [csv, js] = oscmix::write_record(record, out_path);
    std::cout << "wrote " << csv << " and " << js << "\n";
    for (const auto &row : record.rows) {
        std::cout << "  averaged = " << row.averaged.real();
        if (row.averaged.imag() != 0.0) std::cout << " + " << row.averaged.imag() << "i";
        std::cout << ", mixed = " << row.mixed.real();
        if (row.mixed.imag() != 0.0) std::cout << " + " << row.mixed.imag() << "i";
        if (row.verdict != "n/a") std::cout << ", verdict = " << row.verdict;
        std::cout << "\n";
    }
    if (record.verdict != "n/a") std::cout << "verdict: " << record.verdict << "\n";
    return kExitOk;
}

/// On a numerical failure the record still gets written, carrying the error.
int write_error_record(const oscmix::ScenarioConfig &cfg, const std::string &message) {
    try {
        oscmix::ResultRecord record;
        record.config_hash = oscmix::config_hash_hex(cfg.raw);
        record.timestamp = "";
        record.software_version = oscmix::kVersion;
        record.kind = oscmix::to_string(cfg.kind);
        record.verdict = "error";
        record.notes["error"] = message;
        oscmix::write_record(record, cfg.output_path);
    } catch (...) {
        // the original numerical error stays the reported one
    }
    return kExitNumerical;
}

std::vector<double> parse_values(const std::string &list) {
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception &) {
            throw oscmix::ValidationError("values", "'" + item + "' is not a number");
        }
    }
    return values;
}

void list_scenarios() {
    std::cout <<
        "two_state           parameters: A, B (required, > 0), omega, phi0, source\n"
        "                    ('oscillating'|'mixed'), quadrature_nodes\n"
        "countable           parameters: a_index, b_index, B (required), chi, and either\n"
        "                    amplitudes=[[re,im],...] or preset + levels + temperature\n"
        "continuum           parameters: Omega, C1, C2 (required), bins, x_min, x_max,\n"
        "                    center, width, Phi, delta_x, delta_t, window_center,\n"
        "                    window_half_width, shots\n"
        "pointer_mc          parameters: A, B (required), omega, phi0, g, sigma, cells,\n"
        "                    span, trials, bins, estimator ('both'|'pooled'|'time_binned')\n"
        "strong_equivalence  parameters: dim, trials, cycles\n"
        "\n"
        "common keys: kind (required), seed, output_path, averaging {start, duration,\n"
        "nodes}\n"
        "presets: blackbody, decoherence, solid_state, unruh, hawking (illustrative\n"
        "amplitude laws)\n"
        "environment: OSCMIX_OUTPUT_DIR overrides the output directory\n";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"oscmix: tells quickly oscillating pure states from mixed ones"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path;
    std::string axis;
    std::string values_list;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("config", config_path, "scenario config (JSON)")->required();
        cmd->add_option("--seed", ov.seed, "override the config seed");
        cmd->add_option("--out", ov.out, "override the output path");
        cmd->add_option("--workers", ov.workers, "concurrent sweep points")
            ->check(CLI::PositiveNumber);
    };

    CLI::App *run_cmd = app.add_subcommand("run", "execute one scenario");
    add_common(run_cmd);
    CLI::App *sweep_cmd = app.add_subcommand("sweep", "execute a scenario across axis values");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis, "parameter to sweep (or AB)")->required();
    sweep_cmd->add_option("--values", values_list, "comma-separated axis values")->required();
    CLI::App *validate_cmd = app.add_subcommand("validate", "check a config and exit");
    validate_cmd->add_option("config", config_path, "scenario config (JSON)")->required();
    CLI::App *list_cmd = app.add_subcommand("list-scenarios", "describe the scenario kinds");

    CLI11_PARSE(app, argc, argv);

    if (list_cmd->parsed()) {
        list_scenarios();
        return kExitOk;
    }

    if (validate_cmd->parsed()) {
        try {
            oscmix::load_config(config_path);
            std::cout << "config is valid\n";
            return kExitOk;
        } catch (const oscmix::ValidationError &e) {
            print_issues(e);
            return kExitValidation;
        } catch (const oscmix::ParseError &e) {
            std::cerr << e.what() << "\n";
            return kExitValidation;
        }
    }

    oscmix::ScenarioConfig cfg;
    try {
        cfg = load_with_overrides(config_path, ov);
    } catch (const oscmix::ValidationError &e) {
        print_issues(e);
        return kExitValidation;
    } catch (const oscmix::ParseError &e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (run_cmd->parsed()) {
            return write_and_report(run_scenario(cfg), cfg.output_path);
        }
        const std::vector<double> values = parse_values(values_list);
        return write_and_report(sweep_scenario(cfg, axis, values, ov.workers),
                                cfg.output_path);
    } catch (const oscmix::ValidationError &e) {
        print_issues(e);
        return kExitValidation;
    } catch (const oscmix::IoError &e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::ios_base::failure &e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    } catch (const oscmix::Error &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return write_error_record(cfg, e.what());
    }
}
