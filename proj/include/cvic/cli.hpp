// Copyright 2026 The cvic Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Command-line front end: predict, table, rank and simulate.
 *
 * Exit codes: 0 success, 1 numerical result disagrees with the closed form,
 * 2 usage error.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvic/completeness.hpp"
#include "cvic/fock.hpp"
#include "cvic/io.hpp"
#include "cvic/povm.hpp"
#include "cvic/tomo.hpp"

namespace cvic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDisagree = 1;
inline constexpr int kExitUsage = 2;

/// Thrown for malformed flag values; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        out.push_back(cur);
    }
    return out;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size()) {
        throw UsageError("not a number: '" + s + "'");
    }
    return v;
}

inline int parse_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not an integer: '" + s + "'");
    }
    if (used != s.size()) {
        throw UsageError("not an integer: '" + s + "'");
    }
    return v;
}

/// Accepts `1.5`, `-2i`, `i`, `0.3+0.4i`, `1e-3-2j`.
inline Complex parse_complex(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) {
        throw UsageError("empty complex number");
    }
    const char last = s.back();
    if (last != 'i' && last != 'j') {
        return {parse_double(s), 0.0};
    }
    s.pop_back();
    std::size_t split_at = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split_at = k;
            break;
        }
    }
    auto imag_part = [](const std::string& t) {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        return parse_double(t);
    };
    if (split_at == std::string::npos) {
        return {0.0, imag_part(s)};
    }
    return {parse_double(s.substr(0, split_at)), imag_part(s.substr(split_at))};
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& t : split(s, ',')) {
        out.push_back(parse_int(t));
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split(s, ',')) {
        out.push_back(parse_double(t));
    }
    return out;
}

/// `0,4,8` or `d=5`
inline SupportSet parse_support(const std::string& s) {
    try {
        if (s.rfind("d=", 0) == 0) {
            return SupportSet::contiguous(parse_int(s.substr(2)));
        }
        auto idx = parse_int_list(s);
        return SupportSet(std::move(idx));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("bad support: ") + e.what());
    }
}

/**
 * State mini-language:
 *   fock:0,4,8@c0,c1,c2   pure state, amplitudes normalized on input
 *   mixed:maximally@d     1/d
 *   coherent:alpha@d      coherent state truncated to d levels, renormalized
 */
inline DensityMatrix parse_state(const std::string& spec) {
    const auto colon = spec.find(':');
    const auto at = spec.find('@');
    if (colon == std::string::npos || at == std::string::npos || at < colon) {
        throw UsageError("bad state spec '" + spec + "' (expected kind:args@args)");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string head = spec.substr(colon + 1, at - colon - 1);
    const std::string tail = spec.substr(at + 1);
    try {
        if (kind == "fock") {
            const auto idx = parse_int_list(head);
            const auto amps = split(tail, ',');
            if (idx.size() != amps.size()) {
                throw UsageError("fock state: " + std::to_string(idx.size()) + " indices but " +
                                 std::to_string(amps.size()) + " amplitudes");
            }
            const SupportSet support(idx);
            FockVector psi{CVector::Zero(support.max_index() + 1)};
            for (std::size_t k = 0; k < idx.size(); ++k) {
                psi.amplitudes(idx[k]) = parse_complex(amps[k]);
            }
            return DensityMatrix::pure(std::move(psi));
        }
        if (kind == "mixed") {
            if (head != "maximally") {
                throw UsageError("mixed state: only 'maximally' is supported");
            }
            return DensityMatrix::maximally_mixed(parse_int(tail));
        }
        if (kind == "coherent") {
            const int d = parse_int(tail);
            return DensityMatrix::pure(coherent_amplitudes(parse_complex(head), d).state);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("bad state spec: ") + e.what());
    }
    throw UsageError("unknown state kind '" + kind + "'");
}

/// Default simulated state on d levels: c_k proportional to exp(i k pi/3)/(k+1).
inline DensityMatrix default_state(int d) {
    FockVector psi{CVector(d)};
    for (int k = 0; k < d; ++k) {
        psi.amplitudes(k) = std::polar(1.0 / (k + 1), k * std::numbers::pi / 3.0);
    }
    return DensityMatrix::pure(std::move(psi));
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw UsageError("cannot open output file '" + path + "'");
    }
    f << text;
}

inline std::vector<double> resolve_phases(const SupportSet& support, int m,
                                          const std::string& phase_list) {
    if (!phase_list.empty() && m > 0) {
        throw UsageError("give either --m or --phases, not both");
    }
    std::vector<double> phases;
    if (!phase_list.empty()) {
        phases = parse_double_list(phase_list);
    } else if (m > 0) {
        phases = default_phases(support, m);
    } else {
        throw UsageError("one of --m or --phases is required");
    }
    if (!phases_distinct(phases)) {
        throw UsageError("phases must be distinct modulo pi");
    }
    return phases;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Informational completeness of truncated continuous-variable measurements",
                 "cvic"};
    app.require_subcommand(1);

    int d = 0;
    int m = 0;
    auto* predict = app.add_subcommand("predict", "closed-form number of independent elements");
    predict->add_option("--d", d, "Fock dimension")->required();
    predict->add_option("--m", m, "number of phase settings")->required();

    int d_min = 2;
    int d_max = 8;
    int m_max = 6;
    std::string out_path;
    std::string format = "csv";
    auto* table = app.add_subcommand("table", "numerical rank table over d and m");
    table->add_option("--d-min", d_min, "smallest dimension")->capture_default_str();
    table->add_option("--d-max", d_max, "largest dimension")->capture_default_str();
    table->add_option("--m-max", m_max, "largest number of phases")->capture_default_str();
    table->add_option("--out", out_path, "output path (default stdout)");
    table->add_option("--format", format, "csv or json")->capture_default_str();

    std::string support_text;
    std::string phase_list;
    std::optional<double> tol;
    int bins = 0;
    auto* rank = app.add_subcommand("rank", "numerical rank report for a support and phases");
    rank->add_option("--support", support_text, "index list (0,4,8) or d=N");
    rank->add_option("--d", d, "contiguous support 0..d-1");
    rank->add_option("--m", m, "number of default phases");
    rank->add_option("--phases", phase_list, "explicit comma-separated phases");
    rank->add_option("--bins", bins, "use binned POVMs with this many bins instead of continuous functionals");
    rank->add_option("--tol", tol, "override the rank tolerance");
    rank->add_option("--out", out_path, "output path (default stdout)");
    std::string rank_format = "json";
    rank->add_option("--format", rank_format, "json")->capture_default_str();

    std::string state_text;
    std::size_t samples = 100000;
    std::optional<std::uint64_t> seed;
    double x_max = 0.0;
    int max_iters = 5000;
    double epsilon = 0.5;
    bool with_data = false;
    auto* simulate = app.add_subcommand("simulate", "sample homodyne data and reconstruct by maximum likelihood");
    simulate->add_option("--state", state_text, "fock:0,1@c0,c1 | mixed:maximally@d | coherent:alpha@d");
    simulate->add_option("--d", d, "dimension (default state when --state is absent)");
    simulate->add_option("--m", m, "number of equispaced phases");
    simulate->add_option("--phases", phase_list, "explicit comma-separated phases");
    simulate->add_option("--bins", bins, "bins per phase (default 2d-1)");
    simulate->add_option("--x-max", x_max, "bin window half-width (default sqrt(4d+8))");
    simulate->add_option("--samples", samples, "samples per phase")->capture_default_str();
    simulate->add_option("--seed", seed, "RNG seed (required)");
    simulate->add_option("--max-iters", max_iters, "ML iteration cap")->capture_default_str();
    simulate->add_option("--epsilon", epsilon, "ML dilution")->capture_default_str();
    simulate->add_flag("--with-data", with_data, "include the binned counts in the output");
    simulate->add_option("--out", out_path, "output path (default stdout)");
    std::string simulate_format = "json";
    simulate->add_option("--format", simulate_format, "json")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*predict) {
            if (d < 1 || m < 1) {
                throw UsageError("--d and --m must be positive");
            }
            out << predicted_rank(d, m) << "\n";
            return kExitOk;
        }

        if (*table) {
            if (format != "csv" && format != "json") {
                throw UsageError("--format must be csv or json");
            }
            if (d_min < 1 || d_max < d_min || m_max < 1) {
                throw UsageError("malformed range");
            }
            const RankTable t = sweep_table(d_min, d_max, 1, m_max);
            if (format == "csv") {
                emit(t.to_csv(), out_path, out);
            } else {
                json cells = json::array();
                for (std::size_t i = 0; i < t.ds.size(); ++i) {
                    for (std::size_t j = 0; j < t.ms.size(); ++j) {
                        json c = rank_report_to_json(t.cells[i][j]);
                        c["d"] = t.ds[i];
                        c["m"] = t.ms[j];
                        c["ic"] = t.is_ic(i, j);
                        cells.push_back(std::move(c));
                    }
                }
                emit(json{{"cells", cells}, {"agree", t.all_agree()}}.dump(2) + "\n", out_path, out);
            }
            const auto diffs = t.disagreements();
            if (!diffs.empty()) {
                err << "numerical ranks disagree with m(2d-m) in " << diffs.size() << " cell(s):\n";
                for (const auto& line : diffs) {
                    err << "  " << line << "\n";
                }
                return kExitDisagree;
            }
            return kExitOk;
        }

        if (*rank) {
            if (rank_format != "json") {
                throw UsageError("rank only supports --format json");
            }
            if (!support_text.empty() && d > 0) {
                throw UsageError("give either --support or --d, not both");
            }
            if (support_text.empty() && d < 1) {
                throw UsageError("one of --support or --d is required");
            }
            const SupportSet support =
                support_text.empty() ? SupportSet::contiguous(d) : parse_support(support_text);
            const auto phases = resolve_phases(support, m, phase_list);
            RankReport report;
            if (bins > 0) {
                BinLayout layout{default_x_max(support.max_index() + 1), bins, true};
                report = numerical_rank(
                    design_matrix(MeasurementSpec::binned(support, phases, layout)), tol);
                if (support.is_contiguous()) {
                    report.predicted_rank = predicted_rank(support.size(),
                                                           static_cast<long>(phases.size()));
                }
            } else {
                report = rank_for_phases(support, phases, tol);
            }
            emit(rank_report_to_json(report).dump(2) + "\n", out_path, out);
            return kExitOk;
        }

        if (*simulate) {
            if (simulate_format != "json") {
                throw UsageError("simulate only supports --format json");
            }
            if (!seed) {
                throw UsageError("--seed is required");
            }
            if (state_text.empty() && d < 1) {
                throw UsageError("one of --state or --d is required");
            }
            const DensityMatrix truth = state_text.empty() ? default_state(d) : parse_state(state_text);
            if (d > 0 && truth.dim() != d) {
                throw UsageError("--d does not match the dimension of --state");
            }
            const int dim = truth.dim();
            const auto phases = resolve_phases(SupportSet::contiguous(dim), m, phase_list);
            if (samples < 1) {
                throw UsageError("--samples must be positive");
            }
            BinLayout layout = BinLayout::default_for(dim);
            if (bins > 0) {
                layout.n_bins = bins;
            }
            if (x_max > 0.0) {
                layout.x_max = x_max;
            }
            const MeasurementData data = simulate_measurement(truth, phases, layout, samples, *seed);
            const auto povms = povms_for(data, dim);
            const RankReport span = povm_span_rank(povms);
            const bool ic = span.numerical_rank == dim * dim;
            if (!ic) {
                err << "warning: measurement not IC: rank " << span.numerical_rank << " < "
                    << dim * dim << "\n";
            }
            const ReconstructionResult result = ml_reconstruct(data, povms, dim, max_iters, epsilon);
            json j = reconstruction_to_json(result);
            j["fidelity"] = fidelity(result.estimate, truth);
            j["span_rank"] = span.numerical_rank;
            j["informationally_complete"] = ic;
            j["seed"] = *seed;
            if (with_data) {
                j["data"] = measurement_data_to_json(data);
            }
            emit(j.dump(2) + "\n", out_path, out);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace cvic::cli
