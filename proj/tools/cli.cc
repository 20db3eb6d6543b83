// Copyright 2026 The povm-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "povm_forge/csv.h"
#include "povm_forge/error.h"
#include "povm_forge/reconstruction.h"
#include "povm_forge/simulation.h"
#include "povm_forge/wigner.h"

namespace povm_forge::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kModelTruncation = 8;
constexpr std::size_t kWignerTruncation = 60;
constexpr const char *kSeedVariable = "POVM_FORGE_SEED";

const char *kGrammar = R"(Detector specs (--detector):
  apd:ETA                      on/off detector with efficiency ETA
  tmd:P1,...,PB                B-bin multiplexed detector with bin probabilities P1..PB
  builtin:paper-tmd-8bin[,L]   the shipped measured 8-bin convolution matrix
  Loss for tmd/builtin comes from --loss (or the optional ,L suffix on builtin).

Probe specs (--probes):
  linspace:A,B,N   N mean photon numbers evenly spaced on [A, B]
  const:V,N        N copies of V
  list:V1,V2,...   explicit values
  file:PATH        probe CSV (index,mean_photon,avg_power_W,wavelength_m,rep_rate_Hz)

Exit codes: 0 ok, 2 usage, 3 incomplete probe set, 4 I/O, 5 solver did not converge.
The POVM_FORGE_SEED environment variable overrides --seed.)";

double parse_number(const std::string &text, const std::string &what) {
    try {
        return parse_double(text, what);
    } catch (const IoError &e) {
        throw DomainError(e.what());
    }
}

std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) {
        parts.push_back(part);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

std::pair<std::string, std::string> split_kind(const std::string &spec, const std::string &what) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw DomainError(what + " spec '" + spec + "' needs the form kind:params");
    }
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::size_t parse_count(const std::string &text, const std::string &what) {
    double v = parse_number(text, what);
    if (v < 1.0 || v != std::floor(v) || v > 1e7) {
        throw DomainError(what + " must be a positive integer, got '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_to(const std::string &path, std::ostream &fallback, const std::function<void(std::ostream &)> &emit) {
    if (path.empty() || path == "-") {
        emit(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    emit(file);
    file.flush();
    if (!file) {
        throw IoError("failed writing '" + path + "'");
    }
}

json matrix_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row[static_cast<std::size_t>(k)] = m(i, k);
        }
        rows.push_back(row);
    }
    return rows;
}

double max_column_defect(const Eigen::MatrixXd &m) {
    return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
}

std::uint64_t effective_seed(const RunConfig &cfg) {
    const char *env = std::getenv(kSeedVariable);
    if (env == nullptr || *env == '\0') {
        return cfg.seed;
    }
    std::string text(env);
    char *end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end == text.c_str() || *end != '\0' || text.front() == '-') {
        throw DomainError(std::string(kSeedVariable) + " must be an unsigned integer, got '" + text + "'");
    }
    return v;
}

void validate_config(const RunConfig &cfg) {
    if (cfg.format != "csv" && cfg.format != "json") {
        throw DomainError("--format must be csv or json");
    }
    if (cfg.tail != "truncate" && cfg.tail != "saturate") {
        throw DomainError("--tail must be truncate or saturate");
    }
    if (cfg.dim == 0) {
        throw DomainError("--dim must be at least 1");
    }
    if (cfg.shots < 0) {
        throw DomainError("--shots must be nonnegative");
    }
    if (cfg.threads == 0) {
        throw DomainError("--threads must be at least 1");
    }
}

int cmd_model(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    std::size_t truncation = cfg.truncation ? cfg.truncation : kModelTruncation;
    DetectorModel model = parse_detector(cfg.detector, cfg.loss, truncation);
    if ((!cfg.loss_output.empty() || !cfg.conv_output.empty()) && !model.conv) {
        throw DomainError("detector " + model.description + " has no loss or convolution matrix");
    }
    Eigen::MatrixXd povm = model.povm.as_matrix();
    if (cfg.format == "json") {
        json j;
        j["detector"] = model.description;
        j["truncation"] = truncation;
        if (model.loss) {
            j["loss_fraction"] = model.loss->loss_fraction();
            j["loss_matrix"] = matrix_json(model.loss->entries());
        }
        if (model.conv) {
            j["convolution_matrix"] = matrix_json(model.conv->entries());
        }
        j["povm"] = matrix_json(povm);
        write_to(cfg.output, out, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
    } else {
        write_to(cfg.output, out, [&](std::ostream &o) { write_povm_csv(o, model.povm); });
        if (!cfg.loss_output.empty()) {
            write_to(cfg.loss_output, out, [&](std::ostream &o) { write_matrix_csv(o, model.loss->entries(), "n_out"); });
        }
        if (!cfg.conv_output.empty()) {
            write_to(cfg.conv_output, out, [&](std::ostream &o) { write_matrix_csv(o, model.conv->entries(), "clicks"); });
        }
    }
    err << "model " << model.description << ": " << model.povm.outcomes() << " outcomes, truncation " << truncation
        << '\n';
    if (model.loss) {
        err << "  loss matrix max |column sum - 1| = " << format_double(max_column_defect(model.loss->entries()))
            << '\n';
    }
    if (model.conv) {
        err << "  convolution matrix max |column sum - 1| = "
            << format_double(max_column_defect(model.conv->entries())) << '\n';
    }
    err << "  POVM max |sum_j diag_j[n] - 1| = " << format_double(model.povm.completeness_defect()) << '\n';
    return kExitOk;
}

int cmd_completeness(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    ProbeSet probes = parse_probes(cfg.probes, cfg.dim, cfg.wavelength, cfg.rep_rate);
    CompletenessReport report{0.0, std::numeric_limits<double>::infinity(), false, probes.size() > cfg.dim};
    std::string method = probes.size() > cfg.dim ? "gram" : "square";
    if (probes.size() < cfg.dim) {
        method = "underdetermined";
        err << "only " << probes.size() << " probes for dimension " << cfg.dim << '\n';
    } else {
        report = completeness_check(probes);
    }
    const char *verdict = report.complete ? "complete" : "incomplete";
    if (cfg.format == "json") {
        json j{{"probes", probes.size()},
               {"dimension", cfg.dim},
               {"method", method},
               {"determinant", report.determinant},
               {"condition_number", std::isfinite(report.condition_number) ? json(report.condition_number)
                                                                           : json("inf")},
               {"verdict", verdict}};
        write_to(cfg.output, out, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
    } else {
        write_to(cfg.output, out, [&](std::ostream &o) {
            o << "key,value\n";
            o << "probes," << probes.size() << '\n';
            o << "dimension," << cfg.dim << '\n';
            o << "method," << method << '\n';
            o << "determinant," << format_double(report.determinant) << '\n';
            o << "condition_number," << format_double(report.condition_number) << '\n';
            o << "verdict," << verdict << '\n';
        });
    }
    return report.complete ? kExitOk : kExitIncomplete;
}

int cmd_simulate(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    ProbeSet probes = parse_probes(cfg.probes, cfg.dim, cfg.wavelength, cfg.rep_rate);
    std::size_t truncation =
        cfg.truncation ? cfg.truncation
                       : default_truncation(probes.max_mean_photon() * (1.0 + std::max(0.0, cfg.power_error)));
    DetectorModel model = parse_detector(cfg.detector, cfg.loss, truncation);
    SimulationOptions options{cfg.threads, cfg.power_error};
    TomographyDataset dataset = cfg.shots == 0
                                    ? exact_dataset(model.povm, probes, options)
                                    : sample_dataset(model.povm, probes, cfg.shots, effective_seed(cfg), options);
    write_to(cfg.output, out, [&](std::ostream &o) {
        if (cfg.format == "json") {
            write_dataset_json(o, dataset);
        } else {
            write_dataset_csv(o, dataset);
        }
    });
    err << "simulated " << probes.size() << " probes on " << model.description << " (truncation " << truncation
        << ", " << (cfg.shots == 0 ? std::string("exact probabilities") : std::to_string(cfg.shots) + " shots")
        << ")\n";
    return kExitOk;
}

int cmd_reconstruct(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    if (cfg.input.empty()) {
        throw DomainError("reconstruct needs --input");
    }
    std::string text = read_file(cfg.input);
    std::istringstream in(text);
    auto first = text.find_first_not_of(" \t\r\n");
    auto load = [&] {
        try {
            return (first != std::string::npos && text[first] == '{') ? read_dataset_json(in)
                                                                       : read_dataset_csv(in, cfg.wavelength, cfg.rep_rate);
        } catch (const DomainError &e) {
            throw IoError("invalid dataset '" + cfg.input + "': " + e.what());
        }
    };
    TomographyDataset dataset = load();
    ReconstructionProblem problem = build_problem(
        dataset, cfg.dim, cfg.smoothing, cfg.tail == "saturate" ? TailHandling::kSaturate : TailHandling::kTruncate);
    for (const auto &w : problem.warnings) {
        err << "warning: " << w << '\n';
    }
    SolverOptions options;
    options.max_iterations = cfg.max_iterations;
    ReconstructedPovm result = reconstruct(problem, options);
    write_to(cfg.output, out, [&](std::ostream &o) {
        if (cfg.format == "json") {
            write_reconstruction_json(o, result);
        } else {
            write_povm_csv(o, result.povm);
        }
    });
    err << "reconstructed " << result.povm.outcomes() << " outcomes x " << cfg.dim
        << " photon numbers: residual " << format_double(result.residual) << ", " << result.iterations
        << " iterations, " << (result.converged ? "converged" : "not converged") << '\n';
    if (!result.converged) {
        err << "error: solver hit the iteration cap; the best iterate was written\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_wigner(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    std::size_t truncation = cfg.truncation ? cfg.truncation : kWignerTruncation;
    DetectorModel model = parse_detector(cfg.detector, cfg.loss, truncation);
    if (cfg.outcome < 0 || static_cast<std::size_t>(cfg.outcome) >= model.povm.outcomes()) {
        throw DomainError("--outcome must lie in [0, " + std::to_string(model.povm.outcomes() - 1) + "]");
    }
    const PovmElement &element = model.povm[static_cast<std::size_t>(cfg.outcome)];
    if (!(cfg.extent > 0.0)) {
        throw DomainError("--extent must be positive");
    }
    WignerGrid grid{-cfg.extent, cfg.extent, -cfg.extent, cfg.extent, cfg.points, cfg.hbar};
    grid.validate();
    int nodes = radial_nodes(element, cfg.r_max, cfg.samples, cfg.hbar);

    if (!cfg.output.empty() || !cfg.gnuplot.empty()) {
        WignerField field = povm_wigner(element, grid);
        if (!cfg.output.empty()) {
            write_to(cfg.output, out, [&](std::ostream &o) {
                if (cfg.format == "json") {
                    json j{{"label", field.label},
                           {"x", {grid.x_min, grid.x_max}},
                           {"p", {grid.p_min, grid.p_max}},
                           {"points_per_axis", grid.points_per_axis},
                           {"hbar", grid.hbar},
                           {"values", matrix_json(field.values)}};
                    o << j.dump() << '\n';
                } else {
                    write_wigner_csv(o, field);
                }
            });
        }
        if (!cfg.gnuplot.empty()) {
            write_to(cfg.gnuplot, out, [&](std::ostream &o) { write_wigner_matrix(o, field); });
        }
    }
    write_to(cfg.cross_section, out,
             [&](std::ostream &o) { write_cross_section_csv(o, element, cfg.r_max, cfg.samples, cfg.hbar); });
    err << model.description << " outcome " << cfg.outcome << ": W(0,0) = "
        << format_double(diagonal_wigner(element.diag, 0.0, cfg.hbar)) << ", radial nodes on (0, "
        << format_double(cfg.r_max) << "] = " << nodes << '\n';
    return kExitOk;
}

// Remembers, per subcommand, how to copy a field from a config-file RunConfig
// when the matching flag was not given.
struct Binding {
    CLI::App *command;
    CLI::Option *option;
    std::function<void(RunConfig &, const RunConfig &)> copy;
};

template <typename T>
CLI::Option *bind_field(std::vector<Binding> &bindings, CLI::App *command, RunConfig &cfg, const std::string &flag,
                  T RunConfig::*field, const std::string &help) {
    CLI::Option *opt = command->add_option(flag, cfg.*field, help)->capture_default_str();
    bindings.push_back({command, opt, [field](RunConfig &dst, const RunConfig &src) { dst.*field = src.*field; }});
    return opt;
}

}  // namespace

std::string config_to_json(const RunConfig &c) {
    json j{{"command", c.command},
           {"detector", c.detector},
           {"loss", c.loss},
           {"truncation", c.truncation},
           {"probes", c.probes},
           {"wavelength", c.wavelength},
           {"rep_rate", c.rep_rate},
           {"dim", c.dim},
           {"shots", c.shots},
           {"seed", c.seed},
           {"threads", c.threads},
           {"power_error", c.power_error},
           {"smoothing", c.smoothing},
           {"tail", c.tail},
           {"max_iterations", c.max_iterations},
           {"format", c.format},
           {"input", c.input},
           {"output", c.output},
           {"loss_output", c.loss_output},
           {"conv_output", c.conv_output},
           {"outcome", c.outcome},
           {"extent", c.extent},
           {"points", c.points},
           {"hbar", c.hbar},
           {"r_max", c.r_max},
           {"samples", c.samples},
           {"cross_section", c.cross_section},
           {"gnuplot", c.gnuplot}};
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string &text) {
    RunConfig c;
    try {
        json j = json::parse(text);
        if (!j.is_object()) {
            throw DomainError("config must be a JSON object");
        }
        for (const auto &[key, value] : j.items()) {
            if (key == "command") c.command = value.get<std::string>();
            else if (key == "detector") c.detector = value.get<std::string>();
            else if (key == "loss") c.loss = value.get<double>();
            else if (key == "truncation") c.truncation = value.get<std::size_t>();
            else if (key == "probes") c.probes = value.get<std::string>();
            else if (key == "wavelength") c.wavelength = value.get<double>();
            else if (key == "rep_rate") c.rep_rate = value.get<double>();
            else if (key == "dim") c.dim = value.get<std::size_t>();
            else if (key == "shots") c.shots = value.get<std::int64_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "threads") c.threads = value.get<unsigned>();
            else if (key == "power_error") c.power_error = value.get<double>();
            else if (key == "smoothing") c.smoothing = value.get<double>();
            else if (key == "tail") c.tail = value.get<std::string>();
            else if (key == "max_iterations") c.max_iterations = value.get<int>();
            else if (key == "format") c.format = value.get<std::string>();
            else if (key == "input") c.input = value.get<std::string>();
            else if (key == "output") c.output = value.get<std::string>();
            else if (key == "loss_output") c.loss_output = value.get<std::string>();
            else if (key == "conv_output") c.conv_output = value.get<std::string>();
            else if (key == "outcome") c.outcome = value.get<int>();
            else if (key == "extent") c.extent = value.get<double>();
            else if (key == "points") c.points = value.get<std::size_t>();
            else if (key == "hbar") c.hbar = value.get<double>();
            else if (key == "r_max") c.r_max = value.get<double>();
            else if (key == "samples") c.samples = value.get<std::size_t>();
            else if (key == "cross_section") c.cross_section = value.get<std::string>();
            else if (key == "gnuplot") c.gnuplot = value.get<std::string>();
            else throw DomainError("unknown config key '" + key + "'");
        }
    } catch (const json::exception &e) {
        throw DomainError(std::string("malformed config: ") + e.what());
    }
    return c;
}

DetectorModel parse_detector(const std::string &spec, double loss, std::size_t truncation) {
    auto [kind, params] = split_kind(spec, "detector");
    if (kind == "apd") {
        if (loss != 0.0) {
            throw DomainError("apd detectors take no --loss; fold it into the efficiency");
        }
        auto parts = split(params, ',');
        if (parts.size() != 1) {
            throw DomainError("apd spec is apd:EFFICIENCY");
        }
        return make_apd_model(parse_number(parts[0], "apd efficiency"), truncation);
    }
    if (kind == "tmd") {
        std::vector<double> bins;
        for (const auto &p : split(params, ',')) {
            bins.push_back(parse_number(p, "bin probability"));
        }
        return make_tmd_model(bins, loss, truncation);
    }
    if (kind == "builtin") {
        auto parts = split(params, ',');
        if (parts.empty() || parts.size() > 2 || parts[0] != kBuiltinTmdName) {
            throw DomainError("builtin spec is builtin:" + std::string(kBuiltinTmdName) + "[,LOSS]");
        }
        if (parts.size() == 2) {
            double suffix = parse_number(parts[1], "loss");
            if (loss != 0.0 && loss != suffix) {
                throw DomainError("loss given twice with different values");
            }
            loss = suffix;
        }
        return make_builtin_tmd_model(loss, truncation);
    }
    throw DomainError("unknown detector kind '" + kind + "' (expected apd, tmd or builtin)");
}

ProbeSet parse_probes(const std::string &spec, std::size_t dim, double wavelength, double rep_rate) {
    auto [kind, params] = split_kind(spec, "probe");
    if (kind == "file") {
        std::istringstream in(read_file(params));
        return read_probes_csv(in, dim);
    }
    auto parts = split(params, ',');
    std::vector<double> means;
    if (kind == "linspace") {
        if (parts.size() != 3) {
            throw DomainError("linspace spec is linspace:A,B,N");
        }
        means = linspace(parse_number(parts[0], "linspace start"), parse_number(parts[1], "linspace end"),
                         parse_count(parts[2], "linspace count"));
    } else if (kind == "const") {
        if (parts.size() != 2) {
            throw DomainError("const spec is const:V,N");
        }
        means.assign(parse_count(parts[1], "const count"), parse_number(parts[0], "const value"));
    } else if (kind == "list") {
        for (const auto &p : parts) {
            means.push_back(parse_number(p, "probe mean photon number"));
        }
    } else {
        throw DomainError("unknown probe kind '" + kind + "' (expected linspace, const, list or file)");
    }
    return ProbeSet::from_mean_photons(means, dim, wavelength, rep_rate);
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    std::string config_path;
    std::vector<Binding> bindings;

    CLI::App app{"Detector tomography toolkit: model, probe, simulate, reconstruct and plot diagonal POVMs.",
                 "povm_forge"};
    app.footer(kGrammar);
    app.require_subcommand(1);
    app.set_version_flag("--version", "povm_forge 1.0.0");

    auto add_common = [&](CLI::App *c) {
        c->add_option("--config", config_path, "JSON run configuration; explicit flags override it");
        bind_field(bindings, c, cfg, "--format", &RunConfig::format, "Output format: csv or json");
        bind_field(bindings, c, cfg, "-o,--output", &RunConfig::output, "Output path (default: stdout)");
    };
    auto add_detector = [&](CLI::App *c, const std::string &truncation_help) {
        bind_field(bindings, c, cfg, "--detector", &RunConfig::detector, "Detector spec (see below)");
        bind_field(bindings, c, cfg, "--loss", &RunConfig::loss, "Loss fraction for tmd/builtin detectors");
        bind_field(bindings, c, cfg, "--truncation", &RunConfig::truncation, truncation_help);
    };
    auto add_probes = [&](CLI::App *c) {
        bind_field(bindings, c, cfg, "--probes", &RunConfig::probes, "Probe spec (see below)");
        bind_field(bindings, c, cfg, "--wavelength", &RunConfig::wavelength, "Probe wavelength in m");
        bind_field(bindings, c, cfg, "--rep-rate", &RunConfig::rep_rate, "Pulse repetition rate in Hz");
        bind_field(bindings, c, cfg, "--dim", &RunConfig::dim, "Photon-number dimension d");
    };

    CLI::App *model = app.add_subcommand("model", "Build L, C and the POVM diagonals for a detector");
    add_common(model);
    add_detector(model, "Fock truncation N (0 means 8)");
    bind_field(bindings, model, cfg, "--loss-output", &RunConfig::loss_output, "Also write the loss matrix CSV here");
    bind_field(bindings, model, cfg, "--conv-output", &RunConfig::conv_output, "Also write the convolution matrix CSV here");

    CLI::App *completeness = app.add_subcommand("completeness", "Determinant test of a coherent probe set");
    add_common(completeness);
    add_probes(completeness);

    CLI::App *simulate = app.add_subcommand("simulate", "Generate a tomography dataset");
    add_common(simulate);
    add_detector(simulate, "Fock truncation N (0 means automatic)");
    add_probes(simulate);
    bind_field(bindings, simulate, cfg, "--shots", &RunConfig::shots, "Shots per probe; 0 writes exact probabilities");
    bind_field(bindings, simulate, cfg, "--seed", &RunConfig::seed, "Master RNG seed");
    bind_field(bindings, simulate, cfg, "--threads", &RunConfig::threads, "Worker threads");
    bind_field(bindings, simulate, cfg, "--power-error", &RunConfig::power_error,
         "Relative systematic error of the true probe power");

    CLI::App *recon = app.add_subcommand("reconstruct", "Reconstruct POVM diagonals from a dataset");
    add_common(recon);
    bind_field(bindings, recon, cfg, "-i,--input", &RunConfig::input, "Dataset file (CSV or JSON)");
    bind_field(bindings, recon, cfg, "--dim", &RunConfig::dim, "Photon-number dimension d");
    bind_field(bindings, recon, cfg, "--wavelength", &RunConfig::wavelength, "Wavelength for CSV datasets, in m");
    bind_field(bindings, recon, cfg, "--rep-rate", &RunConfig::rep_rate, "Repetition rate for CSV datasets, in Hz");
    bind_field(bindings, recon, cfg, "--smoothing", &RunConfig::smoothing, "Smoothing weight");
    bind_field(bindings, recon, cfg, "--tail", &RunConfig::tail, "Poisson mass above d-1: truncate or saturate");
    bind_field(bindings, recon, cfg, "--max-iterations", &RunConfig::max_iterations, "Solver iteration cap");

    CLI::App *wigner = app.add_subcommand("wigner", "Wigner function, cross section and nodes of a POVM element");
    add_common(wigner);
    add_detector(wigner, "Fock truncation N (0 means 60)");
    bind_field(bindings, wigner, cfg, "--outcome", &RunConfig::outcome, "POVM element index");
    bind_field(bindings, wigner, cfg, "--extent", &RunConfig::extent, "Grid covers [-extent, extent] on both axes");
    bind_field(bindings, wigner, cfg, "--points", &RunConfig::points, "Grid points per axis");
    bind_field(bindings, wigner, cfg, "--hbar", &RunConfig::hbar, "Convention constant");
    bind_field(bindings, wigner, cfg, "--r-max", &RunConfig::r_max, "Largest radius for cross section and nodes");
    bind_field(bindings, wigner, cfg, "--samples", &RunConfig::samples, "Radial samples");
    bind_field(bindings, wigner, cfg, "--cross-section", &RunConfig::cross_section, "Cross-section CSV path (default: stdout)");
    bind_field(bindings, wigner, cfg, "--gnuplot", &RunConfig::gnuplot, "Also write a gnuplot nonuniform matrix here");

    std::vector<const char *> argv{"povm_forge"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App *active = app.get_subcommands().front();
        if (!config_path.empty()) {
            RunConfig file = config_from_json(read_file(config_path));
            if (!file.command.empty() && file.command != active->get_name()) {
                throw DomainError("config is for '" + file.command + "', not '" + active->get_name() + "'");
            }
            for (const auto &b : bindings) {
                if (b.command == active && b.option->count() == 0) {
                    b.copy(cfg, file);
                }
            }
        }
        cfg.command = active->get_name();
        validate_config(cfg);

        if (active == model) return cmd_model(cfg, out, err);
        if (active == completeness) return cmd_completeness(cfg, out, err);
        if (active == simulate) return cmd_simulate(cfg, out, err);
        if (active == recon) return cmd_reconstruct(cfg, out, err);
        return cmd_wigner(cfg, out, err);
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RefusalError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace povm_forge::cli
