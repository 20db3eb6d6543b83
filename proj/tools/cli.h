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

#ifndef POVM_FORGE_TOOLS_CLI_H
#define POVM_FORGE_TOOLS_CLI_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "povm_forge/detector.h"
#include "povm_forge/probes.h"

namespace povm_forge::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitIncomplete = 3,
    kExitIo = 4,
    kExitNotConverged = 5,
};

/// Every parameter any command reads. Zero truncation means "command default".
struct RunConfig {
    std::string command;
    std::string detector = "builtin:paper-tmd-8bin";
    double loss = 0.0;
    std::size_t truncation = 0;
    std::string probes = "linspace:0,40,400";
    double wavelength = kDefaultWavelength;
    double rep_rate = kDefaultRepRate;
    std::size_t dim = 30;
    std::int64_t shots = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double power_error = 0.0;
    double smoothing = 0.0;
    std::string tail = "truncate";
    int max_iterations = 50000;
    std::string format = "csv";
    std::string input;
    std::string output;
    std::string loss_output;
    std::string conv_output;
    int outcome = 0;
    double extent = 6.0;
    std::size_t points = 301;
    double hbar = 1.0;
    double r_max = 8.0;
    std::size_t samples = 4000;
    std::string cross_section;
    std::string gnuplot;

    bool operator==(const RunConfig &) const = default;
};

std::string config_to_json(const RunConfig &config);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const std::string &text);

/// apd:eta | tmd:p1,...,pB | builtin:paper-tmd-8bin[,loss]. Throws DomainError.
DetectorModel parse_detector(const std::string &spec, double loss, std::size_t truncation);

/// linspace:a,b,n | const:v,n | list:v1,... | file:path. Throws DomainError or IoError.
ProbeSet parse_probes(const std::string &spec, std::size_t dim, double wavelength, double rep_rate);

/// Runs one command line. Returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace povm_forge::cli

#endif  // POVM_FORGE_TOOLS_CLI_H
