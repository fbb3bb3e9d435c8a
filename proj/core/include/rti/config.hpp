#pragma once

#include <string>
#include <vector>

#include "rti/equilibrium.hpp"

namespace rti {

// Run-level configuration. The primitive fields mirror the key = value
// surface one-to-one so a parse/serialize round trip is lossless.

struct GridConfig {
    int n_elements = 128;  // per side
    std::vector<int> refinement = {64, 128, 256};
};

struct SweepConfig {
    double xi_min = 2.0;
    double xi_max = 60.0;
    int xi_steps = 30;
};

struct SynthConfig {
    double r3 = 10.0;
    double r4 = 20.0;
    int k = 3;
    std::vector<double> t_list = {0.5, 1.0, 2.0};
    int n_r = 64;
    int n_theta = 16;
};

struct EvolveRunConfig {
    double xi1 = 10.0;
    double xi2 = 0.0;
    double dt = 1e-3;
    double T = 1.0;
    std::string init = "mode";  // mode | random
    unsigned seed = 7;
};

struct OutputConfig {
    std::string directory = "rti_out";
    std::string format = "csv";  // csv | json
};

struct RunConfig {
    // [fluid]; gamma = 1 selects the affine law, gamma > 1 the power law
    double upper_K = 1.0;
    double upper_gamma = 1.0;
    double lower_K = 2.0;
    double lower_gamma = 1.0;
    double g = 1.0;
    double omega = 0.0;
    double m = 1.0;
    double l = 1.0;
    double interface_pressure = 2.0;

    GridConfig grid;
    SweepConfig sweep;
    SynthConfig synth;
    EvolveRunConfig evolve;
    OutputConfig output;

    FluidConfig fluid() const;

    // Aggregates every violation across all sections, including the fluid
    // block's own gate, and throws one ConfigRejected listing them.
    void validate() const;
};

// key = value sections [fluid] [grid] [sweep] [synth] [evolve] [output];
// '#' and ';' start comments. Malformed syntax throws ParseError with its
// line; semantic problems are collected and thrown as one ConfigRejected
// after the whole document has been read.
RunConfig parse_config(const std::string& text);

// Canonical form: fixed section and key order, floats at 17 significant
// digits. parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a over the canonical serialization of everything except [output],
// which is plumbing: redirecting artifacts must not look like new physics.
std::string config_hash(const RunConfig& cfg);

}  // namespace rti
