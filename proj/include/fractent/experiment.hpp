#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fractent/entanglement.hpp"
#include "fractent/su2.hpp"
#include "fractent/sun.hpp"

namespace fractent {

// Flat key = value experiment description; round-trips losslessly
// through parse_config / serialize_config.
struct ExperimentConfig {
    enum class Model { Su2, So4, Su3 };

    struct Support {
        std::string kind = "cantor";  // cantor | teepee | basis
        int n_keep = 2;
        int inv_r = 3;
        int k = 0;
        std::string axis = "phi";       // cantor: phi | theta
        std::string pattern = "spread";  // spread | random
        std::uint64_t pattern_seed = 0;
        double theta_fixed = 1.57079632679489661923;
        double phi_fixed = 0.0;
        double theta_max = 3.14159265358979323846;
        int quadrature_nodes = 64;
        std::vector<int> basis_m;  // kind = basis: M / (Ms, Mt) / (M_1..M_2s)
        int pair = 0;              // su3: angular pair of this factor
        bool teepee = false;       // su3: sweep this factor's theta as a teepee
    };

    std::string name = "custom";
    Model model = Model::Su2;
    int two_s = 1;
    int L = 200;
    std::uint64_t seed = 1;
    std::string profile = "equal";      // equal | type_i | type_ii
    std::string zero_count = "none";    // none | k2 | k4
    std::string zero_mode = "support";  // support | product (su3 factorized supports)
    std::optional<double> target_dimension;
    double tolerance = 0.03;
    double trim = 0.0;
    std::vector<Support> supports;
    std::vector<int> n_set;       // empty = every cut 1..L-1
    std::vector<int> df_k_list;   // nonempty: also extract d_f(k) per step
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

struct ExperimentResult {
    struct Entry {
        std::string label;
        ExperimentConfig config;
        EntropyProfile profile;
        DfEstimate estimate;
        std::optional<double> target;
        double tolerance = 0.03;
        double runtime_seconds = 0.0;
        std::vector<std::pair<int, double>> df_by_k;
        std::string note;
    };
    std::string id;
    std::vector<Entry> entries;
    bool within_tolerance() const;
};

// Assemble the configured state and sweep the cuts. The entry carries
// the fit against the configured (or derived) target dimension.
ExperimentResult::Entry run_single(const ExperimentConfig& config, int threads);

ExperimentResult run_custom(const ExperimentConfig& config, int threads);

// Presets reproducing the reference figures (fig1a..fig8b; a bare figure id
// such as "fig2" runs all its panels).
std::vector<std::string> figure_ids();
std::vector<ExperimentConfig> figure_configs(const std::string& id, std::uint64_t seed);
ExperimentResult run_figure(const std::string& id, std::uint64_t seed, int threads);

// CSV ("n,S_bits") and JSON-summary writers; returns the file paths.
std::vector<std::string> write_bundle(const ExperimentResult& result, const std::string& out_dir);

// Randomized pipeline-vs-dense-oracle comparison (small systems).
struct OracleCheckResult {
    int cases = 0;
    double max_amp_error = 0.0;
    double max_entropy_error = 0.0;
    bool pass = false;
};
OracleCheckResult oracle_check(int cases, std::uint64_t seed);

}  // namespace fractent
