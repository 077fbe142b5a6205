#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fractent/errors.hpp"
#include "fractent/experiment.hpp"
#include "fractent/oracle.hpp"
#include "fractent/rng.hpp"

namespace fractent {

namespace {

using json = nlohmann::json;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kDimC2R3 = 0.6309297535714574;   // ln 2 / ln 3
constexpr double kDimC3R5 = 0.6826061944859854;   // ln 3 / ln 5

std::uint64_t factor_seed(std::uint64_t seed, int index) {
    return mix64(seed ^ (0xFAC70ULL + static_cast<std::uint64_t>(index)));
}

CoefficientProfile make_profile(const ExperimentConfig& cfg, int pair, std::uint64_t seed) {
    if (cfg.profile == "equal") return EqualProfile{};
    if (cfg.profile == "type_i") return standard_random_sets(seed);
    return pair == 0 ? CoefficientProfile{standard_continuous_primary()}
                     : CoefficientProfile{standard_continuous_secondary()};
}

ZeroPolicy zero_policy(const ExperimentConfig& cfg) {
    if (cfg.zero_count == "none") return ZeroPolicy::None;
    if (cfg.zero_count == "k2") return ZeroPolicy::KSquared;
    return ZeroPolicy::KFourth;
}

CantorSpec cantor_spec_of(const ExperimentConfig::Support& sup) {
    CantorSpec spec;
    spec.n_keep = sup.n_keep;
    spec.inv_r = sup.inv_r;
    spec.pattern = sup.pattern == "random" ? KeepPattern::SeededRandom : KeepPattern::Spread;
    spec.seed = sup.pattern_seed;
    return spec;
}

SupportSpec su2_support_of(const ExperimentConfig::Support& sup) {
    SupportSpec out;
    out.cantor = cantor_spec_of(sup);
    out.k = sup.k;
    out.theta_max = sup.theta_max;
    out.quadrature_nodes = sup.quadrature_nodes;
    if (sup.kind == "teepee") {
        out.kind = SupportSpec::Kind::Teepee;
    } else if (sup.axis == "theta") {
        out.kind = SupportSpec::Kind::CantorTheta;
        out.fixed_angle = sup.phi_fixed;
    } else {
        out.kind = SupportSpec::Kind::CantorPhi;
        out.fixed_angle = sup.theta_fixed;
    }
    return out;
}

double derived_target(const ExperimentConfig& cfg) {
    double target = 0.0;
    for (const auto& sup : cfg.supports) {
        if (sup.kind == "basis") {
            // Orthonormal basis states: d_f = N_B.
            target += cfg.model == ExperimentConfig::Model::Su3 ? cfg.two_s : 1.0;
        } else if (sup.kind == "teepee" || sup.teepee) {
            TeepeeSpec tp{cantor_spec_of(sup), sup.k, sup.theta_max, sup.quadrature_nodes};
            target += teepee_dimension(tp);
        } else {
            target += fractal_dimension(cantor_spec_of(sup));
        }
    }
    if (cfg.model == ExperimentConfig::Model::So4 && cfg.supports.size() == 1) target *= 2.0;
    return target;
}

WVector assemble_su2(const ExperimentConfig& cfg, const ExperimentConfig::Support& sup, int two_s,
                     int support_index, int k_override, int threads) {
    if (sup.kind == "basis") {
        if (sup.basis_m.size() != 1) throw ConfigError("basis support: need exactly one M");
        return basis_state(cfg.L, two_s, sup.basis_m[0]);
    }
    SupportSpec spec = su2_support_of(sup);
    if (k_override >= 0) spec.k = k_override;
    const std::uint64_t seed = factor_seed(cfg.seed, support_index);
    const ZeroInjection zeros{zero_count_for(zero_policy(cfg), spec.k), seed};
    return assemble_state(cfg.L, two_s, spec, make_profile(cfg, 0, seed), zeros, threads);
}

EntropyProfile profile_su3(const ExperimentConfig& cfg, const std::vector<int>& n_set, int threads,
                           int k_override) {
    if (cfg.supports.size() == 1 && cfg.supports[0].kind == "basis") {
        const auto& m = cfg.supports[0].basis_m;
        if (static_cast<int>(m.size()) != cfg.two_s)
            throw ConfigError("su3 basis support: need two_s M values");
        const WTensor w = basis_state_n(cfg.L, cfg.two_s, m);
        return entropy_profile_n(w, n_set, threads);
    }

    std::vector<FactorSupport> factors;
    const ZeroPolicy policy = zero_policy(cfg);
    const bool product_mode = cfg.zero_mode == "product";
    int index = 0;
    for (const auto& sup : cfg.supports) {
        if (sup.kind == "basis") throw ConfigError("su3: basis support cannot mix with factors");
        FactorSupport f;
        f.pair = sup.pair;
        f.cantor = cantor_spec_of(sup);
        f.k = k_override >= 0 ? k_override : sup.k;
        const std::uint64_t seed = factor_seed(cfg.seed, index);
        f.profile = make_profile(cfg, sup.pair, seed);
        f.zeros = product_mode ? ZeroInjection{0, seed}
                               : ZeroInjection{zero_count_for(policy, f.k), seed};
        f.theta_fixed = sup.theta_fixed;
        f.teepee = sup.teepee || sup.kind == "teepee";
        f.theta_max = sup.theta_max;
        f.quadrature_nodes = sup.quadrature_nodes;
        factors.push_back(std::move(f));
        ++index;
    }
    ProductZeros pz;
    if (product_mode) {
        const int k_eff = k_override >= 0 ? k_override : cfg.supports[0].k;
        pz.count = zero_count_for(policy, k_eff);
        pz.seed = cfg.seed;
    }
    const WTensor w = assemble_state_n(cfg.L, cfg.two_s, factors, pz);
    return entropy_profile_n(w, n_set, threads);
}

EntropyProfile profile_for(const ExperimentConfig& cfg, int threads, int k_override) {
    const std::vector<int> n_set = cfg.n_set.empty() ? all_cuts(cfg.L) : cfg.n_set;
    switch (cfg.model) {
        case ExperimentConfig::Model::Su2: {
            if (cfg.supports.size() != 1) throw ConfigError("su2: exactly one support");
            const WVector w = assemble_su2(cfg, cfg.supports[0], cfg.two_s, 0, k_override, threads);
            return entropy_profile(w, n_set, threads);
        }
        case ExperimentConfig::Model::So4: {
            if (cfg.supports.size() == 1 && cfg.supports[0].kind == "basis") {
                const auto& m = cfg.supports[0].basis_m;
                if (m.size() != 2) throw ConfigError("so4 basis support: need Ms, Mt");
                return so4_profile(basis_state(cfg.L, 1, m[0]), basis_state(cfg.L, 1, m[1]), n_set,
                                   threads);
            }
            if (cfg.supports.size() != 2) throw ConfigError("so4: need two sector supports");
            const WVector ws = assemble_su2(cfg, cfg.supports[0], 1, 0, k_override, threads);
            const WVector wt = assemble_su2(cfg, cfg.supports[1], 1, 1, k_override, threads);
            return so4_profile(ws, wt, n_set, threads);
        }
        case ExperimentConfig::Model::Su3:
            return profile_su3(cfg, n_set, threads, k_override);
    }
    throw std::logic_error("profile_for: unknown model");
}

}  // namespace

bool ExperimentResult::within_tolerance() const {
    for (const auto& e : entries) {
        if (!e.target) continue;
        if (!e.estimate.rel_err_vs_target || *e.estimate.rel_err_vs_target > e.tolerance)
            return false;
    }
    return !entries.empty();
}

ExperimentResult::Entry run_single(const ExperimentConfig& cfg, int threads) {
    const auto start = std::chrono::steady_clock::now();

    ExperimentResult::Entry entry;
    entry.label = cfg.name;
    entry.config = cfg;
    entry.tolerance = cfg.tolerance;
    entry.profile = profile_for(cfg, threads, -1);

    const bool basis_run = cfg.supports.size() == 1 && cfg.supports[0].kind == "basis";
    double target = cfg.target_dimension ? *cfg.target_dimension : derived_target(cfg);
    entry.target = target;
    const EntropyProfile fitted =
        cfg.trim > 0.0 ? trim_profile(entry.profile, cfg.trim) : entry.profile;
    entry.estimate = fit_df(fitted, target);

    if (!cfg.df_k_list.empty() && !basis_run) {
        const int native_k = cfg.supports[0].k;
        entry.df_by_k = df_convergence(
            [&](int k) {
                // The main profile already covers the support's own step.
                if (k == native_k) return entry.profile;
                return profile_for(cfg, threads, k);
            },
            cfg.df_k_list);
    }

    entry.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return entry;
}

ExperimentResult run_custom(const ExperimentConfig& cfg, int threads) {
    ExperimentResult result;
    result.id = cfg.name;
    result.entries.push_back(run_single(cfg, threads));
    return result;
}

namespace {

ExperimentConfig su2_cantor(const std::string& label, int two_s, int n_keep, int inv_r, int k,
                            const std::string& profile, const std::string& zeros, double target,
                            double tol, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.name = label;
    cfg.model = ExperimentConfig::Model::Su2;
    cfg.two_s = two_s;
    cfg.L = 200;
    cfg.seed = seed;
    cfg.profile = profile;
    cfg.zero_count = zeros;
    cfg.target_dimension = target;
    cfg.tolerance = tol;
    ExperimentConfig::Support sup;
    sup.kind = "cantor";
    sup.n_keep = n_keep;
    sup.inv_r = inv_r;
    sup.k = k;
    sup.theta_fixed = 0.5 * kPi;
    cfg.supports = {sup};
    return cfg;
}

ExperimentConfig su2_teepee(const std::string& label, int two_s, int n_keep, int inv_r, int k,
                            const std::string& profile, const std::string& zeros, double target,
                            double tol, std::uint64_t seed) {
    ExperimentConfig cfg = su2_cantor(label, two_s, n_keep, inv_r, k, profile, zeros, target, tol, seed);
    cfg.supports[0].kind = "teepee";
    // theta swept over [0, pi]: the numerics section demands the full
    // apex-to-antipode range for these runs.
    cfg.supports[0].theta_max = 2.0 * kPi;
    return cfg;
}

ExperimentConfig su3_product(const std::string& label, int n1, int r1, int n2, int r2, int k,
                             const std::string& profile, const std::string& zeros, double target,
                             double tol, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.name = label;
    cfg.model = ExperimentConfig::Model::Su3;
    cfg.two_s = 2;
    cfg.L = 100;
    cfg.seed = seed;
    cfg.profile = profile;
    cfg.zero_count = zeros;
    cfg.zero_mode = "product";
    cfg.target_dimension = target;
    cfg.tolerance = tol;
    for (int n = 1; n <= 30; ++n) cfg.n_set.push_back(n);
    for (int n = 70; n <= 99; ++n) cfg.n_set.push_back(n);
    ExperimentConfig::Support f1;
    f1.kind = "cantor";
    f1.n_keep = n1;
    f1.inv_r = r1;
    f1.k = k;
    f1.pair = 0;
    f1.theta_fixed = 0.5 * kPi;
    ExperimentConfig::Support f2 = f1;
    f2.n_keep = n2;
    f2.inv_r = r2;
    f2.pair = 1;
    cfg.supports = {f1, f2};
    return cfg;
}

ExperimentConfig su3_teepee(const std::string& label, int pair, int n_keep, int inv_r, int k,
                            double target, double tol, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.name = label;
    cfg.model = ExperimentConfig::Model::Su3;
    cfg.two_s = 2;
    cfg.L = 150;
    cfg.seed = seed;
    cfg.profile = "equal";
    cfg.target_dimension = target;
    cfg.tolerance = tol;
    ExperimentConfig::Support f;
    f.kind = "cantor";
    f.n_keep = n_keep;
    f.inv_r = inv_r;
    f.k = k;
    f.pair = pair;
    f.teepee = true;
    cfg.supports = {f};
    return cfg;
}

// Convergence sequences start at k = 8 so the k^2 zero injection of the
// type presets stays a fraction of the N^k support points.
const std::vector<int> kDfStepsK20{8, 12, 16, 20};
const std::vector<int> kDfStepsK18{8, 12, 15, 18};

}  // namespace

std::vector<std::string> figure_ids() {
    return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig3b",
            "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b",
            "fig6a", "fig6b", "fig7a", "fig7b", "fig8a", "fig8b"};
}

std::vector<ExperimentConfig> figure_configs(const std::string& id, std::uint64_t seed) {
    std::vector<ExperimentConfig> out;
    auto both_sets_cantor = [&](int two_s, const std::string& profile, const std::string& zeros,
                                double tol, bool with_dfk) {
        auto a = su2_cantor("c2r3", two_s, 2, 3, 20, profile, zeros, kDimC2R3, tol, seed);
        auto b = su2_cantor("c3r5", two_s, 3, 5, profile == "equal" ? 20 : 18, profile, zeros,
                            kDimC3R5, tol, seed);
        if (with_dfk) {
            a.df_k_list = kDfStepsK20;
            b.df_k_list = kDfStepsK18;
        }
        out.push_back(a);
        out.push_back(b);
    };

    if (id == "fig1a") both_sets_cantor(1, "equal", "none", 0.03, false);
    else if (id == "fig1b") both_sets_cantor(2, "equal", "none", 0.03, false);
    else if (id == "fig1c") both_sets_cantor(3, "equal", "none", 0.03, false);
    else if (id == "fig1d") both_sets_cantor(4, "equal", "none", 0.03, false);
    else if (id == "fig2a" || id == "fig2b") {
        const int two_s = id == "fig2a" ? 1 : 2;
        out.push_back(su2_teepee("c2r3", two_s, 2, 3, 20, "equal", "none", 1.0 + kDimC2R3, 0.02, seed));
        out.push_back(su2_teepee("c3r5", two_s, 3, 5, 18, "equal", "none", 1.0 + kDimC3R5, 0.02, seed));
    } else if (id == "fig3a") both_sets_cantor(1, "type_i", "k2", 0.03, true);
    else if (id == "fig3b") both_sets_cantor(1, "type_ii", "k2", 0.03, true);
    else if (id == "fig3c") both_sets_cantor(2, "type_i", "k2", 0.035, true);
    else if (id == "fig3d") both_sets_cantor(2, "type_ii", "k2", 0.035, true);
    else if (id == "fig4a") both_sets_cantor(3, "type_i", "k2", 0.035, false);
    else if (id == "fig4b") both_sets_cantor(3, "type_ii", "k2", 0.035, false);
    else if (id == "fig4c") both_sets_cantor(4, "type_i", "k2", 0.035, false);
    else if (id == "fig4d") both_sets_cantor(4, "type_ii", "k2", 0.035, false);
    else if (id == "fig5a")
        out.push_back(su3_product("c2r3xc2r3", 2, 3, 2, 3, 15, "equal", "none", 2.0 * kDimC2R3, 0.03, seed));
    else if (id == "fig5b")
        out.push_back(su3_product("c2r3xc3r5", 2, 3, 3, 5, 11, "equal", "none", kDimC2R3 + kDimC3R5, 0.03, seed));
    else if (id == "fig6a" || id == "fig6b") {
        const std::string profile = id == "fig6a" ? "type_i" : "type_ii";
        out.push_back(su3_product("c2r3xc2r3", 2, 3, 2, 3, 15, profile, "k4", 2.0 * kDimC2R3, 0.03, seed));
        out.push_back(su3_product("c2r3xc3r5", 2, 3, 3, 5, 11, profile, "k4", kDimC2R3 + kDimC3R5, 0.03, seed));
    } else if (id == "fig7a")
        out.push_back(su3_teepee("tp_pair1_c2r3", 0, 2, 3, 20, 1.0 + kDimC2R3, 0.03, seed));
    else if (id == "fig7b")
        out.push_back(su3_teepee("tp_pair1_c3r5", 0, 3, 5, 18, 1.0 + kDimC3R5, 0.03, seed));
    else if (id == "fig8a")
        out.push_back(su3_teepee("tp_pair2_c2r3", 1, 2, 3, 20, 1.0 + kDimC2R3, 0.03, seed));
    else if (id == "fig8b")
        out.push_back(su3_teepee("tp_pair2_c3r5", 1, 3, 5, 18, 1.0 + kDimC3R5, 0.03, seed));
    else if (id.size() == 4 && id.rfind("fig", 0) == 0) {
        // Bare figure id: run every panel.
        for (const auto& full : figure_ids()) {
            if (full.rfind(id, 0) != 0) continue;
            for (auto& cfg : figure_configs(full, seed)) {
                cfg.name = full.substr(3) + "_" + cfg.name;
                out.push_back(std::move(cfg));
            }
        }
    }
    if (out.empty()) throw ConfigError("unknown figure id: " + id);
    return out;
}

ExperimentResult run_figure(const std::string& id, std::uint64_t seed, int threads) {
    ExperimentResult result;
    result.id = id;
    for (const auto& cfg : figure_configs(id, seed)) {
        auto entry = run_single(cfg, threads);
        if (id.rfind("fig7", 0) == 0 || id.rfind("fig8", 0) == 0)
            entry.note =
                "published parameter listings for this figure disagree on the step numbers; "
                "the preset uses k=20 for N=2, 1/r=3 and k=18 for N=3, 1/r=5";
        result.entries.push_back(std::move(entry));
    }
    return result;
}

std::vector<std::string> write_bundle(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;

    for (const auto& entry : result.entries) {
        const std::string stem = result.entries.size() == 1 && entry.label == result.id
                                     ? result.id
                                     : result.id + "_" + entry.label;

        const fs::path csv_path = fs::path(out_dir) / (stem + "_profile.csv");
        {
            std::ofstream csv(csv_path);
            csv << "n,S_bits\n";
            char buf[64];
            for (const auto& [n, s] : entry.profile.points) {
                snprintf(buf, sizeof buf, "%d,%.12g\n", n, s);
                csv << buf;
            }
        }
        written.push_back(csv_path.string());

        json fit;
        fit["id"] = result.id;
        fit["label"] = entry.label;
        fit["model"] = entry.config.model == ExperimentConfig::Model::Su2
                           ? "su2"
                           : entry.config.model == ExperimentConfig::Model::So4 ? "so4" : "su3";
        fit["two_s"] = entry.config.two_s;
        fit["L"] = entry.config.L;
        fit["k"] = entry.config.supports.empty() ? 0 : entry.config.supports[0].k;
        fit["profile"] = entry.config.profile;
        fit["zero_count"] = entry.config.zero_count;
        fit["seed"] = entry.config.seed;
        fit["d_f"] = entry.estimate.d_f;
        fit["S0"] = entry.estimate.s0;
        fit["max_abs_residual"] = entry.estimate.max_abs_residual;
        if (entry.target) {
            fit["target"] = *entry.target;
            fit["rel_err"] = entry.estimate.rel_err_vs_target.value_or(0.0);
            fit["tolerance"] = entry.tolerance;
            fit["within_tolerance"] =
                entry.estimate.rel_err_vs_target.value_or(1.0) <= entry.tolerance;
        }
        fit["n_points"] = entry.profile.points.size();
        fit["runtime_seconds"] = entry.runtime_seconds;
        if (!entry.note.empty()) fit["note"] = entry.note;
        if (!entry.df_by_k.empty()) {
            json dfk = json::array();
            for (const auto& [k, df] : entry.df_by_k) dfk.push_back({{"k", k}, {"d_f", df}});
            fit["df_by_k"] = dfk;
        }

        const fs::path json_path = fs::path(out_dir) / (stem + "_fit.json");
        std::ofstream(json_path) << fit.dump(2) << "\n";
        written.push_back(json_path.string());
    }
    return written;
}

OracleCheckResult oracle_check(int cases, std::uint64_t seed) {
    OracleCheckResult res;
    res.cases = cases;

    for (int c = 0; c < cases; ++c) {
        const auto word = [&](std::uint64_t n) {
            return rng_word(seed, rng_stream::kOracleCases, static_cast<std::uint64_t>(c) * 97 + n);
        };
        const auto uniform = [&](std::uint64_t n) {
            return rng_double(seed, rng_stream::kOracleCases, static_cast<std::uint64_t>(c) * 97 + n);
        };
        const int two_s = 1 + static_cast<int>(word(0) % 2);
        const int L = 2 + static_cast<int>(word(1) % 7);
        const int points = 1 + static_cast<int>(word(2) % 4);

        // Random support: arbitrary angles, coefficients with O(1) amplitude.
        std::vector<double> thetas(static_cast<std::size_t>(points));
        std::vector<double> phis(static_cast<std::size_t>(points));
        std::vector<cd> coeffs(static_cast<std::size_t>(points));
        for (int p = 0; p < points; ++p) {
            thetas[static_cast<std::size_t>(p)] = kPi * (0.1 + 0.8 * uniform(10 + 3 * static_cast<std::uint64_t>(p)));
            phis[static_cast<std::size_t>(p)] = 2.0 * kPi * uniform(11 + 3 * static_cast<std::uint64_t>(p));
            coeffs[static_cast<std::size_t>(p)] =
                std::polar(0.3 + 0.7 * uniform(12 + 3 * static_cast<std::uint64_t>(p)),
                           2.0 * kPi * uniform(60 + 3 * static_cast<std::uint64_t>(p)));
        }

        // Dense side: basis-state amplitudes from explicit lowering.
        const int m_count = two_s * L + 1;
        std::vector<oracle::DenseState> basis;
        basis.reserve(static_cast<std::size_t>(m_count));
        for (int M = 0; M < m_count; ++M) basis.push_back(oracle::dense_basis_state(L, two_s, M));

        WVector w;
        w.L = L;
        w.two_s = two_s;
        w.amps.assign(static_cast<std::size_t>(m_count), cd(0.0, 0.0));
        oracle::DenseState dense{L, two_s + 1, {}};
        dense.amps.assign(basis[0].amps.size(), cd(0.0, 0.0));

        for (int p = 0; p < points; ++p) {
            const auto amps = coherent_amps(L, two_s, thetas[static_cast<std::size_t>(p)],
                                            phis[static_cast<std::size_t>(p)]);
            const auto site = site_amp(two_s, thetas[static_cast<std::size_t>(p)],
                                       phis[static_cast<std::size_t>(p)]);
            const auto product = oracle::dense_product_state(L, site);
            for (int M = 0; M < m_count; ++M) {
                const cd reference = oracle::dense_overlap(basis[static_cast<std::size_t>(M)], product);
                res.max_amp_error = std::max(
                    res.max_amp_error, std::abs(reference - amps[static_cast<std::size_t>(M)]));
                w.amps[static_cast<std::size_t>(M)] += coeffs[static_cast<std::size_t>(p)] * amps[static_cast<std::size_t>(M)];
            }
            for (std::size_t i = 0; i < dense.amps.size(); ++i)
                dense.amps[i] += coeffs[static_cast<std::size_t>(p)] * product.amps[i];
        }

        double norm = 0.0;
        for (const auto& z : w.amps) norm += std::norm(z);
        norm = std::sqrt(norm);
        for (auto& z : w.amps) z /= norm;
        double dense_norm = 0.0;
        for (const auto& z : dense.amps) dense_norm += std::norm(z);
        dense_norm = std::sqrt(dense_norm);
        for (auto& z : dense.amps) z /= dense_norm;

        const EntropyProfile profile = entropy_profile(w, all_cuts(L));
        for (const auto& [n, s] : profile.points) {
            const double reference = oracle::dense_entropy(dense, n);
            res.max_entropy_error = std::max(res.max_entropy_error, std::abs(reference - s));
        }
    }

    res.pass = res.max_amp_error <= 1e-12 && res.max_entropy_error <= 1e-10;
    return res;
}

}  // namespace fractent
