// Command-line runner: figure presets, custom experiment configs, and
// spot-check utilities on top of the fractent library.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fractent/errors.hpp"
#include "fractent/experiment.hpp"
#include "fractent/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void print_entries(const fractent::ExperimentResult& result) {
    for (const auto& e : result.entries) {
        std::printf("%-24s d_f = %.5f  S0 = %+.4f", e.label.c_str(), e.estimate.d_f,
                    e.estimate.s0);
        if (e.target) {
            const double rel = e.estimate.rel_err_vs_target.value_or(0.0);
            std::printf("  target = %.5f  rel_err = %.3f%%  [%s]", *e.target, 100.0 * rel,
                        rel <= e.tolerance ? "ok" : "FAIL");
        }
        std::printf("  (%.1fs)\n", e.runtime_seconds);
        for (const auto& [k, df] : e.df_by_k) std::printf("    k = %2d  d_f(k) = %.5f\n", k, df);
    }
}

int finish(const fractent::ExperimentResult& result, const std::string& out_dir) {
    for (const auto& path : fractent::write_bundle(result, out_dir))
        std::printf("wrote %s\n", path.c_str());
    print_entries(result);
    return result.within_tolerance() ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement entropy scaling for fractal-supported ground states"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags remain valid after a subcommand

    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 0;
    double trim = 0.0;
    app.add_option("--out-dir", out_dir, "output directory for CSV/JSON bundles");
    app.add_option("--seed", seed, "seed for every random draw in the run");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--trim", trim, "symmetric fit-window trim fraction");

    std::string figure_id;
    auto* figure_cmd = app.add_subcommand("figure", "run a figure preset (fig1a..fig8b)");
    figure_cmd->add_option("id", figure_id, "figure id")->required();

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run an experiment config file");
    run_cmd->add_option("config", config_path, "path to key = value config")->required();

    double dim_target = 0.5, dim_eps = 1e-3;
    auto* dim_cmd = app.add_subcommand("dense-dim", "find a Cantor spec near a target dimension");
    dim_cmd->add_option("target", dim_target, "target dimension in (0, 1)")->required();
    dim_cmd->add_option("eps", dim_eps, "tolerance")->required();

    int oracle_cases = 100;
    std::uint64_t oracle_seed = 2024;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "pipeline vs dense-oracle comparison");
    oracle_cmd->add_option("--cases", oracle_cases, "number of randomized cases");
    oracle_cmd->add_option("--seed", oracle_seed, "case seed");

    int sch_L = 0, sch_n = 0, sch_M = 0, sch_two_s = 1;
    auto* schmidt_cmd = app.add_subcommand("schmidt", "print Schmidt coefficients lambda(L,n,kappa,M)");
    schmidt_cmd->add_option("L", sch_L)->required();
    schmidt_cmd->add_option("n", sch_n)->required();
    schmidt_cmd->add_option("M", sch_M)->required();
    schmidt_cmd->add_option("--two-s", sch_two_s, "2s (default 1, i.e. spin-1/2)");

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) threads = fractent::default_threads();

    try {
        if (*figure_cmd) {
            auto result = fractent::run_figure(figure_id, seed, threads);
            if (trim > 0.0) {
                for (auto& e : result.entries)
                    e.estimate = fractent::fit_df(fractent::trim_profile(e.profile, trim), e.target);
            }
            return finish(result, out_dir);
        }
        if (*run_cmd) {
            auto cfg = fractent::load_config(config_path);
            cfg.seed = seed != 1 ? seed : cfg.seed;
            if (trim > 0.0) cfg.trim = trim;
            return finish(fractent::run_custom(cfg, threads), out_dir);
        }
        if (*dim_cmd) {
            const auto spec = fractent::approximate_dimension(dim_target, dim_eps);
            std::printf("N = %d\ninv_r = %d\ndimension = %.12f\nabs_err = %.3e\n", spec.n_keep,
                        spec.inv_r, fractent::fractal_dimension(spec),
                        std::abs(fractent::fractal_dimension(spec) - dim_target));
            return kExitOk;
        }
        if (*oracle_cmd) {
            const auto res = fractent::oracle_check(oracle_cases, oracle_seed);
            std::printf("cases = %d\nmax amplitude error = %.3e\nmax entropy error = %.3e\n%s\n",
                        res.cases, res.max_amp_error, res.max_entropy_error,
                        res.pass ? "ok" : "FAIL");
            return res.pass ? kExitOk : kExitTolerance;
        }
        if (*schmidt_cmd) {
            std::printf("kappa,lambda\n");
            for (int kappa = 0; kappa <= sch_two_s * sch_n; ++kappa)
                std::printf("%d,%.15g\n", kappa,
                            fractent::schmidt_lambda(sch_L, sch_n, kappa, sch_M, sch_two_s));
            return kExitOk;
        }
    } catch (const fractent::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const fractent::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitConfig;
}
