// irl: command-line driver for active IRL experiments.
//
//   irl run   --preset structured-paper --method eig_nmc --seed 3 --out out/
//   irl suite --preset random-paper --jobs 4 --out out/
//   irl scale --out out/scale
//   irl serve --port 8080 --log-dir sessions/

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "activeirl/config_io.hpp"
#include "activeirl/demo_service.hpp"
#include "activeirl/scaling.hpp"

namespace fs = std::filesystem;
using namespace airl;

namespace {

struct CommonArgs {
    std::string config;
    std::string preset;
    std::string out = "irl_out";
    std::vector<std::uint64_t> seeds;
    std::string methods;
    unsigned jobs = 1;
    int steps = 0;
    bool no_timing = false;
    int heatmap_step = 0;
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

SuiteConfig resolve(const CommonArgs& a) {
    SuiteConfig s;
    if (!a.config.empty()) {
        s = load_suite_config(a.config);
        if (!a.preset.empty()) throw ConfigError("use either --config or --preset, not both");
    } else {
        s = preset(a.preset.empty() ? "structured-paper" : a.preset);
    }
    if (!a.methods.empty()) {
        s.methods.clear();
        for (const auto& m : split_commas(a.methods)) s.methods.push_back(parse_method(m));
    }
    if (!a.seeds.empty()) s.seeds = a.seeds;
    if (a.steps > 0) s.base.steps = a.steps;
    if (a.no_timing) s.base.record_timing = false;
    if (a.heatmap_step > 0) s.base.keep_scores = true;
    s.base.validate();
    return s;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

int write_suite_outputs(const SuiteConfig& s, const std::vector<SuiteRun>& runs, const CommonArgs& a) {
    const fs::path root(a.out);
    fs::create_directories(root);
    write_file(root / "manifest.json", to_json(s).dump(2) + "\n");

    std::ostringstream index;
    index << "method,seed,complete,metrics,diagnostics,final_entropy,final_regret\n";
    int failures = 0;
    for (const auto& r : runs) {
        const std::string method = method_name(r.method);
        const fs::path dir = root / method;
        fs::create_directories(dir);
        const std::string stem = "seed_" + std::to_string(r.seed);
        std::ostringstream metrics, diag;
        write_metrics_csv(metrics, r.record);
        write_diagnostics_csv(diag, r.record);
        write_file(dir / (stem + ".csv"), metrics.str());
        write_file(dir / (stem + ".diag.csv"), diag.str());
        if (a.heatmap_step > 0 && a.heatmap_step <= static_cast<int>(r.record.scores.size())) {
            std::ostringstream hm;
            write_heatmap_csv(hm, r.record.scores[a.heatmap_step - 1], a.heatmap_step);
            write_file(dir / (stem + ".heatmap.csv"), hm.str());
        }
        index << method << ',' << r.seed << ',' << (r.record.complete ? 1 : 0) << ',' << method << '/' << stem
              << ".csv," << method << '/' << stem << ".diag.csv," << format_double(r.record.final_entropy()) << ','
              << format_double(r.record.final_regret()) << '\n';
        if (!r.record.complete) {
            ++failures;
            std::cerr << method << " seed " << r.seed << " failed: " << r.record.error << '\n';
        }
    }
    write_file(root / "index.csv", index.str());

    std::ostringstream summary;
    summary << "method,step,entropy_mean,entropy_std,entropy_median,regret_mean,regret_std,regret_median\n";
    for (const auto& c : summarize_suite(runs))
        for (std::size_t t = 0; t < c.entropy_mean.size(); ++t)
            summary << c.method << ',' << t + 1 << ',' << format_double(c.entropy_mean[t]) << ','
                    << format_double(c.entropy_std[t]) << ',' << format_double(c.entropy_median[t]) << ','
                    << format_double(c.regret_mean[t]) << ',' << format_double(c.regret_std[t]) << ','
                    << format_double(c.regret_median[t]) << '\n';
    write_file(root / "summary.csv", summary.str());
    std::cout << "wrote " << runs.size() << " runs to " << root.string() << '\n';
    return failures == 0 ? 0 : 1;
}

void add_common(CLI::App* cmd, CommonArgs& a, bool multi) {
    cmd->add_option("--config", a.config, "JSON config file");
    cmd->add_option("--preset", a.preset, "structured-paper | random-paper");
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--seed", a.seeds, multi ? "seeds (repeatable)" : "seed")->expected(multi ? -1 : 1);
    cmd->add_option("--method", a.methods, multi ? "comma-separated methods" : "method");
    cmd->add_option("--steps", a.steps, "active learning steps (overrides config)");
    cmd->add_flag("--no-timing", a.no_timing, "write zero timings so reruns are byte-identical");
    cmd->add_option("--heatmap-step", a.heatmap_step, "export acquisition scores for this step (1-based)");
    if (multi) cmd->add_option("--jobs", a.jobs, "concurrent runs");
}

}  // namespace

int main(int argc, char** argv) {
    init_logging_from_env();
    CLI::App app{"Active inverse reinforcement learning experiments"};
    app.require_subcommand(1);

    CommonArgs run_args, suite_args;
    auto* run = app.add_subcommand("run", "single method and seed");
    add_common(run, run_args, false);
    auto* suite = app.add_subcommand("suite", "methods x seeds");
    add_common(suite, suite_args, true);

    ScaleConfig scale_cfg;
    std::string scale_out = "irl_scale";
    auto* scale = app.add_subcommand("scale", "timing benchmark over grid sizes");
    scale->add_option("--sizes", scale_cfg.sizes, "grid side lengths")->delimiter(',');
    scale->add_option("--trials", scale_cfg.trials, "repeated trials per size");
    scale->add_option("--steps", scale_cfg.steps, "active steps per trial");
    scale->add_option("--warmup", scale_cfg.warmup_steps, "sampler warmup steps");
    scale->add_option("--samples", scale_cfg.kept_samples, "kept posterior samples");
    scale->add_option("--seed", scale_cfg.seed, "master seed");
    scale->add_option("--out", scale_out, "output directory");
    scale->add_flag("!--no-bo", scale_cfg.include_bo, "skip the BO timing");

    std::string host = "127.0.0.1", log_dir;
    int port = 8080;
    ServiceOptions svc;
    auto* serve = app.add_subcommand("serve", "HTTP service for human demonstrations");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port");
    serve->add_option("--log-dir", svc.log_dir, "session event log directory");
    serve->add_option("--seed", svc.seed, "master seed for new sessions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            if (run_args.seeds.size() > 1) throw ConfigError("run takes a single --seed");
            if (split_commas(run_args.methods).size() > 1) throw ConfigError("run takes a single --method");
            SuiteConfig s = resolve(run_args);
            s.methods.resize(1);
            s.seeds.resize(1);
            const auto runs = run_suite(s.base, s.methods, s.seeds, 1);
            return write_suite_outputs(s, runs, run_args);
        }
        if (*suite) {
            const SuiteConfig s = resolve(suite_args);
            const auto runs = run_suite(s.base, s.methods, s.seeds, suite_args.jobs);
            return write_suite_outputs(s, runs, suite_args);
        }
        if (*scale) {
            const auto res = run_scale(scale_cfg);
            fs::create_directories(scale_out);
            std::ofstream t(fs::path(scale_out) / "timing.csv");
            write_timing_csv(t, res.rows);
            if (!res.bo_rows.empty()) {
                std::ofstream b(fs::path(scale_out) / "timing_bo.csv");
                write_timing_csv(b, res.bo_rows);
            }
            std::ofstream f(fs::path(scale_out) / "fit.json");
            f << json{{"p_eig", res.p_eig}, {"c_eig", res.c_eig}, {"p_mcmc", res.p_mcmc}, {"c_mcmc", res.c_mcmc}}.dump(2)
              << '\n';
            std::cout << "EIG step time ~ n^" << res.p_eig << ", sampling ~ n^" << res.p_mcmc << '\n';
            return 0;
        }
        if (*serve) {
            DemoServer server(svc);
            std::cout << "serving on http://" << host << ':' << port << '\n';
            server.run(host, port);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
