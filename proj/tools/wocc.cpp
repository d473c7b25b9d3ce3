#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wocc/pipeline.hpp"
#include "wocc/sim.hpp"

namespace fs = std::filesystem;
using namespace wocc;

namespace {

// Flags shared by the pipeline stages. Anything given here beats the file.
struct Overrides {
    std::string config;
    std::optional<std::string> sessions, timetable, roster, inventory, truth, model, mapping, estimates, out;
    std::optional<std::int64_t> resolution;
    std::optional<std::string> algorithm;
    std::optional<std::size_t> resample_len;
    std::optional<std::uint64_t> seed;
    std::optional<double> train_ratio;
    std::optional<std::string> feature_aps;
    bool no_adjacency = false;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-c,--config", o.config, "pipeline config file (key = value)");
    cmd->add_option("--sessions", o.sessions, "session log CSV");
    cmd->add_option("--timetable", o.timetable, "timetable CSV");
    cmd->add_option("--roster", o.roster, "roster CSV");
    cmd->add_option("--inventory", o.inventory, "AP inventory CSV");
    cmd->add_option("--truth", o.truth, "ground-truth counts CSV");
    cmd->add_option("-o,--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "seed for clustering and the train/test split");
}

void add_mapping_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--resolution", o.resolution, "feature sampling step in minutes");
    cmd->add_option("--algorithm", o.algorithm, "kmeans | hierarchical | em-gmm");
    cmd->add_option("--resample-len", o.resample_len, "points per feature series after resampling");
    cmd->add_flag("--no-adjacency", o.no_adjacency, "score only the room's own APs as positives");
}

void add_feature_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--mapping", o.mapping, "mapping CSV from map-aps (otherwise mapped in process)");
    cmd->add_option("--feature-aps", o.feature_aps, "mapped | inventory");
    cmd->add_option("--train-ratio", o.train_ratio, "share of classes used for training");
}

PipelineConfig build_config(const Overrides& o, unsigned jobs)
{
    PipelineConfig c;
    if (!o.config.empty()) {
        const auto kv = KeyValueFile::load(o.config, "pipeline config");
        c = PipelineConfig::from_keyvalue(kv, fs::path(o.config).parent_path());
    }
    auto path = [](const std::optional<std::string>& v, fs::path& dst) {
        if (v) dst = *v;
    };
    path(o.sessions, c.sessions);
    path(o.timetable, c.timetable);
    path(o.roster, c.roster);
    path(o.inventory, c.inventory);
    path(o.truth, c.truth);
    path(o.model, c.model);
    path(o.mapping, c.mapping);
    path(o.estimates, c.estimates);
    path(o.out, c.output_dir);
    if (o.resolution) c.resolution = *o.resolution;
    if (o.algorithm) {
        const auto a = parse_algorithm(*o.algorithm);
        if (!a) throw usage_error("unknown algorithm '" + *o.algorithm + "'");
        c.algorithm = *a;
    }
    if (o.resample_len) c.resample_len = *o.resample_len;
    if (o.seed) c.seed = *o.seed;
    if (o.train_ratio) c.train_ratio = *o.train_ratio;
    if (o.feature_aps) c.feature_aps = parse_feature_aps(*o.feature_aps);
    if (o.no_adjacency) c.adjacency = false;
    if (jobs) c.jobs = jobs;
    c.validate();
    return c;
}

std::string pct(double v) { return format_fixed(100.0 * v, 2) + "%"; }

void print_mapping(const MappingStageResult& m)
{
    const auto& c = m.evaluation.overall;
    std::cout << "map-aps: " << m.results.size() << " classes, TP " << pct(c.tp_rate()) << ", TN " << pct(c.tn_rate())
              << '\n';
    for (const auto& r : m.sweep)
        std::cout << "  resolution " << r.resolution << " min: "
                  << (r.skipped ? std::string("skipped") : "TP " + pct(r.confusion.tp_rate()) + ", TN " + pct(r.confusion.tn_rate()))
                  << " over " << r.classes << " classes\n";
}

void print_comparison(const MethodComparison& mc)
{
    std::cout << "evaluate: " << mc.test_classes << " test classes, sMAPE raw-wifi LR " << format_fixed(mc.raw_wifi_lr, 2)
              << ", enrolled-wifi LR " << format_fixed(mc.enrolled_wifi_lr, 2) << ", LDA " << format_fixed(mc.lda, 2)
              << ", LDA+LR " << format_fixed(mc.lda_lr, 2) << '\n';
}

int run(int argc, char** argv)
{
    CLI::App app{"Classroom occupancy from WiFi session logs"};
    app.require_subcommand(1);
    unsigned jobs = 0;
    app.add_option("-j,--jobs", jobs, "worker threads for per-class stages (default 1)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic campus, session log and ground truth");
    std::string sim_config, sim_out;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("-c,--config", sim_config, "simulator config file (key = value)");
    sim->add_option("-o,--out", sim_out, "output directory")->required();
    sim->add_option("--seed", sim_seed, "overrides the config seed");

    Overrides map_o, train_o, est_o, eval_o, run_o;

    auto* map = app.add_subcommand("map-aps", "cluster APs per class and score against the inventory");
    add_common(map, map_o);
    add_mapping_flags(map, map_o);
    std::string classes;
    bool sweep = false;
    map->add_option("--classes", classes, "comma-separated class ids (default: all)");
    map->add_flag("--sweep", sweep, "also score a range of sampling resolutions");

    auto* train = app.add_subcommand("train", "fit the occupant classifier and its calibration");
    add_common(train, train_o);
    add_mapping_flags(train, train_o);
    add_feature_flags(train, train_o);

    auto* est = app.add_subcommand("estimate", "estimate per-class occupancy with a trained model");
    add_common(est, est_o);
    add_mapping_flags(est, est_o);
    add_feature_flags(est, est_o);
    est->add_option("--model", est_o.model, "model file from train");

    auto* eval = app.add_subcommand("evaluate", "compare estimators on the test split of an estimates CSV");
    eval->add_option("-c,--config", eval_o.config, "pipeline config file");
    eval->add_option("--estimates", eval_o.estimates, "estimates CSV");
    eval->add_option("-o,--out", eval_o.out, "output directory");
    eval->add_option("--seed", eval_o.seed, "split seed");
    eval->add_option("--train-ratio", eval_o.train_ratio, "share of classes used for training");

    auto* all = app.add_subcommand("run", "the whole pipeline in one process");
    add_common(all, run_o);
    add_mapping_flags(all, run_o);
    add_feature_flags(all, run_o);
    all->add_option("--model", run_o.model, "reuse a model instead of training");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
    }

    if (sim->parsed()) {
        SimConfig cfg;
        if (!sim_config.empty()) cfg = SimConfig::from_keyvalue(KeyValueFile::load(sim_config, "sim config"));
        if (sim_seed) cfg.seed = *sim_seed;
        cfg.validate();
        const auto campus = generate_campus(cfg);
        const auto out = simulate_sessions(campus, cfg);
        write_simulation(sim_out, campus, out, cfg);
        std::cout << "simulate: " << campus.timetable.size() << " classes, " << out.sessions.size() << " sessions, "
                  << campus.inventory.size() << " APs -> " << sim_out << '\n';
        return 0;
    }

    if (map->parsed()) {
        const auto cfg = build_config(map_o, jobs);
        write_effective_config(cfg);
        auto in = load_inputs(cfg);
        if (!classes.empty()) {
            std::set<std::string> keep;
            for (const auto& id : split_row(classes, ',')) keep.insert(id);
            for (const auto& id : keep)
                if (std::none_of(in.timetable.begin(), in.timetable.end(), [&](const ClassEvent& e) { return e.class_id == id; }))
                    throw usage_error("map-aps: class '" + id + "' is not in the timetable");
            std::erase_if(in.timetable, [&](const ClassEvent& e) { return !keep.contains(e.class_id); });
        }
        print_mapping(stage_map_aps(cfg, in, sweep));
        return 0;
    }

    if (train->parsed()) {
        const auto cfg = build_config(train_o, jobs);
        write_effective_config(cfg);
        const auto in = load_inputs(cfg);
        const auto obs = stage_features(cfg, in, feature_ap_sets(cfg, in, obtain_mapping(cfg, in)));
        const auto s = stage_train(cfg, obs, in.truth);
        std::cout << "train: " << s.users << " users from " << s.classes << " classes, calibration slope "
                  << format_fixed(s.model.calibration.slope, 4) << ", intercept "
                  << format_fixed(s.model.calibration.intercept, 4) << '\n';
        return 0;
    }

    if (est->parsed()) {
        const auto cfg = build_config(est_o, jobs);
        if (cfg.model.empty()) throw usage_error("estimate: no model file given (--model or config key 'model')");
        write_effective_config(cfg);
        const auto in = load_inputs(cfg);
        const auto model = load_model(cfg.model);
        const auto obs = stage_features(cfg, in, feature_ap_sets(cfg, in, obtain_mapping(cfg, in)));
        const auto e = stage_estimate(cfg, obs, model, in.truth);
        std::cout << "estimate: " << e.size() << " classes -> " << (cfg.output_dir / "estimates.csv").string() << '\n';
        return 0;
    }

    if (eval->parsed()) {
        const auto cfg = build_config(eval_o, jobs);
        if (cfg.estimates.empty()) throw usage_error("evaluate: no estimates file given (--estimates or config key 'estimates')");
        const auto estimates = run_stage("load", [&] {
            auto f = detail::open_input(cfg.estimates, "estimates");
            return read_estimates(f);
        });
        write_effective_config(cfg);
        print_comparison(stage_evaluate(cfg, estimates));
        return 0;
    }

    if (all->parsed()) {
        const auto cfg = build_config(run_o, jobs);
        const auto r = run_pipeline(cfg);
        print_mapping(r.mapping);
        std::cout << "estimate: " << r.estimates.size() << " classes\n";
        if (r.comparison) print_comparison(*r.comparison);
        else std::cout << "evaluate: skipped, no ground truth\n";
        return 0;
    }
    return static_cast<int>(ErrorKind::Usage);
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "wocc: error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "wocc: error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Validation);
    }
}
