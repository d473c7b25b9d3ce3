#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wocc/ap_mapper.hpp"
#include "wocc/error.hpp"
#include "wocc/keyvalue.hpp"
#include "wocc/occupancy.hpp"
#include "wocc/parallel.hpp"
#include "wocc/session_store.hpp"
#include "wocc/text.hpp"

namespace wocc {

enum class FeatureApSource { Mapped, Inventory };

struct PipelineConfig {
    std::filesystem::path sessions, timetable, roster, inventory;
    std::filesystem::path truth;    // optional: class_id,true_count
    std::filesystem::path model;    // optional: reuse instead of training
    std::filesystem::path mapping;  // optional: reuse a map-aps result
    std::filesystem::path estimates; // evaluate input
    std::filesystem::path output_dir = "out";
    std::int64_t resolution = 10;
    Algorithm algorithm = Algorithm::KMeans;
    std::size_t resample_len = 8;
    std::optional<std::uint64_t> seed;
    double train_ratio = 0.7;
    bool adjacency = true;
    FeatureApSource feature_aps = FeatureApSource::Mapped;
    unsigned jobs = 1;
    char delimiter = ',';

    std::uint64_t require_seed(std::string_view stage) const
    {
        if (!seed) throw usage_error(std::string(stage) + ": a seed is required (config key 'seed' or --seed)");
        return *seed;
    }

    MappingOptions mapping_options(std::string_view stage) const
    {
        MappingOptions o;
        o.resolution = resolution;
        o.resample_len = resample_len;
        o.algorithm = algorithm;
        o.seed = algorithm == Algorithm::Hierarchical ? seed.value_or(0) : require_seed(stage);
        return o;
    }

    void validate() const
    {
        if (resolution < 1) throw usage_error("resolution must be a positive number of minutes");
        if (resample_len < 2) throw usage_error("resample_len must be at least 2");
        if (!(train_ratio > 0 && train_ratio <= 1)) throw usage_error("train_ratio must lie in (0, 1]");
        if (jobs < 1) throw usage_error("jobs must be at least 1");
    }

    /// Relative paths in the file resolve against `base`.
    static PipelineConfig from_keyvalue(const KeyValueFile& kv, const std::filesystem::path& base = {});
    KeyValueFile to_keyvalue() const;
};

inline std::string_view to_string(FeatureApSource s) { return s == FeatureApSource::Mapped ? "mapped" : "inventory"; }

inline FeatureApSource parse_feature_aps(std::string_view s)
{
    if (s == "mapped") return FeatureApSource::Mapped;
    if (s == "inventory") return FeatureApSource::Inventory;
    throw usage_error("feature_aps must be 'mapped' or 'inventory', found '" + std::string(s) + "'");
}

inline PipelineConfig PipelineConfig::from_keyvalue(const KeyValueFile& kv, const std::filesystem::path& base)
{
    static const std::set<std::string> known{"sessions", "timetable", "roster",     "inventory", "truth",
                                             "model",    "mapping",   "estimates",  "output_dir", "resolution",
                                             "algorithm", "resample_len", "seed",  "train_ratio", "adjacency",
                                             "feature_aps", "jobs",   "delimiter"};
    for (const auto& k : kv.keys())
        if (!known.contains(k)) throw usage_error("pipeline config: unknown key '" + k + "'");
    PipelineConfig c;
    auto path = [&](const char* key, std::filesystem::path& dst) {
        if (const auto v = kv.get(key); v && !v->empty()) {
            std::filesystem::path p(*v);
            dst = p.is_absolute() || base.empty() ? p : base / p;
        }
    };
    path("sessions", c.sessions);
    path("timetable", c.timetable);
    path("roster", c.roster);
    path("inventory", c.inventory);
    path("truth", c.truth);
    path("model", c.model);
    path("mapping", c.mapping);
    path("estimates", c.estimates);
    path("output_dir", c.output_dir);
    c.resolution = kv.integer("resolution", c.resolution);
    if (const auto a = kv.get("algorithm")) {
        const auto alg = parse_algorithm(*a);
        if (!alg) throw usage_error("pipeline config: unknown algorithm '" + *a + "'");
        c.algorithm = *alg;
    }
    const auto len = kv.integer("resample_len", static_cast<std::int64_t>(c.resample_len));
    if (len < 2) throw usage_error("resample_len must be at least 2");
    c.resample_len = static_cast<std::size_t>(len);
    if (kv.has("seed")) {
        const auto s = kv.integer("seed", 0);
        if (s < 0) throw usage_error("seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    c.train_ratio = kv.number("train_ratio", c.train_ratio);
    c.adjacency = kv.flag("adjacency", c.adjacency);
    if (const auto f = kv.get("feature_aps")) c.feature_aps = parse_feature_aps(*f);
    const auto jobs = kv.integer("jobs", c.jobs);
    if (jobs < 1) throw usage_error("jobs must be at least 1");
    c.jobs = static_cast<unsigned>(jobs);
    if (const auto d = kv.get("delimiter")) {
        if (*d == "tab" || *d == "\\t") c.delimiter = '\t';
        else if (d->size() == 1) c.delimiter = (*d)[0];
        else throw usage_error("delimiter must be a single character or 'tab'");
    }
    c.validate();
    return c;
}

inline KeyValueFile PipelineConfig::to_keyvalue() const
{
    KeyValueFile kv;
    auto path = [&](const char* key, const std::filesystem::path& p) {
        if (!p.empty()) kv.set(key, p.generic_string());
    };
    path("sessions", sessions);
    path("timetable", timetable);
    path("roster", roster);
    path("inventory", inventory);
    path("truth", truth);
    path("model", model);
    path("mapping", mapping);
    path("estimates", estimates);
    path("output_dir", output_dir);
    kv.set("resolution", std::to_string(resolution));
    kv.set("algorithm", std::string(to_string(algorithm)));
    kv.set("resample_len", std::to_string(resample_len));
    if (seed) kv.set("seed", std::to_string(*seed));
    kv.set("train_ratio", format_double(train_ratio));
    kv.set("adjacency", adjacency ? "true" : "false");
    kv.set("feature_aps", std::string(to_string(feature_aps)));
    kv.set("jobs", std::to_string(jobs));
    kv.set("delimiter", delimiter == '\t' ? std::string("tab") : std::string(1, delimiter));
    return kv;
}

/// Runs `fn`, prefixing any failure with the stage name. The error kind is
/// kept so the exit code still says what went wrong.
template <typename Fn>
auto run_stage(std::string_view stage, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), "stage '" + std::string(stage) + "': " + e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw usage_error("stage '" + std::string(stage) + "': " + e.what());
    } catch (const std::exception& e) {
        throw validation_error("stage '" + std::string(stage) + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

struct PipelineInputs {
    SessionStore store;
    LoadReport session_report;
    std::vector<ClassEvent> timetable;
    RosterMap rosters;
    ApInventory inventory;
    std::optional<TruthCounts> truth;
};

struct InputNeeds {
    bool sessions = true;
    bool timetable = true;
    bool roster = true;
    bool inventory = true;
};

inline void require_path(const std::filesystem::path& p, const char* key)
{
    if (p.empty()) throw usage_error(std::string("no ") + key + " file given (config key '" + key + "')");
}

inline PipelineInputs load_inputs(const PipelineConfig& cfg, InputNeeds needs = {})
{
    return run_stage("load", [&] {
        PipelineInputs in;
        if (needs.timetable) {
            require_path(cfg.timetable, "timetable");
            in.timetable = load_timetable(cfg.timetable, cfg.delimiter);
        }
        if (needs.roster) {
            require_path(cfg.roster, "roster");
            in.rosters = load_rosters(cfg.roster, cfg.delimiter);
        }
        if (needs.inventory) {
            require_path(cfg.inventory, "inventory");
            in.inventory = load_inventory(cfg.inventory, cfg.delimiter);
        }
        if (!cfg.truth.empty()) in.truth = read_truth_counts(cfg.truth);
        if (needs.sessions) {
            require_path(cfg.sessions, "sessions");
            SessionLoadOptions opts;
            opts.delimiter = cfg.delimiter;
            auto loaded = load_sessions(cfg.sessions, opts);
            in.session_report = std::move(loaded.report);
            in.store = SessionStore(std::move(loaded.records));
        }
        return in;
    });
}

inline std::ofstream open_output(const PipelineConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = cfg.output_dir / name;
    std::ofstream out(path);
    if (!out) throw usage_error("cannot write '" + path.string() + "'");
    return out;
}

inline void write_effective_config(const PipelineConfig& cfg)
{
    auto out = open_output(cfg, "effective_config.txt");
    cfg.to_keyvalue().write(out);
}

// ---------------------------------------------------------------------------
// AP mapping outputs
// ---------------------------------------------------------------------------

inline void write_mapping(std::ostream& out, std::span<const MappingResult> results)
{
    write_row(out, {"class_id", "ap_name", "mapped", "score"});
    for (const auto& r : results) {
        std::set<std::string> aps = r.mapped;
        aps.insert(r.not_mapped.begin(), r.not_mapped.end());
        for (const auto& ap : aps) {
            const auto s = r.score.find(ap);
            write_row(out, {r.class_id, ap, r.is_mapped(ap) ? "1" : "0",
                            s == r.score.end() ? std::string() : format_fixed(s->second, 6)});
        }
    }
}

/// Reads a mapping CSV back into per-class results keyed by class_id. Room
/// ids come from the timetable when given.
inline std::map<std::string, MappingResult> read_mapping(std::istream& in, std::span<const ClassEvent> timetable = {})
{
    RowReader reader(in, ',');
    read_header(reader, std::vector<std::string>{"class_id", "ap_name", "mapped", "score"}, "mapping");
    std::map<std::string, std::string> rooms;
    for (const auto& ev : timetable) rooms[ev.class_id] = ev.room_id;
    std::map<std::string, MappingResult> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() < 3 || (f[2] != "0" && f[2] != "1"))
            throw validation_error("mapping line " + std::to_string(reader.line()) + ": expected class_id,ap_name,0|1,score");
        auto& r = out[f[0]];
        r.class_id = f[0];
        if (const auto it = rooms.find(f[0]); it != rooms.end()) r.room_id = it->second;
        (f[2] == "1" ? r.mapped : r.not_mapped).insert(f[1]);
        if (f.size() > 3 && !f[3].empty())
            if (const auto s = parse_double(f[3])) r.score[f[1]] = *s;
    }
    return out;
}

inline std::map<std::string, MappingResult> read_mapping(const std::filesystem::path& path, std::span<const ClassEvent> timetable = {})
{
    auto in = detail::open_input(path, "mapping");
    return read_mapping(in, timetable);
}

inline void write_pca(std::ostream& out, std::span<const ClassMapping> mappings, const ApInventory& inventory, bool adjacency)
{
    const RoomTruth truth(inventory, adjacency);
    write_row(out, {"class_id", "ap_name", "pc1", "pc2", "mapped", "ground_truth"});
    for (const auto& m : mappings) {
        const auto& names = m.matrix.ap_names;
        Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(names.size()), 2);
        if (names.size() >= 2) coords = pca_project(m.matrix.values, 2).coords;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            write_row(out, {m.result.class_id, names[i], format_fixed(coords(r, 0), 6), format_fixed(coords(r, 1), 6),
                            m.result.is_mapped(names[i]) ? "1" : "0",
                            truth.is_positive(names[i], m.result.room_id) ? "1" : "0"});
        }
    }
}

inline nlohmann::ordered_json confusion_json(const Confusion& c)
{
    auto rate = [](double v) { return std::isnan(v) ? nlohmann::ordered_json() : nlohmann::ordered_json(v); };
    return {{"tp", c.tp}, {"fn", c.fn}, {"fp", c.fp}, {"tn", c.tn}, {"tp_rate", rate(c.tp_rate())}, {"tn_rate", rate(c.tn_rate())}};
}

struct MappingStageResult {
    std::vector<ClassMapping> mappings;
    std::vector<MappingResult> results;
    MappingEvaluation evaluation;
    ConsistencyReport consistency;
    std::vector<SweepRow> sweep;
};

inline nlohmann::ordered_json mapping_report_json(const PipelineConfig& cfg, const MappingStageResult& m)
{
    nlohmann::ordered_json j;
    j["algorithm"] = std::string(to_string(cfg.algorithm));
    j["resolution"] = cfg.resolution;
    j["resample_len"] = cfg.resample_len;
    j["adjacency"] = cfg.adjacency;
    j["classes"] = m.results.size();
    j["overall"] = confusion_json(m.evaluation.overall);
    auto& rooms = j["per_room"] = nlohmann::ordered_json::object();
    for (const auto& [room, c] : m.evaluation.per_room) rooms[room] = confusion_json(c);
    auto& un = j["unevaluable"] = nlohmann::ordered_json::array();
    for (const auto& [cls, ap] : m.evaluation.unevaluable) un.push_back({{"class_id", cls}, {"ap_name", ap}});

    auto& cons = j["consistency"] = nlohmann::ordered_json::object();
    for (const auto& [ap, c] : m.consistency.consistency)
        cons[ap] = {{"consistency", c}, {"featured_classes", m.consistency.featured_classes.at(ap)}};
    if (!m.sweep.empty()) {
        auto& sw = j["sweep"] = nlohmann::ordered_json::array();
        for (const auto& row : m.sweep) {
            auto r = confusion_json(row.confusion);
            r["resolution"] = row.resolution;
            r["classes"] = row.classes;
            r["skipped"] = row.skipped;
            sw.push_back(std::move(r));
        }
    }
    return j;
}

/// Clusters every class, scores against the inventory, and writes the
/// mapping CSV, the JSON report, PCA plot data and the consistency CCDF.
inline MappingStageResult stage_map_aps(const PipelineConfig& cfg, const PipelineInputs& in, bool sweep = false,
                                        bool write = true)
{
    return run_stage("map-aps", [&] {
        MappingStageResult m;
        m.mappings = map_classes(in.store, in.timetable, in.rosters, cfg.mapping_options("map-aps"), cfg.jobs);
        for (const auto& cm : m.mappings) m.results.push_back(cm.result);
        m.evaluation = evaluate_mapping(m.results, in.inventory, cfg.adjacency);
        m.consistency = consistency(m.results, in.inventory, cfg.adjacency);
        if (sweep)
            m.sweep = resolution_sweep(in.store, in.timetable, in.rosters, in.inventory, default_sweep_resolutions(),
                                       cfg.mapping_options("map-aps"), cfg.adjacency, cfg.jobs);
        if (!write) return m;
        {
            auto out = open_output(cfg, "mapping.csv");
            write_mapping(out, m.results);
        }
        {
            auto out = open_output(cfg, "mapping_report.json");
            out << mapping_report_json(cfg, m).dump(2) << '\n';
        }
        {
            auto out = open_output(cfg, "pca.csv");
            write_pca(out, m.mappings, in.inventory, cfg.adjacency);
        }
        {
            auto out = open_output(cfg, "consistency_ccdf.csv");
            write_row(out, {"threshold", "fraction"});
            for (const auto& [t, f] : consistency_ccdf(m.consistency, default_ccdf_thresholds()))
                write_row(out, {format_fixed(t, 2), format_fixed(f, 6)});
        }
        if (sweep) {
            auto out = open_output(cfg, "sweep.csv");
            write_row(out, {"resolution", "classes", "tp", "fn", "fp", "tn", "tp_rate", "tn_rate"});
            for (const auto& r : m.sweep)
                write_row(out, {std::to_string(r.resolution), std::to_string(r.classes), std::to_string(r.confusion.tp),
                                std::to_string(r.confusion.fn), std::to_string(r.confusion.fp),
                                std::to_string(r.confusion.tn), r.skipped ? "" : format_fixed(r.confusion.tp_rate(), 6),
                                r.skipped ? "" : format_fixed(r.confusion.tn_rate(), 6)});
        }
        return m;
    });
}

// ---------------------------------------------------------------------------
// Feature extraction, training, estimation, evaluation
// ---------------------------------------------------------------------------

/// Room AP set per class: the mapped APs, or the room's own inventory APs.
inline std::map<std::string, std::set<std::string>> feature_ap_sets(const PipelineConfig& cfg, const PipelineInputs& in,
                                                                    const std::map<std::string, MappingResult>& mapping)
{
    std::map<std::string, std::set<std::string>> sets;
    for (const auto& ev : in.timetable) {
        auto& s = sets[ev.class_id];
        if (cfg.feature_aps == FeatureApSource::Inventory) {
            for (const auto& [ap, loc] : in.inventory)
                if (loc.location == ev.room_id) s.insert(ap);
        } else if (const auto it = mapping.find(ev.class_id); it != mapping.end()) {
            s = it->second.mapped;
        }
    }
    return sets;
}

inline std::map<std::string, MappingResult> mapping_by_class(std::span<const MappingResult> results)
{
    std::map<std::string, MappingResult> out;
    for (const auto& r : results) out[r.class_id] = r;
    return out;
}

/// Mapping for the feature stages: read from cfg.mapping when given,
/// otherwise computed in process without writing reports.
inline std::map<std::string, MappingResult> obtain_mapping(const PipelineConfig& cfg, const PipelineInputs& in)
{
    if (cfg.feature_aps == FeatureApSource::Inventory) return {};
    if (!cfg.mapping.empty()) return run_stage("load", [&] { return read_mapping(cfg.mapping, in.timetable); });
    return mapping_by_class(stage_map_aps(cfg, in, false, false).results);
}

inline std::vector<ClassObservation> stage_features(const PipelineConfig& cfg, const PipelineInputs& in,
                                                    const std::map<std::string, std::set<std::string>>& ap_sets)
{
    return run_stage("features", [&] {
        std::vector<ClassObservation> obs(in.timetable.size());
        parallel_for(in.timetable.size(), cfg.jobs, [&](std::size_t i) {
            const auto& ev = in.timetable[i];
            const auto r = in.rosters.find(ev.class_id);
            obs[i] = observe_class(in.store, ev, r == in.rosters.end() ? nullptr : &r->second, ap_sets.at(ev.class_id));
        });
        return obs;
    });
}

/// Classes with ground truth, split the same way evaluate splits them.
inline ClassSplit truth_split(const PipelineConfig& cfg, std::span<const ClassObservation> obs, const TruthCounts& truth)
{
    std::vector<std::string> ids;
    for (const auto& o : obs)
        if (truth.contains(o.cls.class_id)) ids.push_back(o.cls.class_id);
    return split_classes(ids, cfg.train_ratio, cfg.require_seed("train"));
}

inline nlohmann::ordered_json training_json(const TrainingSummary& s)
{
    nlohmann::ordered_json j;
    j["users"] = s.users;
    j["classes"] = s.classes;
    j["imputed_rssi"] = s.imputed_rssi;
    j["slope"] = s.model.calibration.slope;
    j["intercept"] = s.model.calibration.intercept;
    j["rssi_fill"] = s.model.rssi_fill;
    auto& rank = j["feature_ranking"] = nlohmann::ordered_json::array();
    for (const auto& f : s.ranking)
        rank.push_back({{"feature", f.name}, {"f", std::isinf(f.f) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(f.f)}});
    return j;
}

inline TrainingSummary stage_train(const PipelineConfig& cfg, std::span<const ClassObservation> obs,
                                   const std::optional<TruthCounts>& truth)
{
    return run_stage("train", [&] {
        if (!truth) throw usage_error("training needs ground-truth counts (config key 'truth')");
        const auto split = truth_split(cfg, obs, *truth);
        std::vector<ClassObservation> train;
        for (const auto& o : obs)
            if (split.train.contains(o.cls.class_id)) train.push_back(o);
        auto summary = train_occupancy_model(train, *truth);
        {
            auto out = open_output(cfg, "model.txt");
            write_model(out, summary.model);
        }
        {
            auto out = open_output(cfg, "train_report.json");
            out << training_json(summary).dump(2) << '\n';
        }
        return summary;
    });
}

inline OccupancyModel load_model(const std::filesystem::path& path)
{
    return run_stage("load", [&] {
        auto in = detail::open_input(path, "model");
        return read_model(in);
    });
}

inline void write_user_features(std::ostream& out, std::span<const ClassObservation> obs)
{
    std::vector<std::string> header{"class_id", "user_id"};
    for (auto n : kUserFeatureNames) header.emplace_back(n);
    header.emplace_back("label");
    write_row(out, header);
    for (const auto& o : obs)
        for (const auto& u : o.users)
            write_row(out, {o.cls.class_id, u.user_id, format_fixed(u.t_in, 4), format_fixed(u.t_out, 4),
                            format_fixed(u.arrival_delay, 4), format_double(u.n_sessions), format_double(u.n_devices),
                            std::isnan(u.avg_rssi) ? std::string() : format_fixed(u.avg_rssi, 4),
                            !u.label ? std::string() : *u.label == UserLabel::Occupant ? "occupant" : "bystander"});
}

inline std::vector<OccupancyEstimate> stage_estimate(const PipelineConfig& cfg, std::span<const ClassObservation> obs,
                                                     const OccupancyModel& model, const std::optional<TruthCounts>& truth)
{
    return run_stage("estimate", [&] {
        std::vector<OccupancyEstimate> est(obs.size());
        parallel_for(obs.size(), cfg.jobs, [&](std::size_t i) {
            std::optional<double> t;
            if (truth)
                if (const auto it = truth->find(obs[i].cls.class_id); it != truth->end()) t = it->second;
            est[i] = estimate_class(obs[i], model, t);
        });
        {
            auto out = open_output(cfg, "estimates.csv");
            write_estimates(out, est);
        }
        {
            auto out = open_output(cfg, "user_features.csv");
            write_user_features(out, obs);
        }
        return est;
    });
}

inline nlohmann::ordered_json comparison_json(const MethodComparison& mc)
{
    nlohmann::ordered_json j;
    j["train_classes"] = mc.train_classes;
    j["test_classes"] = mc.test_classes;
    j["smape"] = {{"raw_wifi_lr", mc.raw_wifi_lr}, {"enrolled_wifi_lr", mc.enrolled_wifi_lr}, {"lda", mc.lda}, {"lda_lr", mc.lda_lr}};
    j["raw_wifi_fit"] = {{"slope", mc.raw_fit.slope}, {"intercept", mc.raw_fit.intercept}};
    j["enrolled_wifi_fit"] = {{"slope", mc.enrolled_fit.slope}, {"intercept", mc.enrolled_fit.intercept}};
    j["pearson"] = {{"wifi", mc.pearson_wifi ? nlohmann::ordered_json(*mc.pearson_wifi) : nlohmann::ordered_json()},
                    {"enrolled_wifi", mc.pearson_enrolled ? nlohmann::ordered_json(*mc.pearson_enrolled) : nlohmann::ordered_json()}};
    auto rows = [](const std::vector<BreakdownRow>& v) {
        auto a = nlohmann::ordered_json::array();
        for (const auto& r : v) a.push_back({{"key", r.key}, {"classes", r.classes}, {"smape", r.smape}});
        return a;
    };
    j["by_occupancy"] = rows(mc.by_occupancy);
    j["by_room"] = rows(mc.by_room);
    return j;
}

inline MethodComparison stage_evaluate(const PipelineConfig& cfg, std::span<const OccupancyEstimate> estimates)
{
    return run_stage("evaluate", [&] {
        const auto mc = method_comparison(estimates, cfg.train_ratio, cfg.require_seed("evaluate"));
        {
            auto out = open_output(cfg, "evaluation.json");
            out << comparison_json(mc).dump(2) << '\n';
        }
        {
            auto out = open_output(cfg, "breakdown.csv");
            write_row(out, {"table", "key", "classes", "smape"});
            for (const auto& r : mc.by_occupancy) write_row(out, {"occupancy", r.key, std::to_string(r.classes), format_fixed(r.smape, 4)});
            for (const auto& r : mc.by_room) write_row(out, {"room", r.key, std::to_string(r.classes), format_fixed(r.smape, 4)});
        }
        return mc;
    });
}

struct PipelineResult {
    MappingStageResult mapping;
    std::vector<ClassObservation> observations;
    std::optional<TrainingSummary> training;
    OccupancyModel model;
    std::vector<OccupancyEstimate> estimates;
    std::optional<MethodComparison> comparison;
};

/// load, map-aps, features, train (or load model), estimate, evaluate.
/// Evaluation runs only when ground truth is available.
inline PipelineResult run_pipeline(const PipelineConfig& cfg)
{
    cfg.validate();
    write_effective_config(cfg);
    const auto in = load_inputs(cfg);
    PipelineResult r;
    r.mapping = stage_map_aps(cfg, in);
    const auto sets = feature_ap_sets(cfg, in, mapping_by_class(r.mapping.results));
    r.observations = stage_features(cfg, in, sets);
    if (!cfg.model.empty()) {
        r.model = load_model(cfg.model);
    } else {
        r.training = stage_train(cfg, r.observations, in.truth);
        r.model = r.training->model;
    }
    r.estimates = stage_estimate(cfg, r.observations, r.model, in.truth);
    if (in.truth) r.comparison = stage_evaluate(cfg, r.estimates);
    return r;
}

} // namespace wocc
