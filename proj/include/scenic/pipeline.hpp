#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenic/config.hpp"
#include "scenic/contrastive.hpp"
#include "scenic/dataset.hpp"
#include "scenic/eval.hpp"
#include "scenic/rollout.hpp"
#include "scenic/student.hpp"
#include "scenic/teacher.hpp"
#include "scenic/track.hpp"

namespace scenic {

constexpr const char* kOutRootEnvVar = "SCENIC_OUT_ROOT";

struct MissingArtifact : std::runtime_error {
    MissingArtifact(const std::string& what, const std::string& producer)
        : std::runtime_error("missing artifact: " + what + "; run `" + producer + "` first") {}
};

struct ScenesConfig {
    int count = 4;
    std::vector<int> train = {0, 1};
    int heldout = 3;
    double noise_std = 0.01;
    std::uint64_t master_seed = 777;
};

struct DataConfig {
    int rollouts_per_scene = 3;
    int laps = 2;
    double cmd_jitter = 0.05;
};

struct EvalSettings {
    int n_starts = 64;
    int laps = 2;
    int intra_anchors = 256;
    int inter_poses = 1000;
    int bins = kDefaultIntraBins;
};

struct TrackSpec {
    int n_gates = 7;
    double scale_x = 8.0;
    double scale_y = 8.0;
    double altitude = 2.0;
    double half_width = 1.0;
};

struct PipelineConfig {
    std::uint64_t seed = 1;
    std::string out_root = "out";
    TrackSpec track;
    ScenesConfig scenes;
    DataConfig data;
    PairStrategy pairs;
    EncoderTrainConfig encoder;
    TeacherGains gains;
    QuadParams quad;
    RewardWeights rewards;
    StudentTrainConfig student;
    EvalSettings eval;
    std::string hash;
};

inline PipelineConfig config_from_map(const ConfigMap& m) {
    PipelineConfig c;
    c.seed = get_u64(m, "global.seed", c.seed);
    c.out_root = get_string(m, "global.out_root", c.out_root);

    c.track.n_gates = get_int(m, "track.gates", c.track.n_gates);
    c.track.scale_x = get_double(m, "track.scale_x", c.track.scale_x);
    c.track.scale_y = get_double(m, "track.scale_y", c.track.scale_y);
    c.track.altitude = get_double(m, "track.altitude", c.track.altitude);
    c.track.half_width = get_double(m, "track.half_width", c.track.half_width);

    c.scenes.count = get_int(m, "scenes.count", c.scenes.count);
    c.scenes.train = get_int_list(m, "scenes.train", c.scenes.train);
    c.scenes.heldout = get_int(m, "scenes.heldout", c.scenes.heldout);
    c.scenes.noise_std = get_double(m, "scenes.noise_std", c.scenes.noise_std);
    c.scenes.master_seed = get_u64(m, "scenes.master_seed", c.scenes.master_seed);

    c.data.rollouts_per_scene = get_int(m, "data.rollouts_per_scene", c.data.rollouts_per_scene);
    c.data.laps = get_int(m, "data.laps", c.data.laps);
    c.data.cmd_jitter = get_double(m, "data.cmd_jitter", c.data.cmd_jitter);

    c.pairs.pos_window_lo = get_double(m, "pairs.pos_lo", c.pairs.pos_window_lo);
    c.pairs.pos_window_hi = get_double(m, "pairs.pos_hi", c.pairs.pos_window_hi);
    c.pairs.neg_window_lo = get_double(m, "pairs.neg_lo", c.pairs.neg_window_lo);
    c.pairs.neg_window_hi = get_double(m, "pairs.neg_hi", c.pairs.neg_window_hi);
    c.pairs.aug_prob = get_double(m, "pairs.aug_prob", c.pairs.aug_prob);
    c.pairs.aug_strength = get_double(m, "pairs.aug_strength", c.pairs.aug_strength);
    c.pairs.tau_min = get_double(m, "pairs.tau_min", c.pairs.tau_min);
    c.pairs.const_tau = get_double(m, "pairs.const_tau", c.pairs.const_tau);
    c.pairs.n_positives = get_int(m, "pairs.positives", c.pairs.n_positives);
    c.pairs.n_negatives = get_int(m, "pairs.negatives", c.pairs.n_negatives);
    c.pairs.statecl_horizon = get_int(m, "pairs.statecl_horizon", c.pairs.statecl_horizon);

    c.encoder.hidden = get_int_list(m, "encoder.hidden", c.encoder.hidden);
    c.encoder.embedding_dim = get_int(m, "encoder.embedding_dim", c.encoder.embedding_dim);
    c.encoder.steps = get_int(m, "encoder.steps", c.encoder.steps);
    c.encoder.anchors_per_step = get_int(m, "encoder.anchors_per_step",
                                         c.encoder.anchors_per_step);
    c.encoder.lr_start = get_double(m, "encoder.lr_start", c.encoder.lr_start);
    c.encoder.lr_end = get_double(m, "encoder.lr_end", c.encoder.lr_end);
    c.encoder.autoencoder_batch = get_int(m, "encoder.autoencoder_batch",
                                          c.encoder.autoencoder_batch);

    c.gains.lookahead = get_double(m, "teacher.lookahead", c.gains.lookahead);
    c.gains.cruise_speed = get_double(m, "teacher.cruise_speed", c.gains.cruise_speed);
    c.gains.kv = get_double(m, "teacher.kv", c.gains.kv);
    c.gains.k_att = get_double(m, "teacher.k_att", c.gains.k_att);

    c.student.arch.emb_dim = c.encoder.embedding_dim;
    c.student.arch.emb_history = get_int(m, "student.emb_history", c.student.arch.emb_history);
    c.student.arch.imu_history = get_int(m, "student.imu_history", c.student.arch.imu_history);
    c.student.arch.channels = get_int(m, "student.channels", c.student.arch.channels);
    c.student.arch.head_hidden = get_int(m, "student.head_hidden", c.student.arch.head_hidden);
    c.student.iterations = get_int(m, "student.iterations", c.student.iterations);
    c.student.rollouts_per_iter = get_int(m, "student.rollouts_per_iter",
                                          c.student.rollouts_per_iter);
    c.student.laps = get_int(m, "student.laps", c.student.laps);
    c.student.epochs_per_iter = get_int(m, "student.epochs_per_iter",
                                        c.student.epochs_per_iter);
    c.student.batch = get_int(m, "student.batch", c.student.batch);
    c.student.sample_stride = get_int(m, "student.sample_stride", c.student.sample_stride);
    c.student.cmd_jitter = get_double(m, "student.cmd_jitter", c.student.cmd_jitter);
    c.student.lr_start = get_double(m, "student.lr_start", c.student.lr_start);
    c.student.lr_end = get_double(m, "student.lr_end", c.student.lr_end);
    c.student.lr_decay_epochs = get_int(m, "student.lr_decay_epochs",
                                        c.student.lr_decay_epochs);

    c.eval.n_starts = get_int(m, "eval.n_starts", c.eval.n_starts);
    c.eval.laps = get_int(m, "eval.laps", c.eval.laps);
    c.eval.intra_anchors = get_int(m, "eval.intra_anchors", c.eval.intra_anchors);
    c.eval.inter_poses = get_int(m, "eval.inter_poses", c.eval.inter_poses);
    c.eval.bins = get_int(m, "eval.bins", c.eval.bins);

    for (int id : c.scenes.train)
        if (id == c.scenes.heldout)
            throw std::runtime_error("config: held-out scene appears in the training split");
    for (int id : c.scenes.train)
        if (id < 0 || id >= c.scenes.count)
            throw std::runtime_error("config: training scene id out of range");
    if (c.scenes.heldout < 0 || c.scenes.heldout >= c.scenes.count)
        throw std::runtime_error("config: held-out scene id out of range");

    c.hash = config_hash(m);
    c.encoder.config_hash = c.hash;
    c.encoder.seed = c.seed;
    c.student.config_hash = c.hash;
    c.student.seed = c.seed;
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path, std::uint64_t* seed_override,
                                           const std::string& out_root_override) {
    ConfigMap m = path.empty() ? ConfigMap{} : read_config_file(path);
    if (seed_override) m["global.seed"] = std::to_string(*seed_override);
    PipelineConfig c = config_from_map(m);
    if (const char* env = std::getenv(kOutRootEnvVar); env && *env) c.out_root = env;
    if (!out_root_override.empty()) c.out_root = out_root_override;
    return c;
}

inline Track make_track(const PipelineConfig& c) {
    return make_figure8_track(c.track.n_gates, c.track.scale_x, c.track.scale_y,
                              c.track.altitude, c.track.half_width);
}

inline std::vector<Scene> make_scenes(const PipelineConfig& c) {
    std::vector<Scene> scenes;
    scenes.reserve(static_cast<std::size_t>(c.scenes.count));
    for (int id = 0; id < c.scenes.count; ++id)
        scenes.push_back(make_scene(id, c.scenes.master_seed, c.scenes.noise_std));
    return scenes;
}

struct ArtifactPaths {
    std::string data_dir, encoder_dir, student_dir, report_dir;

    static ArtifactPaths for_config(const PipelineConfig& c, bool create = false) {
        namespace fs = std::filesystem;
        ArtifactPaths p;
        p.data_dir = (fs::path(c.out_root) / "data" / c.hash).string();
        p.encoder_dir = (fs::path(c.out_root) / "encoders" / c.hash).string();
        p.student_dir = (fs::path(c.out_root) / "students" / c.hash).string();
        p.report_dir = (fs::path(c.out_root) / "reports" / c.hash).string();
        if (create)
            for (const std::string& d :
                 {p.data_dir, p.encoder_dir, p.student_dir, p.report_dir})
                fs::create_directories(d);
        return p;
    }

    std::string scene_file(int scene_id) const {
        return data_dir + "/scene_" + std::to_string(scene_id) + ".jsonl";
    }
    std::string manifest_file() const { return data_dir + "/manifest.json"; }
    std::string encoder_file(Strategy s, std::uint64_t seed) const {
        return encoder_dir + "/encoder_" + strategy_name(s) + "_s" + std::to_string(seed) +
               ".json";
    }
    std::string encoder_log_file(Strategy s, std::uint64_t seed) const {
        return encoder_dir + "/encoder_" + strategy_name(s) + "_s" + std::to_string(seed) +
               "_log.csv";
    }
    std::string student_file(Strategy s, std::uint64_t seed) const {
        return student_dir + "/student_" + strategy_name(s) + "_s" + std::to_string(seed) +
               ".json";
    }
    std::string student_log_file(Strategy s, std::uint64_t seed) const {
        return student_dir + "/student_" + strategy_name(s) + "_s" + std::to_string(seed) +
               "_log.csv";
    }
    std::string report_file(const std::string& name) const { return report_dir + "/" + name; }
};

inline const std::vector<Strategy>& all_strategies() {
    static const std::vector<Strategy> s{Strategy::OursAdaptive, Strategy::OursConstant,
                                         Strategy::AugCL, Strategy::StateCL,
                                         Strategy::Autoencoder};
    return s;
}

// ---- data generation ----

inline std::vector<ObservationSample> tick_samples(const RolloutResult& r) {
    std::vector<ObservationSample> out;
    out.reserve(r.observations.size());
    for (const ObsRecord& o : r.observations) out.push_back(o.sample);
    return out;
}

inline void cmd_gen_data(const PipelineConfig& cfg) {
    const Track track = make_track(cfg);
    const std::vector<Scene> scenes = make_scenes(cfg);
    const ArtifactPaths paths = ArtifactPaths::for_config(cfg, true);
    const Rng base(cfg.seed);

    nlohmann::json manifest;
    manifest["config_hash"] = cfg.hash;
    manifest["seed"] = cfg.seed;
    manifest["scenes"] = nlohmann::json::array();
    std::size_t total = 0;

    for (const Scene& scene : scenes) {
        Dataset ds;
        for (int r = 0; r < cfg.data.rollouts_per_scene; ++r) {
            RolloutConfig rc;
            rc.mode = PolicyMode::Teacher;
            rc.laps = cfg.data.laps;
            rc.cmd_jitter = cfg.data.cmd_jitter;
            rc.seed = base.split("gen-data",
                                 static_cast<std::uint64_t>(scene.scene_id) * 100 +
                                     static_cast<std::uint64_t>(r))
                          .seed();
            const RolloutResult rr =
                run_rollout(track, scene, cfg.quad, cfg.gains, cfg.rewards, rc);
            if (rr.crashed)
                throw std::runtime_error("gen-data: teacher crashed in scene " +
                                         std::to_string(scene.scene_id) + ", rollout " +
                                         std::to_string(r));
            ds.append_rollout(tick_samples(rr));
        }
        write_dataset_jsonl(ds, paths.scene_file(scene.scene_id));
        nlohmann::json spans = nlohmann::json::array();
        for (const RolloutSpan& s : ds.rollouts) spans.push_back({s.begin, s.end});
        manifest["scenes"].push_back({{"scene_id", scene.scene_id},
                                      {"file", paths.scene_file(scene.scene_id)},
                                      {"records", ds.size()},
                                      {"rollouts", spans}});
        total += ds.size();
    }
    manifest["total_records"] = total;
    std::ofstream out(paths.manifest_file());
    if (!out) throw std::runtime_error("gen-data: cannot open " + paths.manifest_file());
    out << manifest.dump(2) << '\n';
}

inline nlohmann::json load_manifest(const ArtifactPaths& paths) {
    std::ifstream in(paths.manifest_file());
    if (!in) throw MissingArtifact(paths.manifest_file(), "gen-data");
    nlohmann::json j;
    in >> j;
    return j;
}

inline Dataset load_scene_dataset(const ArtifactPaths& paths, const nlohmann::json& manifest,
                                  int scene_id) {
    for (const auto& entry : manifest.at("scenes")) {
        if (entry.at("scene_id").get<int>() != scene_id) continue;
        std::vector<RolloutSpan> spans;
        for (const auto& s : entry.at("rollouts"))
            spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
        return read_dataset_jsonl(entry.at("file").get<std::string>(), spans);
    }
    throw MissingArtifact("dataset for scene " + std::to_string(scene_id), "gen-data");
}

inline Dataset load_full_dataset(const ArtifactPaths& paths, const nlohmann::json& manifest) {
    Dataset all;
    for (const auto& entry : manifest.at("scenes"))
        merge_into(all, load_scene_dataset(paths, manifest, entry.at("scene_id").get<int>()));
    if (all.samples.empty()) throw MissingArtifact("dataset", "gen-data");
    return all;
}

// ---- encoder training ----

inline void write_encoder_log(const std::vector<TrainLogRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "step,loss,lr\n";
    char buf[96];
    for (const TrainLogRow& r : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.step, r.loss, r.lr);
        out << buf;
    }
}

inline Encoder train_one_encoder(const PipelineConfig& cfg, Strategy strategy,
                                 const Dataset& dataset,
                                 std::vector<TrainLogRow>* log = nullptr) {
    EncoderTrainResult res;
    if (strategy == Strategy::Autoencoder) {
        res = train_autoencoder(dataset, cfg.encoder);
    } else {
        PairStrategy pairs = cfg.pairs;
        pairs.variant = strategy;
        res = train_encoder(dataset, pairs, cfg.encoder);
    }
    if (log) *log = std::move(res.log);
    return std::move(res.encoder);
}

inline void cmd_train_encoder(const PipelineConfig& cfg, Strategy strategy) {
    const ArtifactPaths paths = ArtifactPaths::for_config(cfg, true);
    const nlohmann::json manifest = load_manifest(paths);
    const Dataset dataset = load_full_dataset(paths, manifest);
    std::vector<TrainLogRow> log;
    const Encoder enc = train_one_encoder(cfg, strategy, dataset, &log);
    save_encoder(enc, paths.encoder_file(strategy, cfg.seed));
    write_encoder_log(log, paths.encoder_log_file(strategy, cfg.seed));
}

inline Encoder load_encoder_artifact(const PipelineConfig& cfg, const ArtifactPaths& paths,
                                     Strategy strategy, bool force = false) {
    const std::string file = paths.encoder_file(strategy, cfg.seed);
    if (!std::filesystem::exists(file))
        throw MissingArtifact(file, "train-encoder --strategy " +
                                        std::string(strategy_name(strategy)));
    Encoder enc = load_encoder(file);
    if (!force && enc.config_hash != cfg.hash)
        throw std::runtime_error("encoder artifact " + file + " has config hash " +
                                 enc.config_hash + ", expected " + cfg.hash +
                                 " (use --force to override)");
    return enc;
}

// ---- student training ----

inline void write_student_log(const std::vector<StudentIterLogRow>& log,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "iteration,epoch,loss,beta,lr,rollout_sr\n";
    char buf[160];
    for (const StudentIterLogRow& r : log) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", r.iteration, r.epoch,
                      r.loss, r.beta, r.lr, r.rollout_sr);
        out << buf;
    }
}

inline std::vector<Scene> training_scenes(const PipelineConfig& cfg) {
    std::vector<Scene> scenes;
    for (int id : cfg.scenes.train)
        scenes.push_back(make_scene(id, cfg.scenes.master_seed, cfg.scenes.noise_std));
    return scenes;
}

inline void cmd_train_student(const PipelineConfig& cfg, Strategy strategy,
                              bool force = false) {
    const ArtifactPaths paths = ArtifactPaths::for_config(cfg, true);
    const Encoder encoder = load_encoder_artifact(cfg, paths, strategy, force);
    const Track track = make_track(cfg);
    const StudentTrainResult res = train_student(track, training_scenes(cfg), encoder, cfg.quad,
                                                 cfg.gains, cfg.rewards, cfg.student);
    save_student(res.student, paths.student_file(strategy, cfg.seed), cfg.hash, cfg.seed,
                 strategy_name(strategy));
    write_student_log(res.log, paths.student_log_file(strategy, cfg.seed));
}

inline Student load_student_artifact(const PipelineConfig& cfg, const ArtifactPaths& paths,
                                     Strategy strategy, bool force = false) {
    const std::string file = paths.student_file(strategy, cfg.seed);
    if (!std::filesystem::exists(file))
        throw MissingArtifact(file, "train-student --strategy " +
                                        std::string(strategy_name(strategy)));
    std::ifstream in(file);
    nlohmann::json j;
    in >> j;
    if (!force && j.at("config_hash").get<std::string>() != cfg.hash)
        throw std::runtime_error("student artifact " + file + " has config hash " +
                                 j.at("config_hash").get<std::string>() + ", expected " +
                                 cfg.hash + " (use --force to override)");
    return student_from_json(j);
}

// ---- evaluation ----

struct MethodConsistency {
    Strategy strategy;
    ConsistencyReport report;
    double intra_separation = 0.0;
};

inline MethodConsistency evaluate_consistency(const PipelineConfig& cfg, const Track& track,
                                              const std::vector<Scene>& scenes,
                                              const Encoder& encoder,
                                              const std::vector<Dataset>& scene_datasets) {
    MethodConsistency mc;
    mc.strategy = encoder.strategy;
    IntraAccum accum(cfg.eval.bins);
    std::size_t n_samples = 0;
    Rng rng = Rng(cfg.seed).split("eval-intra");
    for (const Dataset& ds : scene_datasets) {
        intra_accumulate(encoder, ds, static_cast<std::size_t>(cfg.eval.intra_anchors), rng,
                         accum);
        n_samples += ds.size();
    }
    Rng inter_rng = Rng(cfg.seed).split("eval-inter");
    const InterConsistency inter = inter_consistency(
        encoder, track, scenes, static_cast<std::size_t>(cfg.eval.inter_poses), inter_rng);
    mc.report.intra = finalize_intra(accum);
    mc.report.inter_mu = inter.mu;
    mc.report.inter_iqr = inter.iqr;
    mc.report.n_samples = n_samples;
    mc.intra_separation = accum.pooled_mean(0.0, 0.05) - accum.pooled_mean(0.45, 0.5);
    return mc;
}

inline RolloutResult reference_teacher_trace(const PipelineConfig& cfg, const Track& track,
                                             const Scene& scene) {
    RolloutConfig rc;
    rc.mode = PolicyMode::Teacher;
    rc.laps = cfg.eval.laps;
    rc.seed = Rng(cfg.seed).split("openloop-reference").seed();
    const RolloutResult rr = run_rollout(track, scene, cfg.quad, cfg.gains, cfg.rewards, rc);
    if (rr.crashed) throw std::runtime_error("reference teacher trace crashed");
    return rr;
}

struct EvalOutcome {
    nlohmann::json report;
    bool gate_ok = true;
    std::vector<std::string> gate_failures;
};

namespace detail {

inline void gate_check(EvalOutcome& out, bool ok, const std::string& what) {
    if (!ok) {
        out.gate_ok = false;
        out.gate_failures.push_back(what);
    }
}

}  // namespace detail

inline EvalOutcome cmd_eval(const PipelineConfig& cfg, const std::string& which,
                            bool gate = false, bool force = false) {
    if (which != "encoder" && which != "open-loop" && which != "closed-loop" && which != "all")
        throw std::invalid_argument("eval: unknown target '" + which + "'");
    const ArtifactPaths paths = ArtifactPaths::for_config(cfg, true);
    const Track track = make_track(cfg);
    const std::vector<Scene> scenes = make_scenes(cfg);
    EvalOutcome out;
    out.report["config_hash"] = cfg.hash;
    out.report["seed"] = cfg.seed;

    const bool want_encoder = which == "encoder" || which == "all";
    const bool want_open = which == "open-loop" || which == "all";
    const bool want_closed = which == "closed-loop" || which == "all";

    std::vector<std::pair<Strategy, Encoder>> encoders;
    for (Strategy s : all_strategies())
        encoders.emplace_back(s, load_encoder_artifact(cfg, paths, s, force));

    if (want_encoder) {
        const nlohmann::json manifest = load_manifest(paths);
        std::vector<Dataset> scene_datasets;
        for (const Scene& sc : scenes)
            scene_datasets.push_back(load_scene_dataset(paths, manifest, sc.scene_id));
        nlohmann::json section;
        std::ofstream csv(paths.report_file("consistency.csv"));
        if (!csv) throw std::runtime_error("cannot open consistency.csv");
        csv << "strategy,bin_center,mean_sim,count\n";
        char buf[128];
        double ours_mu = 0.0, ours_sep = 0.0;
        for (const auto& [strategy, encoder] : encoders) {
            const MethodConsistency mc =
                evaluate_consistency(cfg, track, scenes, encoder, scene_datasets);
            nlohmann::json rep = consistency_to_json(mc.report);
            rep["intra_separation"] = mc.intra_separation;
            section[strategy_name(strategy)] = rep;
            for (const IntraBin& b : mc.report.intra) {
                std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%zu\n", strategy_name(strategy),
                              b.center, b.mean_sim, b.count);
                csv << buf;
            }
            if (strategy == Strategy::OursAdaptive) {
                ours_mu = mc.report.inter_mu;
                ours_sep = mc.intra_separation;
            }
        }
        out.report["consistency"] = section;
        if (gate) {
            detail::gate_check(out, ours_sep >= 0.5, "intra separation >= 0.5");
            detail::gate_check(out, ours_mu >= 0.9, "inter-scene mu >= 0.9");
            for (Strategy s : {Strategy::AugCL, Strategy::StateCL}) {
                const auto& rep = section[strategy_name(s)];
                const bool weaker = rep["inter"]["mu"].get<double>() < ours_mu ||
                                    rep["inter"]["iqr"].get<double>() >
                                        section[strategy_name(Strategy::OursAdaptive)]["inter"]
                                               ["iqr"]
                                                   .get<double>();
                detail::gate_check(out, weaker,
                                   std::string(strategy_name(s)) + " weaker inter-scene");
            }
        }
    }

    if (want_open || want_closed) {
        std::vector<std::pair<Strategy, Student>> students;
        for (Strategy s : all_strategies())
            students.emplace_back(s, load_student_artifact(cfg, paths, s, force));

        if (want_open) {
            const Scene& heldout = scenes[static_cast<std::size_t>(cfg.scenes.heldout)];
            const RolloutResult ref = reference_teacher_trace(cfg, track, heldout);
            nlohmann::json section;
            for (std::size_t i = 0; i < students.size(); ++i) {
                const double err = open_loop_action_error(encoders[i].second,
                                                          students[i].second, ref, cfg.quad);
                section[strategy_name(students[i].first)] = err;
            }
            out.report["open_loop"] = section;
            if (gate) {
                const double ours = section[strategy_name(Strategy::OursAdaptive)];
                detail::gate_check(
                    out, ours <= section[strategy_name(Strategy::OursConstant)].get<double>(),
                    "ours-adaptive <= ours-constant action error");
                for (Strategy s :
                     {Strategy::AugCL, Strategy::StateCL, Strategy::Autoencoder})
                    detail::gate_check(out,
                                       ours < section[strategy_name(s)].get<double>(),
                                       std::string("ours-adaptive beats ") + strategy_name(s) +
                                           " action error");
            }
        }

        if (want_closed) {
            nlohmann::json section;
            std::ofstream csv(paths.report_file("closed_loop.csv"));
            if (!csv) throw std::runtime_error("cannot open closed_loop.csv");
            csv << "strategy,scene_id,split,success_rate,action_error,agp_mean,agp_std\n";
            char buf[192];
            std::vector<int> eval_scenes = cfg.scenes.train;
            eval_scenes.push_back(cfg.scenes.heldout);
            for (std::size_t i = 0; i < students.size(); ++i) {
                nlohmann::json per_scene;
                for (int scene_id : eval_scenes) {
                    const Scene& scene = scenes[static_cast<std::size_t>(scene_id)];
                    const ClosedLoopReport rep = closed_loop_eval(
                        track, scene, cfg.quad, cfg.gains, cfg.rewards, &encoders[i].second,
                        &students[i].second, cfg.eval.n_starts, cfg.eval.laps,
                        Rng(cfg.seed).split("closed-loop").seed());
                    per_scene[std::to_string(scene_id)] = closed_loop_to_json(rep);
                    const bool is_heldout = scene_id == cfg.scenes.heldout;
                    std::snprintf(buf, sizeof buf, "%s,%d,%s,%.17g,%.17g,%.17g,%.17g\n",
                                  strategy_name(students[i].first), scene_id,
                                  is_heldout ? "heldout" : "train", rep.success_rate,
                                  rep.action_error, rep.agp_mean, rep.agp_std);
                    csv << buf;
                }
                section[strategy_name(students[i].first)] = per_scene;
            }
            out.report["closed_loop"] = section;
            if (gate) {
                const std::string ho = std::to_string(cfg.scenes.heldout);
                const auto& ours = section[strategy_name(Strategy::OursAdaptive)];
                for (int scene_id : cfg.scenes.train) {
                    const std::string sid = std::to_string(scene_id);
                    for (Strategy s : all_strategies())
                        detail::gate_check(
                            out,
                            section[strategy_name(s)][sid]["success_rate"].get<double>() >= 0.9,
                            std::string(strategy_name(s)) + " train-scene SR >= 0.9");
                }
                for (Strategy s :
                     {Strategy::AugCL, Strategy::StateCL, Strategy::Autoencoder}) {
                    detail::gate_check(
                        out,
                        ours[ho]["success_rate"].get<double>() >
                            section[strategy_name(s)][ho]["success_rate"].get<double>(),
                        std::string("ours-adaptive held-out SR beats ") + strategy_name(s));
                    detail::gate_check(
                        out,
                        ours[ho]["agp_mean"].get<double>() >
                            section[strategy_name(s)][ho]["agp_mean"].get<double>(),
                        std::string("ours-adaptive held-out AGP beats ") + strategy_name(s));
                }
            }
        }
    }

    const std::string report_name = "eval_" + which + "_s" + std::to_string(cfg.seed) + ".json";
    std::ofstream rep(paths.report_file(report_name));
    if (!rep) throw std::runtime_error("cannot open report " + report_name);
    rep << out.report.dump(2) << '\n';
    return out;
}

inline void cmd_dump_embeddings(const PipelineConfig& cfg, bool force = false) {
    const ArtifactPaths paths = ArtifactPaths::for_config(cfg, true);
    const nlohmann::json manifest = load_manifest(paths);
    const Dataset dataset = load_full_dataset(paths, manifest);
    for (Strategy s : all_strategies()) {
        const Encoder enc = load_encoder_artifact(cfg, paths, s, force);
        dump_embeddings(enc, dataset,
                        paths.report_file("embeddings_" + std::string(strategy_name(s)) + "_s" +
                                          std::to_string(cfg.seed) + ".csv"));
    }
}

}  // namespace scenic
