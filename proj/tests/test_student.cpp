#include <catch2/catch_amalgamated.hpp>

#include "scenic/student.hpp"

#include <cmath>
#include <filesystem>

using namespace scenic;
using Catch::Approx;

namespace {

StudentConfig small_arch() {
    StudentConfig cfg;
    cfg.emb_dim = 6;
    cfg.emb_history = 5;
    cfg.imu_history = 9;
    cfg.channels = 3;
    cfg.head_hidden = 8;
    return cfg;
}

double rel_err(double fd, double an) {
    return std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-3});
}

Encoder random_encoder(int emb_dim, std::uint64_t seed) {
    Rng rng(seed);
    Encoder e;
    e.net = Mlp::xavier_init({kObservationDim, 16, emb_dim}, rng);
    e.strategy = Strategy::OursAdaptive;
    e.seed = seed;
    return e;
}

}  // namespace

TEST_CASE("fresh student hovers on empty history") {
    const StudentConfig cfg = small_arch();
    Rng rng(3);
    const Student s = Student::init(cfg, rng);
    const std::vector<double> emb_window(
        static_cast<std::size_t>(cfg.emb_history) * cfg.emb_dim, 0.0);
    const std::vector<double> imu_window(static_cast<std::size_t>(cfg.imu_history) * 6, 0.0);
    const QuadParams params;
    const Command cmd = s.act(emb_window, imu_window, params.body_rate_limit);
    REQUIRE(cmd.thrust == 0.5);
    REQUIRE(cmd.body_rate_cmd.x == 0.0);
    REQUIRE(cmd.body_rate_cmd.y == 0.0);
    REQUIRE(cmd.body_rate_cmd.z == 0.0);
}

TEST_CASE("student output respects actuator ranges") {
    const StudentConfig cfg = small_arch();
    Rng rng(7);
    const Student s = Student::init(cfg, rng);
    const QuadParams params;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> emb(static_cast<std::size_t>(cfg.emb_history) * cfg.emb_dim);
        std::vector<double> imu(static_cast<std::size_t>(cfg.imu_history) * 6);
        for (auto& e : emb) e = rng.normal(0.0, 3.0);
        for (auto& e : imu) e = rng.normal(0.0, 3.0);
        const Command cmd = s.act(emb, imu, params.body_rate_limit);
        REQUIRE(cmd.thrust > 0.0);
        REQUIRE(cmd.thrust < 1.0);
        REQUIRE(std::fabs(cmd.body_rate_cmd.x) < params.body_rate_limit);
        REQUIRE(std::fabs(cmd.body_rate_cmd.y) < params.body_rate_limit);
        REQUIRE(std::fabs(cmd.body_rate_cmd.z) < params.body_rate_limit);
    }
}

TEST_CASE("command error and action loss") {
    const Command pred{0.7, {1.5, -3.0, 0.0}};
    const Command label{0.5, {0.0, 0.0, 0.0}};
    const auto e = command_error(pred, label, 3.0);
    REQUIRE(e[0] == Approx(0.2));
    REQUIRE(e[1] == Approx(0.5));
    REQUIRE(e[2] == Approx(-1.0));
    REQUIRE(e[3] == Approx(0.0).margin(1e-15));
    REQUIRE(action_loss(pred, label, 3.0) == Approx(0.04 + 0.25 + 1.0));
    REQUIRE(action_loss(pred, pred, 3.0) == 0.0);
}

TEST_CASE("action loss gradients match finite differences") {
    const StudentConfig cfg = small_arch();
    Rng rng(11);
    Student s = Student::init(cfg, rng);
    const double limit = 3.0;
    const double h = 1e-5;

    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> emb(static_cast<std::size_t>(cfg.emb_history) * cfg.emb_dim);
        std::vector<double> imu(static_cast<std::size_t>(cfg.imu_history) * 6);
        for (auto& e : emb) e = rng.normal();
        for (auto& e : imu) e = rng.normal();
        const Command label{rng.uniform(0.2, 0.8),
                            {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                             rng.uniform(-2.0, 2.0)}};

        Student::Grads grads(s);
        const double loss = action_loss_grad(s, emb, imu, label, limit, grads);
        REQUIRE(loss == Approx(action_loss(s.act(emb, imu, limit), label, limit)));

        auto check_block = [&](std::vector<double>& params, const std::vector<double>& g) {
            double worst = 0.0;
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double saved = params[i];
                params[i] = saved + h;
                const double up = action_loss(s.act(emb, imu, limit), label, limit);
                params[i] = saved - h;
                const double down = action_loss(s.act(emb, imu, limit), label, limit);
                params[i] = saved;
                worst = std::max(worst, rel_err((up - down) / (2.0 * h), g[i]));
            }
            REQUIRE(worst < 1e-5);
        };
        check_block(s.emb_branch().params(), grads.emb_branch);
        check_block(s.imu_branch().params(), grads.imu_branch);
        check_block(s.head().params(), grads.head);
    }
}

TEST_CASE("imu normalization") {
    QuadParams params;
    const std::array<double, 6> imu{0.3, -3.0, 1.5, 0.0, 0.0, params.max_thrust_accel / 2.0};
    const auto out = normalize_imu(imu, params);
    REQUIRE(out[0] == Approx(0.1));
    REQUIRE(out[1] == Approx(-1.0));
    REQUIRE(out[2] == Approx(0.5));
    REQUIRE(out[3] == 0.0);
    REQUIRE(out[4] == 0.0);
    REQUIRE(out[5] == Approx(0.5));
}

TEST_CASE("dagger material lines up with the trace") {
    const Track track = make_figure8_track();
    const Scene scene = make_scene(0, 777);
    const QuadParams params;
    RolloutConfig rc;
    rc.laps = 1;
    rc.max_steps = 120;
    rc.seed = 13;
    const RolloutResult r =
        run_rollout(track, scene, params, TeacherGains{}, RewardWeights{}, rc);

    const Encoder enc = random_encoder(6, 5);
    const DaggerRollout d = make_dagger_rollout(r, enc, params);
    REQUIRE(d.embs.size() == r.observations.size());
    REQUIRE(d.labels.size() == r.observations.size());
    REQUIRE(d.imu.size() == r.steps.size());
    for (std::size_t i = 0; i < r.observations.size(); ++i) {
        REQUIRE(d.tick_step[i] == r.observations[i].step);
        REQUIRE(d.embs[i] == normalize_emb(enc.embed(r.observations[i].sample.obs)));
        const auto& label = d.labels[i];
        const auto& expect =
            r.steps[static_cast<std::size_t>(d.tick_step[i])].teacher_cmd;
        REQUIRE(label.thrust == expect.thrust);
        REQUIRE(label.body_rate_cmd.x == expect.body_rate_cmd.x);
    }
    for (std::size_t i = 0; i < r.steps.size(); ++i)
        REQUIRE(d.imu[i] == normalize_imu(r.steps[i].imu, params));
}

TEST_CASE("window filling pads missing history with zeros") {
    StudentConfig cfg;
    cfg.emb_dim = 2;
    cfg.emb_history = 3;
    cfg.imu_history = 4;

    DaggerRollout d;
    for (int tick = 0; tick < 4; ++tick) {
        d.embs.push_back({10.0 + tick, 20.0 + tick});
        d.tick_step.push_back(tick * 6);
        d.labels.push_back(Command{0.5, {0, 0, 0}});
    }
    for (int step = 0; step < 24; ++step)
        d.imu.push_back({1.0 * step, 0.0, 0.0, 0.0, 0.0, 2.0 * step});

    std::vector<double> emb, imu;
    fill_windows(d, 0, cfg, emb, imu);
    REQUIRE(emb == std::vector<double>{0.0, 0.0, 0.0, 0.0, 10.0, 20.0});
    REQUIRE(imu == std::vector<double>(24, 0.0));

    fill_windows(d, 2, cfg, emb, imu);
    REQUIRE(emb == std::vector<double>{10.0, 20.0, 11.0, 21.0, 12.0, 22.0});
    for (int i = 0; i < 4; ++i) {
        REQUIRE(imu[static_cast<std::size_t>(i) * 6] == Approx(8.0 + i));
        REQUIRE(imu[static_cast<std::size_t>(i) * 6 + 5] == Approx(2.0 * (8 + i)));
    }

    fill_windows(d, 1, cfg, emb, imu);
    REQUIRE(emb[0] == 0.0);
    REQUIRE(emb[1] == 0.0);
    REQUIRE(imu[0] == Approx(2.0));
}

TEST_CASE("online controller replays the offline windows") {
    const Track track = make_figure8_track();
    const Scene scene = make_scene(1, 777);
    const QuadParams params;
    const Encoder enc = random_encoder(6, 9);
    const StudentConfig cfg = small_arch();
    Rng rng(17);
    const Student student = Student::init(cfg, rng);

    StudentController controller(enc, student, params);
    std::vector<Command> online;
    const Policy capture = [&](const ControlTickInput& in) {
        const Command c = controller(in);
        online.push_back(c);
        return c;
    };
    RolloutConfig rc;
    rc.mode = PolicyMode::Mixed;
    rc.beta = 1.0;
    rc.laps = 1;
    rc.max_steps = 240;
    rc.seed = 19;
    const RolloutResult r = run_rollout(track, scene, params, TeacherGains{},
                                        RewardWeights{}, rc, capture);
    REQUIRE(online.size() == r.observations.size());

    const DaggerRollout d = make_dagger_rollout(r, enc, params);
    std::vector<double> emb, imu;
    for (std::size_t tick = 0; tick < d.embs.size(); ++tick) {
        fill_windows(d, static_cast<int>(tick), cfg, emb, imu);
        const Command offline = student.act(emb, imu, params.body_rate_limit);
        REQUIRE(offline.thrust == online[tick].thrust);
        REQUIRE(offline.body_rate_cmd.x == online[tick].body_rate_cmd.x);
        REQUIRE(offline.body_rate_cmd.y == online[tick].body_rate_cmd.y);
        REQUIRE(offline.body_rate_cmd.z == online[tick].body_rate_cmd.z);
    }
}

TEST_CASE("imitation training runs deterministically") {
    const Track track = make_figure8_track();
    const std::vector<Scene> scenes{make_scene(0, 777), make_scene(1, 777)};
    const QuadParams params;
    const Encoder enc = random_encoder(8, 23);

    StudentTrainConfig cfg;
    cfg.iterations = 2;
    cfg.rollouts_per_iter = 2;
    cfg.laps = 1;
    cfg.epochs_per_iter = 1;
    cfg.batch = 64;
    cfg.sample_stride = 3;
    cfg.lr_decay_epochs = 10;
    cfg.arch.emb_dim = 8;
    cfg.arch.emb_history = 4;
    cfg.arch.imu_history = 12;
    cfg.arch.channels = 4;
    cfg.arch.head_hidden = 8;
    cfg.seed = 29;

    const StudentTrainResult a =
        train_student(track, scenes, enc, params, TeacherGains{}, RewardWeights{}, cfg);
    REQUIRE(a.log.size() == 2);
    REQUIRE(a.log[0].beta == 1.0);
    REQUIRE(a.log[0].rollout_sr == 1.0);
    REQUIRE(a.log[1].beta == 0.0);
    REQUIRE(a.log[0].loss > 0.0);
    REQUIRE(std::isfinite(a.log[1].loss));
    REQUIRE(a.log[1].epoch == 1);

    const StudentTrainResult b =
        train_student(track, scenes, enc, params, TeacherGains{}, RewardWeights{}, cfg);
    REQUIRE(a.student.head().params() == b.student.head().params());
    REQUIRE(a.student.emb_branch().params() == b.student.emb_branch().params());
    REQUIRE(a.student.imu_branch().params() == b.student.imu_branch().params());

    StudentTrainConfig bad = cfg;
    bad.arch.emb_dim = 4;
    REQUIRE_THROWS_AS(
        train_student(track, scenes, enc, params, TeacherGains{}, RewardWeights{}, bad),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        train_student(track, {}, enc, params, TeacherGains{}, RewardWeights{}, cfg),
        std::invalid_argument);
}

TEST_CASE("student checkpoints roundtrip") {
    const StudentConfig cfg = small_arch();
    Rng rng(31);
    const Student s = Student::init(cfg, rng);
    const auto dir = std::filesystem::temp_directory_path() / "scenic_student_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "student.json").string();
    save_student(s, path, "abcd1234abcd1234", 7, "ours_adaptive");
    const Student back = load_student(path);
    REQUIRE(back.config().emb_dim == cfg.emb_dim);
    REQUIRE(back.config().imu_history == cfg.imu_history);
    REQUIRE(back.emb_branch().params() == s.emb_branch().params());
    REQUIRE(back.imu_branch().params() == s.imu_branch().params());
    REQUIRE(back.head().params() == s.head().params());
    std::filesystem::remove(path);

    nlohmann::json j = student_to_json(s, "x", 1, "aug_cl");
    j["type"] = "encoder";
    REQUIRE_THROWS_AS(student_from_json(j), std::runtime_error);
    nlohmann::json j2 = student_to_json(s, "x", 1, "aug_cl");
    j2["head"] = std::vector<double>{1.0, 2.0};
    REQUIRE_THROWS_AS(student_from_json(j2), std::runtime_error);
}
