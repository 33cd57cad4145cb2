#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenic/scene.hpp"

namespace scenic {

struct ObservationSample {
    int scene_id = 0;
    Pose pose;
    double progress = 0.0;          // [0, 1)
    std::vector<double> obs;

    bool valid() const {
        return progress >= 0.0 && progress < 1.0 && all_finite(obs);
    }
};

// Contiguous samples of one rollout within a Dataset.
struct RolloutSpan {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the last sample
};

struct Dataset {
    std::vector<ObservationSample> samples;
    std::vector<RolloutSpan> rollouts;

    std::size_t size() const { return samples.size(); }

    void append_rollout(std::vector<ObservationSample> rollout_samples) {
        RolloutSpan span{samples.size(), samples.size() + rollout_samples.size()};
        for (auto& s : rollout_samples) samples.push_back(std::move(s));
        rollouts.push_back(span);
    }

    std::vector<int> scene_ids() const {
        std::vector<int> ids;
        for (const auto& s : samples) {
            bool seen = false;
            for (int id : ids) seen = seen || id == s.scene_id;
            if (!seen) ids.push_back(s.scene_id);
        }
        return ids;
    }

    // Index of the rollout containing sample i.
    std::size_t rollout_of(std::size_t i) const {
        for (std::size_t r = 0; r < rollouts.size(); ++r)
            if (i >= rollouts[r].begin && i < rollouts[r].end) return r;
        throw std::out_of_range("Dataset::rollout_of: sample not in any rollout");
    }
};

inline nlohmann::json sample_to_json(const ObservationSample& s) {
    return nlohmann::json{
        {"scene_id", s.scene_id},
        {"progress", s.progress},
        {"pose",
         {{"p", {s.pose.p_norm.x, s.pose.p_norm.y, s.pose.p_norm.z}},
          {"q", {s.pose.q.w, s.pose.q.x, s.pose.q.y, s.pose.q.z}}}},
        {"obs", s.obs}};
}

inline ObservationSample sample_from_json(const nlohmann::json& j) {
    ObservationSample s;
    s.scene_id = j.at("scene_id").get<int>();
    s.progress = j.at("progress").get<double>();
    const auto& p = j.at("pose").at("p");
    const auto& q = j.at("pose").at("q");
    s.pose = Pose({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()},
                  {q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                   q.at(3).get<double>()});
    s.obs = j.at("obs").get<std::vector<double>>();
    return s;
}

// One JSON object per line: {scene_id, progress, pose:{p,q}, obs}.
inline void write_dataset_jsonl(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_dataset_jsonl: cannot open " + path);
    for (const auto& s : ds.samples) out << sample_to_json(s).dump() << "\n";
    if (!out) throw std::runtime_error("write_dataset_jsonl: write failed for " + path);
}

inline Dataset read_dataset_jsonl(const std::string& path,
                                  const std::vector<RolloutSpan>& rollouts = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_dataset_jsonl: cannot open " + path);
    Dataset ds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ds.samples.push_back(sample_from_json(nlohmann::json::parse(line)));
    }
    if (!rollouts.empty()) {
        ds.rollouts = rollouts;
        if (ds.rollouts.back().end != ds.samples.size())
            throw std::runtime_error("read_dataset_jsonl: rollout spans do not match " + path);
    } else {
        ds.rollouts.push_back({0, ds.samples.size()});
    }
    return ds;
}

inline void merge_into(Dataset& dst, const Dataset& src) {
    const std::size_t base = dst.samples.size();
    dst.samples.insert(dst.samples.end(), src.samples.begin(), src.samples.end());
    for (const auto& r : src.rollouts) dst.rollouts.push_back({r.begin + base, r.end + base});
}

}  // namespace scenic
