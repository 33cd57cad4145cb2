#pragma once

#include <cstddef>
#include <vector>

#include "scenic/dataset.hpp"
#include "scenic/rng.hpp"
#include "scenic/scene.hpp"

namespace scenic::test {

inline Quat random_unit_quat(Rng& rng) {
    Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return q.normalized();
}

inline std::vector<double> random_obs(Rng& rng) {
    std::vector<double> obs(kObservationDim);
    for (auto& v : obs) v = rng.normal(0.0, 1.0);
    return obs;
}

// Synthetic dataset with evenly spread progress values, one rollout per
// scene. Observations are random; poses are valid but arbitrary.
inline Dataset fabricated_dataset(std::size_t per_scene, int n_scenes, Rng& rng) {
    Dataset ds;
    for (int s = 0; s < n_scenes; ++s) {
        std::vector<ObservationSample> rollout;
        for (std::size_t k = 0; k < per_scene; ++k) {
            ObservationSample sample;
            sample.scene_id = s;
            sample.progress =
                (static_cast<double>(k) + rng.uniform(0.0, 0.5)) / static_cast<double>(per_scene);
            sample.pose = Pose({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                                rng.uniform(0.0, 1.0)},
                               random_unit_quat(rng));
            sample.obs = random_obs(rng);
            rollout.push_back(std::move(sample));
        }
        ds.append_rollout(std::move(rollout));
    }
    return ds;
}

}  // namespace scenic::test
