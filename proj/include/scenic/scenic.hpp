#pragma once

#include "scenic/adam.hpp"
#include "scenic/config.hpp"
#include "scenic/contrastive.hpp"
#include "scenic/dataset.hpp"
#include "scenic/dynamics.hpp"
#include "scenic/eval.hpp"
#include "scenic/math.hpp"
#include "scenic/mlp.hpp"
#include "scenic/pipeline.hpp"
#include "scenic/rng.hpp"
#include "scenic/rollout.hpp"
#include "scenic/scene.hpp"
#include "scenic/student.hpp"
#include "scenic/teacher.hpp"
#include "scenic/track.hpp"
