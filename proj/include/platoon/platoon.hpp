// Copyright 2026 The Platoon Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "platoon/clustering.hpp"
#include "platoon/config.hpp"
#include "platoon/coordination_graph.hpp"
#include "platoon/error.hpp"
#include "platoon/experiments.hpp"
#include "platoon/pairwise_planner.hpp"
#include "platoon/rng.hpp"
#include "platoon/road_network.hpp"
#include "platoon/trucking.hpp"
