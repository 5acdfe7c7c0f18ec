// SPDX-License-Identifier: Apache-2.0
//
// satsched - user scheduling and power allocation for precoded multi-beam
// satellite downlinks
// Copyright (C) 2026 the satsched contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SATSCHED_SATSCHED_HPP
#define SATSCHED_SATSCHED_HPP

#include "satsched/bench.hpp"
#include "satsched/beam_pattern.hpp"
#include "satsched/channel.hpp"
#include "satsched/config.hpp"
#include "satsched/gp.hpp"
#include "satsched/poweralloc.hpp"
#include "satsched/precoding.hpp"
#include "satsched/qos.hpp"
#include "satsched/rng.hpp"
#include "satsched/scheduler.hpp"

#endif
