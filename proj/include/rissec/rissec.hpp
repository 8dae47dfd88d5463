// SPDX-License-Identifier: Apache-2.0
//
// rissec — secrecy-rate analysis and optimization for artificial-noise-aided,
// RIS-assisted multiuser massive MIMO downlinks under correlated Rayleigh fading.
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

#ifndef RISSEC_RISSEC_HPP
#define RISSEC_RISSEC_HPP

#include "rissec/analysis.hpp"
#include "rissec/channel.hpp"
#include "rissec/common.hpp"
#include "rissec/correlation.hpp"
#include "rissec/geometry.hpp"
#include "rissec/montecarlo.hpp"
#include "rissec/optimize.hpp"
#include "rissec/records.hpp"
#include "rissec/rng.hpp"
#include "rissec/scenario.hpp"

#endif  // RISSEC_RISSEC_HPP
