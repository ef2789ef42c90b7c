// Copyright 2026 The Engage Authors. All Rights Reserved.
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

#ifndef ENGAGE_ENGAGE_HPP_
#define ENGAGE_ENGAGE_HPP_

#include "engage/common.hpp"
#include "engage/ecdf.hpp"
#include "engage/evaluate.hpp"
#include "engage/events.hpp"
#include "engage/features.hpp"
#include "engage/forest.hpp"
#include "engage/model_io.hpp"
#include "engage/panel.hpp"
#include "engage/parallel.hpp"
#include "engage/rcmm.hpp"
#include "engage/report.hpp"
#include "engage/score.hpp"
#include "engage/survival.hpp"
#include "engage/synth.hpp"

#endif  // ENGAGE_ENGAGE_HPP_
