// Copyright 2026 The polysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "polysim/errors.hpp"
#include "polysim/dense.hpp"
#include "polysim/pauli.hpp"
#include "polysim/rng.hpp"
#include "polysim/coeffs.hpp"
#include "polysim/tableau.hpp"
#include "polysim/instrument.hpp"
#include "polysim/cnc.hpp"
#include "polysim/lp.hpp"
#include "polysim/dd.hpp"
#include "polysim/geometry.hpp"
#include "polysim/adaptive.hpp"
#include "polysim/engine.hpp"
#include "polysim/io.hpp"
#include "polysim/cli.hpp"
