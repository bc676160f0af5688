// Copyright 2026 The Authors.
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

#include "hres/aggregate_choice.hpp"
#include "hres/cop.hpp"
#include "hres/generate.hpp"
#include "hres/hierarchical_choice.hpp"
#include "hres/hierarchy.hpp"
#include "hres/instance.hpp"
#include "hres/io.hpp"
#include "hres/oracles.hpp"
#include "hres/random.hpp"
#include "hres/score.hpp"
#include "hres/types.hpp"
