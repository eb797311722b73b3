// Copyright 2026 The Carnot Lab Authors
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

#include "carnot/errors.hpp"
#include "carnot/expr.hpp"
#include "carnot/vector_field.hpp"
#include "carnot/random.hpp"
#include "carnot/parallel.hpp"
#include "carnot/flows.hpp"
#include "carnot/ballbox.hpp"
#include "carnot/metric.hpp"
#include "carnot/seminorms.hpp"
#include "carnot/report.hpp"
#include "carnot/verify.hpp"
#include "carnot/scenario.hpp"
