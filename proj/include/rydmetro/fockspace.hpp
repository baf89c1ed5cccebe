// Copyright 2026 The rydmetro Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file fockspace.hpp
 * Exact linear-algebra engine for two bosonic modes on a truncated Fock
 * space. Dense matrices throughout; dimensions stay around 100.
 */
#pragma once

#include "rydmetro/fockspace/basis.hpp"
#include "rydmetro/fockspace/channels.hpp"
#include "rydmetro/fockspace/information.hpp"
#include "rydmetro/fockspace/measurement.hpp"
#include "rydmetro/fockspace/operators.hpp"
#include "rydmetro/fockspace/states.hpp"
