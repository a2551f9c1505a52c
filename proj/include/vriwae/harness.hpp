// Copyright 2026 The vriwae Authors
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


#ifndef VRIWAE_HARNESS_HPP
#define VRIWAE_HARNESS_HPP

#include <vriwae/harness/cli.hpp>
#include <vriwae/harness/config.hpp>
#include <vriwae/harness/oracles.hpp>
#include <vriwae/harness/presets.hpp>
#include <vriwae/harness/sweep.hpp>

#endif  // VRIWAE_HARNESS_HPP
