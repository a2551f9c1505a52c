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

#ifndef VRIWAE_STATCORE_HPP
#define VRIWAE_STATCORE_HPP

#include <vriwae/statcore/format.hpp>
#include <vriwae/statcore/log_weights.hpp>
#include <vriwae/statcore/moments.hpp>
#include <vriwae/statcore/neg_moment.hpp>
#include <vriwae/statcore/normal.hpp>
#include <vriwae/statcore/parallel.hpp>
#include <vriwae/statcore/rng.hpp>

#endif  // VRIWAE_STATCORE_HPP
