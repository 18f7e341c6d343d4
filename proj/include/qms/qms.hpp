// Copyright 2026 The qms Authors
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

#include "qms/algebra.hpp"
#include "qms/casebook.hpp"
#include "qms/constants.hpp"
#include "qms/core.hpp"
#include "qms/cporder.hpp"
#include "qms/entfish.hpp"
#include "qms/generator.hpp"
#include "qms/io.hpp"
#include "qms/matops.hpp"
#include "qms/random.hpp"
#include "qms/rng.hpp"
#include "qms/subordinate.hpp"
