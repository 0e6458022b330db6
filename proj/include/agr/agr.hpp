/*
 * Copyright 2026 The agr-cbr Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "agr/adaptation.hpp"
#include "agr/case_base.hpp"
#include "agr/csv.hpp"
#include "agr/error.hpp"
#include "agr/evaluation.hpp"
#include "agr/inference.hpp"
#include "agr/metrics.hpp"
#include "agr/model.hpp"
#include "agr/mrf.hpp"
#include "agr/random.hpp"
#include "agr/retrieval.hpp"
#include "agr/synthetic.hpp"
