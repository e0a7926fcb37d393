// Copyright 2026 The SheepDog Authors. All Rights Reserved.
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

#ifndef SHEEPDOG_TESTS_SUPPORT_SYNTHETIC_FIXTURE_H_
#define SHEEPDOG_TESTS_SUPPORT_SYNTHETIC_FIXTURE_H_

#include <filesystem>
#include <vector>

#include "sheepdog/attributor.h"
#include "sheepdog/corpus.h"
#include "sheepdog/reframer.h"
#include "sheepdog/synthetic.h"

namespace sheepdog::testing {

// Synthetic style-shift corpus with its reframings and pseudo-labels
// produced by the scripted mock LLM through the real reframer and
// attributor.
struct SyntheticArtifacts {
  SyntheticDataset dataset;
  std::vector<NewsArticle> train;
  std::vector<NewsArticle> test;
  ReframingStore reframings;
  PseudoLabelStore labels;
};

SyntheticArtifacts BuildSyntheticArtifacts(const SyntheticSpec& spec, const std::filesystem::path& cache_dir);

}  // namespace sheepdog::testing

#endif  // SHEEPDOG_TESTS_SUPPORT_SYNTHETIC_FIXTURE_H_
