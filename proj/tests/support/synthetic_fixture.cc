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

#include "synthetic_fixture.h"

#include "sheepdog/llm_gateway.h"

namespace sheepdog::testing {

SyntheticArtifacts BuildSyntheticArtifacts(const SyntheticSpec& spec, const std::filesystem::path& cache_dir) {
  SyntheticArtifacts out;
  out.dataset = MakeSyntheticDataset(spec);
  out.train = out.dataset.corpus.select(out.dataset.split.train_ids);
  out.test = out.dataset.corpus.select(out.dataset.split.test_ids);
  GatewayOptions options;
  options.mode = LlmMode::kMock;
  options.cache_dir = cache_dir;
  LlmGateway gateway(options, std::make_shared<SyntheticLlm>(MakeSyntheticVocabulary(spec)));
  Reframer reframer(gateway, "synthetic");
  out.reframings = reframer.Pregenerate(out.train, MakeToneSet(ToneSetName::kFull));
  Attributor attributor(gateway, "synthetic");
  out.labels = attributor.LabelTrainingSet(out.train, &out.reframings, MakeToneSet(ToneSetName::kFull));
  return out;
}

}  // namespace sheepdog::testing
