# Copyright 2026 The SheepDog Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Encoder worker for the pretrained-transformer backend.

Reads one JSON request per line on stdin and answers with one JSON line on
stdout. The representation is the final hidden state of the first token.

The model name "random-tiny" builds a small randomly initialised RoBERTa with a
byte-level tokenizer so the bridge can be exercised without downloading
weights.
"""

import json
import os
import sys

import torch


class ByteTokenizer:
    def __init__(self, max_length):
        self.max_length = max_length

    def __call__(self, texts):
        rows = []
        for t in texts:
            ids = [0] + [b + 3 for b in t.encode("utf-8")][: self.max_length - 2] + [2]
            rows.append(ids)
        width = max(len(r) for r in rows)
        input_ids = torch.full((len(rows), width), 1, dtype=torch.long)
        mask = torch.zeros((len(rows), width), dtype=torch.long)
        for i, r in enumerate(rows):
            input_ids[i, : len(r)] = torch.tensor(r)
            mask[i, : len(r)] = 1
        return {"input_ids": input_ids, "attention_mask": mask}


class Worker:
    def __init__(self):
        self.model = None
        self.tokenize = None
        self.optimizer = None
        self.pending = None

    def init(self, req):
        import transformers

        torch.manual_seed(int(req.get("seed", 0)) % (2**63))
        max_length = int(req.get("max_length", 512))
        name = req["model"]
        if name == "random-tiny":
            config = transformers.RobertaConfig(
                vocab_size=259 + 3,
                hidden_size=32,
                num_hidden_layers=1,
                num_attention_heads=2,
                intermediate_size=64,
                max_position_embeddings=max_length + 4,
            )
            self.model = transformers.RobertaModel(config)
            self.tokenize = ByteTokenizer(max_length)
        else:
            tok = transformers.AutoTokenizer.from_pretrained(name)
            self.model = transformers.AutoModel.from_pretrained(name)
            self.tokenize = lambda texts: tok(
                texts, truncation=True, max_length=max_length, padding=True, return_tensors="pt"
            )
        self.optimizer = torch.optim.Adam(self.model.parameters(), lr=2e-5)
        return {"dim": int(self.model.config.hidden_size)}

    def encode(self, req):
        batch = self.tokenize(req["texts"])
        train = bool(req.get("train", False))
        self.model.train(train)
        if train:
            h = self.model(**batch).last_hidden_state[:, 0, :]
            self.pending = h
            values = h.detach()
        else:
            with torch.no_grad():
                values = self.model(**batch).last_hidden_state[:, 0, :]
        return {"h": values.double().tolist()}

    def backward(self, req):
        if self.pending is None:
            raise RuntimeError("backward without a training encode")
        grad = torch.tensor(req["grad"], dtype=self.pending.dtype)
        self.pending.backward(grad)
        self.pending = None
        return {"ok": True}

    def step(self, req):
        for group in self.optimizer.param_groups:
            group["lr"] = float(req["lr"])
        self.optimizer.step()
        self.optimizer.zero_grad()
        return {"ok": True}

    def save(self, req):
        os.makedirs(req["dir"], exist_ok=True)
        torch.save(self.model.state_dict(), os.path.join(req["dir"], "encoder.pt"))
        return {"ok": True}

    def load(self, req):
        state = torch.load(os.path.join(req["dir"], "encoder.pt"))
        self.model.load_state_dict(state)
        return {"ok": True}


def main():
    worker = Worker()
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            reply = getattr(worker, req["op"])(req)
        except Exception as e:  # reported to the caller, which owns the policy
            reply = {"error": f"{type(e).__name__}: {e}"}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
