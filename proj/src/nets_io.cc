// Copyright 2026 The distinf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "distinf/nets_io.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "distinf/dataset_io.h"
#include "distinf/status.h"

namespace distinf {
namespace {

using nlohmann::json;

absl::Status Malformed(absl::string_view what) {
  return MakeError(ErrorKind::kMalformedDocument, what);
}

absl::string_view KindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kInput:
      return "input";
    case LayerKind::kDense:
      return "dense";
    case LayerKind::kConv2D:
      return "conv2d";
    case LayerKind::kRelu:
      return "relu";
    case LayerKind::kFlatten:
      return "flatten";
    case LayerKind::kSigmoidOutput:
      return "sigmoid";
  }
  return "?";
}

absl::StatusOr<int> PositiveField(const json& layer, const char* key) {
  auto it = layer.find(key);
  if (it == layer.end() || !it->is_number_integer()) {
    return Malformed(absl::StrCat("layer is missing integer field '", key, "'"));
  }
  const int64_t v = it->get<int64_t>();
  if (v < 1 || v > (1 << 20)) {
    return Malformed(absl::StrCat("field '", key, "' out of range"));
  }
  return static_cast<int>(v);
}

absl::StatusOr<std::vector<double>> NumberArray(const json& node,
                                                const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_array()) {
    return Malformed(absl::StrCat("missing array '", key, "'"));
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const json& v : *it) {
    if (!v.is_number()) return Malformed("non-numeric parameter");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json ArchitectureToJson(const Architecture& arch) {
  json out = json::array();
  for (const LayerSpec& layer : arch) {
    json node = {{"kind", std::string(KindName(layer.kind))}};
    switch (layer.kind) {
      case LayerKind::kInput:
        node["height"] = layer.k1;
        node["width"] = layer.k2;
        node["channels"] = layer.c_in;
        break;
      case LayerKind::kDense:
        node["in"] = layer.in;
        node["out"] = layer.out;
        break;
      case LayerKind::kConv2D:
        node["k1"] = layer.k1;
        node["k2"] = layer.k2;
        node["c_in"] = layer.c_in;
        node["c_out"] = layer.c_out;
        break;
      default:
        break;
    }
    out.push_back(std::move(node));
  }
  return out;
}

absl::StatusOr<Architecture> ArchitectureFromJson(const json& doc) {
  if (!doc.is_array()) return Malformed("arch must be an array");
  Architecture arch;
  for (const json& node : doc) {
    if (!node.is_object() || !node.contains("kind") ||
        !node["kind"].is_string()) {
      return Malformed("arch entry needs a string 'kind'");
    }
    const std::string kind = node["kind"].get<std::string>();
    if (kind == "input") {
      DISTINF_ASSIGN_OR_RETURN(const int h, PositiveField(node, "height"));
      DISTINF_ASSIGN_OR_RETURN(const int w, PositiveField(node, "width"));
      DISTINF_ASSIGN_OR_RETURN(const int c, PositiveField(node, "channels"));
      arch.push_back(LayerSpec::Input(h, w, c));
    } else if (kind == "dense") {
      DISTINF_ASSIGN_OR_RETURN(const int in, PositiveField(node, "in"));
      DISTINF_ASSIGN_OR_RETURN(const int out, PositiveField(node, "out"));
      arch.push_back(LayerSpec::Dense(in, out));
    } else if (kind == "conv2d") {
      DISTINF_ASSIGN_OR_RETURN(const int k1, PositiveField(node, "k1"));
      DISTINF_ASSIGN_OR_RETURN(const int k2, PositiveField(node, "k2"));
      DISTINF_ASSIGN_OR_RETURN(const int ci, PositiveField(node, "c_in"));
      DISTINF_ASSIGN_OR_RETURN(const int co, PositiveField(node, "c_out"));
      arch.push_back(LayerSpec::Conv2D(k1, k2, ci, co));
    } else if (kind == "relu") {
      arch.push_back(LayerSpec::Relu());
    } else if (kind == "flatten") {
      arch.push_back(LayerSpec::Flatten());
    } else if (kind == "sigmoid") {
      arch.push_back(LayerSpec::SigmoidOutput());
    } else {
      return Malformed(absl::StrCat("unknown layer kind '", kind, "'"));
    }
  }
  return arch;
}

std::string SerializeNet(const NetParams& net) {
  json doc;
  doc["format"] = std::string(kNetFormat);
  doc["arch"] = ArchitectureToJson(net.arch);
  json layers = json::array();
  for (const ParamBlock& block : net.layers) {
    layers.push_back({{"w", block.weights}, {"b", block.bias}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump() + "\n";
}

absl::StatusOr<NetParams> DeserializeNet(absl::string_view text) {
  const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Malformed("model document is not valid JSON");
  }
  if (!doc.contains("format") || doc["format"] != std::string(kNetFormat)) {
    return Malformed(absl::StrCat("format must be ", kNetFormat));
  }
  if (!doc.contains("arch") || !doc.contains("layers") ||
      !doc["layers"].is_array()) {
    return Malformed("model document needs 'arch' and 'layers'");
  }
  NetParams net;
  DISTINF_ASSIGN_OR_RETURN(net.arch, ArchitectureFromJson(doc["arch"]));
  for (const json& node : doc["layers"]) {
    if (!node.is_object()) return Malformed("layer entry must be an object");
    ParamBlock block;
    DISTINF_ASSIGN_OR_RETURN(block.weights, NumberArray(node, "w"));
    DISTINF_ASSIGN_OR_RETURN(block.bias, NumberArray(node, "b"));
    net.layers.push_back(std::move(block));
  }
  DISTINF_RETURN_IF_ERROR(ValidateNet(net));
  return net;
}

absl::Status WriteNetFile(const std::string& path, const NetParams& net) {
  return WriteFile(path, SerializeNet(net));
}

absl::StatusOr<NetParams> ReadNetFile(const std::string& path) {
  DISTINF_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  return DeserializeNet(text);
}

}  // namespace distinf
