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

#include "distinf/dataset_io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "distinf/status.h"

namespace distinf {
namespace {

constexpr absl::string_view kMagic = "DINFDS01";

class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Raw(absl::string_view s) { out_.append(s.data(), s.size()); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(absl::string_view in) : in_(in) {}

  bool U8(uint8_t& v) {
    if (pos_ + 1 > in_.size()) return false;
    v = static_cast<uint8_t>(in_[pos_++]);
    return true;
  }
  bool U32(uint32_t& v) {
    uint64_t wide;
    if (!Unsigned(4, wide)) return false;
    v = static_cast<uint32_t>(wide);
    return true;
  }
  bool U64(uint64_t& v) { return Unsigned(8, v); }
  bool F64(double& v) {
    uint64_t bits;
    if (!U64(bits)) return false;
    v = std::bit_cast<double>(bits);
    return true;
  }
  bool Raw(size_t n, absl::string_view& s) {
    if (pos_ + n > in_.size()) return false;
    s = in_.substr(pos_, n);
    pos_ += n;
    return true;
  }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  bool Unsigned(int bytes, uint64_t& v) {
    if (pos_ + bytes > in_.size()) return false;
    v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(in_[pos_ + i]))
           << (8 * i);
    }
    pos_ += bytes;
    return true;
  }

  absl::string_view in_;
  size_t pos_ = 0;
};

absl::Status Malformed(absl::string_view what) {
  return MakeError(ErrorKind::kMalformedDocument, what);
}

}  // namespace

std::string DatasetToCsv(const Dataset& dataset) {
  std::string out;
  const int dims = dataset.feature_dims();
  for (int j = 0; j < dims; ++j) absl::StrAppend(&out, "f", j, ",");
  out += "label,property\n";
  for (const Record& r : dataset.records) {
    for (const double x : r.features) absl::StrAppendFormat(&out, "%.17g,", x);
    absl::StrAppend(&out, r.label, ",", r.property, "\n");
  }
  return out;
}

absl::StatusOr<Dataset> DatasetFromCsv(absl::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.empty()) return Malformed("empty CSV");
  const std::vector<absl::string_view> header = absl::StrSplit(lines[0], ',');
  if (header.size() < 3 || header[header.size() - 2] != "label" ||
      header.back() != "property") {
    return Malformed("CSV header must end with label,property");
  }
  const size_t dims = header.size() - 2;
  Dataset dataset;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::vector<absl::string_view> cells = absl::StrSplit(lines[i], ',');
    if (cells.size() != header.size()) {
      return Malformed(absl::StrFormat("line %d has %d cells, expected %d",
                                       i + 1, cells.size(), header.size()));
    }
    Record r;
    r.features.resize(dims);
    for (size_t j = 0; j < dims; ++j) {
      if (!absl::SimpleAtod(cells[j], &r.features[j])) {
        return Malformed(absl::StrFormat("bad number on line %d", i + 1));
      }
    }
    if (!absl::SimpleAtoi(cells[dims], &r.label) ||
        !absl::SimpleAtoi(cells[dims + 1], &r.property) ||
        (r.label != 0 && r.label != 1) ||
        (r.property != 0 && r.property != 1)) {
      return Malformed(absl::StrFormat("bad bit on line %d", i + 1));
    }
    dataset.records.push_back(std::move(r));
  }
  if (dataset.records.empty()) return Malformed("CSV has no records");
  return dataset;
}

std::string DatasetToBinary(const Dataset& dataset) {
  ByteWriter w;
  w.Raw(kMagic);
  const UnderlyingSpec& u = dataset.spec.underlying;
  w.U8(dataset.pool == Pool::kVictim ? 0 : 1);
  w.F64(dataset.spec.alpha);
  w.U32(static_cast<uint32_t>(u.noise_dims));
  w.U32(static_cast<uint32_t>(u.signal_dims));
  w.F64(u.signal_strength);
  w.F64(u.label_property_coupling);
  w.U64(u.rule_seed);
  w.U64(dataset.seed);
  w.U64(dataset.records.size());
  w.U32(static_cast<uint32_t>(dataset.feature_dims()));
  for (const Record& r : dataset.records) {
    for (const double x : r.features) w.F64(x);
    w.U8(static_cast<uint8_t>(r.label));
    w.U8(static_cast<uint8_t>(r.property));
  }
  return w.Take();
}

absl::StatusOr<Dataset> DatasetFromBinary(absl::string_view bytes) {
  ByteReader r(bytes);
  absl::string_view magic;
  if (!r.Raw(kMagic.size(), magic) || magic != kMagic) {
    return Malformed("missing DINFDS01 magic");
  }
  Dataset d;
  UnderlyingSpec& u = d.spec.underlying;
  uint8_t pool;
  uint32_t noise_dims, signal_dims, dims;
  uint64_t count;
  if (!r.U8(pool) || !r.F64(d.spec.alpha) || !r.U32(noise_dims) ||
      !r.U32(signal_dims) || !r.F64(u.signal_strength) ||
      !r.F64(u.label_property_coupling) || !r.U64(u.rule_seed) ||
      !r.U64(d.seed) || !r.U64(count) || !r.U32(dims)) {
    return Malformed("truncated header");
  }
  if (pool > 1) return Malformed("bad pool tag");
  d.pool = pool == 0 ? Pool::kVictim : Pool::kAdversary;
  u.noise_dims = static_cast<int>(noise_dims);
  u.signal_dims = static_cast<int>(signal_dims);
  const uint64_t record_bytes = 8ULL * dims + 2;
  if (count == 0 || dims == 0 || r.remaining() != count * record_bytes) {
    return Malformed("record block size does not match header");
  }
  d.records.resize(count);
  for (Record& rec : d.records) {
    rec.features.resize(dims);
    for (double& x : rec.features) r.F64(x);
    uint8_t label = 0, property = 0;
    r.U8(label);
    r.U8(property);
    if (label > 1 || property > 1) return Malformed("bad bit");
    rec.label = label;
    rec.property = property;
  }
  return d;
}

absl::StatusOr<Dataset> ReadDatasetFile(const std::string& path) {
  DISTINF_ASSIGN_OR_RETURN(std::string contents, ReadFile(path));
  if (absl::StartsWith(contents, kMagic)) return DatasetFromBinary(contents);
  return DatasetFromCsv(contents);
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot open ", path));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace distinf
