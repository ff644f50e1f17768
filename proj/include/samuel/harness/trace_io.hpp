// Copyright 2026 The samuel-oco Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// File formats: trace.csv, JSON with full-precision numbers, atomic writes.
//
// trace.csv has one row per logged round. The first five columns are
//   tau,loss,W,alive_slots,pred_norm
// followed by six columns per cover level i (empty when no interval of that
// level is alive, and for single-learner traces)
//   l<i>_start,l<i>_end,l<i>_expert_loss,l<i>_r,l<i>_w,l<i>_pw
// where w and pw are the slot's weight and pseudo-weight sums over the eta
// grid, then x_0..x_{d-1} unless the prediction is elided.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "samuel/trace.hpp"

namespace samuel::harness {

/// Like nlohmann::json::dump, but doubles carry 17 significant digits and
/// non-finite values become null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Throws TraceError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

struct CsvLayout {
  int levels = 1;
  int d = 1;
  bool elide_x = false;
  std::int64_t downsample = 1;  // keep rounds 1, 1 + k, 1 + 2k, ... and the last
};

std::string trace_csv_header(const CsvLayout& layout);
std::string trace_csv(const RunTrace& trace, const CsvLayout& layout);

/// Rounds logged in a trace.csv. Slot weights come back as sums only.
/// Throws TraceError on a malformed file or a header that does not match the
/// layout.
std::vector<RoundRecord> parse_trace_csv(const std::string& text, const CsvLayout& layout);

}  // namespace samuel::harness
