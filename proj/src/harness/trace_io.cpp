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

#include "samuel/harness/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "samuel/error.hpp"
#include "samuel/harness/config.hpp"

namespace samuel::harness {

namespace {

void dump_into(const nlohmann::json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (v.type()) {
    case nlohmann::json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        dump_into(item, indent, depth + 1, out);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    default:
      out += v.dump();
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, std::int64_t row) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw TraceError("trace.csv row " + std::to_string(row) + ": bad number '" + s + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& s, std::int64_t row) {
  std::int64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw TraceError("trace.csv row " + std::to_string(row) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
  std::string out;
  dump_into(value, indent, 0, out);
  out.push_back('\n');
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trace_csv_header(const CsvLayout& layout) {
  std::string h = "tau,loss,W,alive_slots,pred_norm";
  for (int i = 0; i < layout.levels; ++i) {
    const std::string p = ",l" + std::to_string(i) + "_";
    h += p + "start" + p + "end" + p + "expert_loss" + p + "r" + p + "w" + p + "pw";
  }
  if (!layout.elide_x) {
    for (int k = 0; k < layout.d; ++k) h += ",x_" + std::to_string(k);
  }
  return h;
}

std::string trace_csv(const RunTrace& trace, const CsvLayout& layout) {
  std::string out = trace_csv_header(layout);
  out.push_back('\n');
  const auto n = static_cast<std::int64_t>(trace.rounds.size());
  const std::int64_t k = std::max<std::int64_t>(1, layout.downsample);
  std::vector<const SlotRecord*> by_level(static_cast<std::size_t>(layout.levels));
  for (const auto& rec : trace.rounds) {
    if ((rec.tau - 1) % k != 0 && rec.tau != n) continue;
    out += std::to_string(rec.tau);
    out += "," + format_double(rec.loss);
    out += "," + format_double(rec.W);
    out += "," + std::to_string(rec.alive_slots);
    out += "," + format_double(rec.x.norm());

    std::fill(by_level.begin(), by_level.end(), nullptr);
    if (!trace.eta.empty() && trace.algorithm == "samuel") {
      for (const auto& s : rec.slots) {
        if (s.key.level >= 0 && s.key.level < layout.levels) {
          by_level[static_cast<std::size_t>(s.key.level)] = &s;
        }
      }
    }
    for (const SlotRecord* s : by_level) {
      if (s == nullptr) {
        out += ",,,,,,";
        continue;
      }
      out += "," + std::to_string(s->interval.s);
      out += "," + std::to_string(s->interval.t);
      out += "," + format_double(s->expert_loss);
      out += "," + format_double(s->r);
      out += "," + format_double(s->weight_sum);
      out += "," + format_double(s->pseudo_weight_sum);
    }
    if (!layout.elide_x) {
      for (Eigen::Index i = 0; i < rec.x.size(); ++i) out += "," + format_double(rec.x[i]);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<RoundRecord> parse_trace_csv(const std::string& text, const CsvLayout& layout) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TraceError("trace.csv is empty");
  if (line != trace_csv_header(layout)) {
    throw TraceError("trace.csv header does not match the configured run layout");
  }
  const std::size_t expected =
      5 + 6 * static_cast<std::size_t>(layout.levels) +
      (layout.elide_x ? 0 : static_cast<std::size_t>(layout.d));
  std::vector<RoundRecord> rounds;
  std::int64_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected) {
      throw TraceError("trace.csv row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " columns, expected " +
                       std::to_string(expected));
    }
    RoundRecord rec;
    rec.tau = to_int(cells[0], row);
    rec.loss = to_double(cells[1], row);
    rec.W = to_double(cells[2], row);
    rec.alive_slots = to_int(cells[3], row);
    for (int i = 0; i < layout.levels; ++i) {
      const std::size_t c = 5 + 6 * static_cast<std::size_t>(i);
      if (cells[c].empty()) continue;
      SlotRecord s;
      s.interval = {to_int(cells[c], row), to_int(cells[c + 1], row)};
      s.key = {i, (s.interval.s - 1) >> i};
      s.expert_loss = to_double(cells[c + 2], row);
      s.r = to_double(cells[c + 3], row);
      s.weight_sum = to_double(cells[c + 4], row);
      s.pseudo_weight_sum = to_double(cells[c + 5], row);
      rec.slots.push_back(std::move(s));
    }
    if (!layout.elide_x) {
      rec.x.resize(layout.d);
      for (int k = 0; k < layout.d; ++k) {
        rec.x[k] = to_double(cells[5 + 6 * static_cast<std::size_t>(layout.levels) +
                                   static_cast<std::size_t>(k)],
                             row);
      }
    }
    rounds.push_back(std::move(rec));
  }
  return rounds;
}

}  // namespace samuel::harness
