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

#include "samuel/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

namespace samuel::harness {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<Scalar>>;

struct Entry {
  Value value;
  int line = 0;
  bool used = false;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

class Document {
 public:
  Document(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        const std::string name = trim(line.substr(1, line.size() - 2));
        if (!is_known_section(name)) fail(line_no, "unknown section [" + name + "]");
        if (sections_.count(name)) fail(line_no, "duplicate section [" + name + "]");
        current = &sections_[name];
        current->line = line_no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      if (current == nullptr) fail(line_no, "key outside of any section");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) fail(line_no, "empty key");
      if (current->entries.count(key)) fail(line_no, "duplicate key '" + key + "'");
      current->entries[key] = Entry{parse_value(trim(line.substr(eq + 1)), line_no), line_no};
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

  Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.entries.find(key);
    if (e == s->second.entries.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  [[noreturn]] void missing(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    const int line = s == sections_.end() ? 1 : s->second.line;
    fail(line, "missing required key '" + key + "' in [" + section + "]");
  }

  void reject_unused() const {
    for (const auto& [name, section] : sections_) {
      for (const auto& [key, entry] : section.entries) {
        if (!entry.used) fail(entry.line, "unknown key '" + key + "' in [" + name + "]");
      }
    }
  }

  // typed accessors

  template <typename T>
  std::optional<T> get(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (e == nullptr) return std::nullopt;
    return convert<T>(e->value, *e, section + "." + key);
  }

  template <typename T>
  T require(const std::string& section, const std::string& key) {
    auto v = get<T>(section, key);
    if (!v) missing(section, key);
    return *v;
  }

  template <typename T>
  std::optional<std::vector<T>> get_list(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (e == nullptr) return std::nullopt;
    const auto* arr = std::get_if<std::vector<Scalar>>(&e->value);
    std::vector<T> out;
    if (arr == nullptr) {
      // A bare scalar reads as a one-element list.
      out.push_back(convert<T>(e->value, *e, section + "." + key));
      return out;
    }
    for (const auto& item : *arr) {
      out.push_back(convert<T>(std::visit([](const auto& v) -> Value { return v; }, item), *e,
                               section + "." + key));
    }
    return out;
  }

 private:
  template <typename T>
  T convert(const Value& v, const Entry& e, const std::string& name) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (const auto* b = std::get_if<bool>(&v)) return *b;
      fail(e.line, name + " must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (const auto* s = std::get_if<std::string>(&v)) return *s;
      fail(e.line, name + " must be a string");
    } else if constexpr (std::is_same_v<T, double>) {
      if (const auto* d = std::get_if<double>(&v)) return *d;
      if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
      fail(e.line, name + " must be a number");
    } else {
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        if (*i < 0 && std::is_unsigned_v<T>) fail(e.line, name + " must be non-negative");
        return static_cast<T>(*i);
      }
      fail(e.line, name + " must be an integer");
    }
  }

  static bool is_known_section(const std::string& name) {
    return name == "scenario" || name == "algorithm" || name == "run" || name == "checks" ||
           name == "output";
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && quoted) {
        ++i;
      } else if (s[i] == '"') {
        quoted = !quoted;
      } else if (s[i] == '#' && !quoted) {
        return s.substr(0, i);
      }
    }
    return s;
  }

  Scalar parse_scalar(const std::string& text, int line) const {
    if (text.empty()) fail(line, "missing value");
    if (text.front() == '"') {
      if (text.size() < 2 || text.back() != '"') fail(line, "unterminated string");
      std::string out;
      for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        if (text[i] == '\\' && i + 2 < text.size()) {
          out.push_back(text[++i]);
        } else if (text[i] == '"') {
          fail(line, "stray quote in string");
        } else {
          out.push_back(text[i]);
        }
      }
      return out;
    }
    if (text == "true") return true;
    if (text == "false") return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    std::int64_t i = 0;
    auto ir = std::from_chars(first, last, i);
    if (ir.ec == std::errc() && ir.ptr == last) return i;
    double d = 0.0;
    auto dr = std::from_chars(first, last, d);
    if (dr.ec == std::errc() && dr.ptr == last) return d;
    fail(line, "cannot parse value '" + text + "'");
  }

  Value parse_value(const std::string& text, int line) const {
    if (!text.empty() && text.front() == '[') {
      if (text.back() != ']') fail(line, "unterminated array");
      std::vector<Scalar> items;
      const std::string body = trim(text.substr(1, text.size() - 2));
      if (body.empty()) return items;
      std::string token;
      bool quoted = false;
      for (std::size_t i = 0; i <= body.size(); ++i) {
        const char c = i < body.size() ? body[i] : ',';
        if (c == '"' && (i == 0 || body[i - 1] != '\\')) quoted = !quoted;
        if (c == ',' && !quoted) {
          items.push_back(parse_scalar(trim(token), line));
          token.clear();
        } else if (c == '[' && !quoted) {
          fail(line, "nested arrays are not supported");
        } else {
          token.push_back(c);
        }
      }
      return items;
    }
    return std::visit([](const auto& v) -> Value { return v; }, parse_scalar(text, line));
  }

  std::string source_;
  std::map<std::string, Section> sections_;
};

CombineMode parse_combine(const std::string& s, Document& doc) {
  if (s == "average") return CombineMode::Average;
  if (s == "sample") return CombineMode::Sample;
  doc.fail(doc.find("algorithm", "combine")->line, "combine must be \"average\" or \"sample\"");
}

ProjectionKind parse_projection(const std::string& s, Document& doc) {
  if (s == "mahalanobis") return ProjectionKind::Mahalanobis;
  if (s == "euclidean") return ProjectionKind::Euclidean;
  doc.fail(doc.find("algorithm", "projection")->line,
           "projection must be \"mahalanobis\" or \"euclidean\"");
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

template <typename T, typename F>
std::string list(const std::vector<T>& items, F&& fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out + "]";
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string serialize_scenario(const scenarios::Scenario& sc) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "kind = " << quote(std::string(scenarios::to_string(sc.kind))) << "\n";
  out << "T = " << sc.T << "\n";
  out << "d = " << sc.d << "\n";
  out << "radius = " << format_double(sc.radius) << "\n";
  out << "change_points = "
      << list(sc.change_points, [](std::int64_t c) { return std::to_string(c); }) << "\n";
  out << "num_changes = " << sc.num_changes << "\n";
  out << "grad_scale = " << format_double(sc.grad_scale) << "\n";
  out << "center_radius = " << format_double(sc.center_radius) << "\n";
  out << "quad_scale = " << format_double(sc.quad_scale) << "\n";
  out << "bias = " << format_double(sc.bias) << "\n";
  out << "positive_rate = " << format_double(sc.positive_rate) << "\n";
  out << "rotations = " << format_double(sc.rotations) << "\n";
  if (sc.G_cap) out << "G_cap = " << format_double(*sc.G_cap) << "\n";
  return out.str();
}

std::string serialize_without_output(const RunConfig& c) {
  std::ostringstream out;
  out << serialize_scenario(c.scenario) << "\n";
  const auto& a = c.algorithm;
  out << "[algorithm]\n";
  out << "names = " << list(a.names, quote) << "\n";
  out << "expert = " << quote(std::string(to_string(a.expert))) << "\n";
  out << "combine = " << quote(a.combine == CombineMode::Average ? "average" : "sample") << "\n";
  if (a.Q) out << "Q = " << *a.Q << "\n";
  if (a.eta_exp) out << "eta_exp = " << format_double(*a.eta_exp) << "\n";
  out << "eps = " << format_double(a.eps) << "\n";
  out << "projection = "
      << quote(a.projection == ProjectionKind::Mahalanobis ? "mahalanobis" : "euclidean") << "\n";
  out << "clip_r = " << (a.clip_r ? "true" : "false") << "\n";
  out << "warm_start = " << (a.warm_start ? "true" : "false") << "\n";
  out << "step_scales = " << list(a.step_scales, format_double) << "\n";
  out << "alphas = " << list(a.alphas, format_double) << "\n";
  out << "K = " << a.K << "\n\n";
  out << "[run]\n";
  out << "seeds = " << list(c.seeds, [](std::uint64_t s) { return std::to_string(s); })
      << "\n\n";
  const auto& k = c.checks;
  out << "[checks]\n";
  out << "enabled = " << (k.enabled ? "true" : "false") << "\n";
  out << "envelope_slack = " << format_double(k.options.envelope_slack) << "\n";
  out << "regret_slack = " << format_double(k.options.regret_slack) << "\n";
  out << "nonpositive_tol = " << format_double(k.options.nonpositive_tol) << "\n";
  out << "nonpositive = " << (k.options.check_nonpositive ? "true" : "false") << "\n";
  out << "envelope = " << (k.options.check_envelope ? "true" : "false") << "\n";
  out << "count = " << (k.options.check_count ? "true" : "false") << "\n";
  out << "regret = " << (k.options.check_regret ? "true" : "false") << "\n";
  out << "stitching = " << (k.options.check_stitching ? "true" : "false") << "\n";
  out << "report_intervals = " << quote(k.report_intervals) << "\n";
  return out.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  Document doc(text, source);
  RunConfig c;
  if (!doc.has_section("scenario")) doc.fail(1, "missing required section [scenario]");

  auto& sc = c.scenario;
  const auto kind = doc.require<std::string>("scenario", "kind");
  try {
    sc.kind = scenarios::parse_scenario_kind(kind);
  } catch (const BadScenario& e) {
    doc.fail(doc.find("scenario", "kind")->line, e.what());
  }
  sc.T = doc.require<std::int64_t>("scenario", "T");
  sc.d = static_cast<int>(doc.get<std::int64_t>("scenario", "d").value_or(1));
  sc.radius = doc.get<double>("scenario", "radius").value_or(sc.radius);
  sc.change_points = doc.get_list<std::int64_t>("scenario", "change_points").value_or(
      std::vector<std::int64_t>{});
  sc.num_changes = static_cast<int>(doc.get<std::int64_t>("scenario", "num_changes").value_or(0));
  sc.grad_scale = doc.get<double>("scenario", "grad_scale").value_or(sc.grad_scale);
  sc.center_radius = doc.get<double>("scenario", "center_radius").value_or(sc.center_radius);
  sc.quad_scale = doc.get<double>("scenario", "quad_scale").value_or(sc.quad_scale);
  sc.bias = doc.get<double>("scenario", "bias").value_or(sc.bias);
  sc.positive_rate = doc.get<double>("scenario", "positive_rate").value_or(sc.positive_rate);
  sc.rotations = doc.get<double>("scenario", "rotations").value_or(sc.rotations);
  sc.G_cap = doc.get<double>("scenario", "G_cap");
  try {
    scenarios::validate(sc);
  } catch (const BadScenario& e) {
    doc.fail(doc.find("scenario", "kind")->line, e.what());
  }

  auto& a = c.algorithm;
  if (auto names = doc.get_list<std::string>("algorithm", "names")) {
    if (names->empty()) doc.fail(doc.find("algorithm", "names")->line, "no algorithms listed");
    for (const auto& n : *names) {
      bool known = false;
      for (const auto& k : known_algorithms()) known = known || k == n;
      if (!known) doc.fail(doc.find("algorithm", "names")->line, "unknown algorithm '" + n + "'");
    }
    a.names = *names;
  }
  if (auto e = doc.get<std::string>("algorithm", "expert")) {
    try {
      a.expert = parse_expert_kind(*e);
    } catch (const ConfigError& err) {
      doc.fail(doc.find("algorithm", "expert")->line, err.what());
    }
  }
  if (auto m = doc.get<std::string>("algorithm", "combine")) a.combine = parse_combine(*m, doc);
  if (auto q = doc.get<std::int64_t>("algorithm", "Q")) {
    if (*q < 1) doc.fail(doc.find("algorithm", "Q")->line, "Q must be at least 1");
    a.Q = static_cast<int>(*q);
  }
  a.eta_exp = doc.get<double>("algorithm", "eta_exp");
  a.eps = doc.get<double>("algorithm", "eps").value_or(a.eps);
  if (auto p = doc.get<std::string>("algorithm", "projection")) {
    a.projection = parse_projection(*p, doc);
  }
  a.clip_r = doc.get<bool>("algorithm", "clip_r").value_or(false);
  a.warm_start = doc.get<bool>("algorithm", "warm_start").value_or(false);
  a.step_scales = doc.get_list<double>("algorithm", "step_scales").value_or(std::vector<double>{});
  a.alphas = doc.get_list<double>("algorithm", "alphas").value_or(a.alphas);
  a.K = doc.get<std::int64_t>("algorithm", "K").value_or(a.K);
  if (a.K < 1) doc.fail(doc.find("algorithm", "K")->line, "K must be at least 1");

  if (auto seeds = doc.get_list<std::uint64_t>("run", "seeds")) {
    if (seeds->empty()) doc.fail(doc.find("run", "seeds")->line, "at least one seed is required");
    c.seeds = *seeds;
    c.seeds_explicit = true;
  }

  auto& k = c.checks;
  k.enabled = doc.get<bool>("checks", "enabled").value_or(true);
  k.options.envelope_slack = doc.get<double>("checks", "envelope_slack").value_or(k.options.envelope_slack);
  k.options.regret_slack =
      doc.get<double>("checks", "regret_slack").value_or(k.options.regret_slack);
  k.options.nonpositive_tol =
      doc.get<double>("checks", "nonpositive_tol").value_or(k.options.nonpositive_tol);
  k.options.check_nonpositive = doc.get<bool>("checks", "nonpositive").value_or(true);
  k.options.check_envelope = doc.get<bool>("checks", "envelope").value_or(true);
  k.options.check_count = doc.get<bool>("checks", "count").value_or(true);
  k.options.check_regret = doc.get<bool>("checks", "regret").value_or(true);
  k.options.check_stitching = doc.get<bool>("checks", "stitching").value_or(true);
  k.report_intervals = doc.get<std::string>("checks", "report_intervals").value_or("halves");
  if (k.report_intervals != "halves" && k.report_intervals != "all-dyadic" &&
      k.report_intervals != "segments") {
    try {
      parse_interval_list(k.report_intervals, sc.T);
    } catch (const ConfigError& e) {
      doc.fail(doc.find("checks", "report_intervals")->line, e.what());
    }
  }

  c.output.dir = doc.get<std::string>("output", "dir").value_or(c.output.dir);
  c.output.downsample = doc.get<std::int64_t>("output", "downsample").value_or(1);
  if (c.output.downsample < 1) {
    doc.fail(doc.find("output", "downsample")->line, "downsample must be at least 1");
  }
  c.output.elide_x = doc.get<bool>("output", "elide_x").value_or(false);

  doc.reject_unused();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ":0: cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  out << serialize_without_output(c) << "\n";
  out << "[output]\n";
  out << "dir = " << quote(c.output.dir) << "\n";
  out << "downsample = " << c.output.downsample << "\n";
  out << "elide_x = " << (c.output.elide_x ? "true" : "false") << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& config) {
  return fnv1a_hex(serialize_without_output(config));
}

std::string scenario_hash(const RunConfig& config) {
  return fnv1a_hex(serialize_scenario(config.scenario));
}

std::vector<Interval> parse_interval_list(const std::string& spec, std::int64_t T) {
  std::vector<Interval> out;
  std::string::size_type start = 0;
  while (start <= spec.size()) {
    const auto comma = std::min(spec.find(',', start), spec.size());
    const std::string item = spec.substr(start, comma - start);
    const auto colon = item.find(':');
    Interval iv;
    bool ok = colon != std::string::npos;
    if (ok) {
      const char* b = item.data();
      const char* m = item.data() + colon;
      const char* e = item.data() + item.size();
      auto r1 = std::from_chars(b, m, iv.s);
      auto r2 = std::from_chars(m + 1, e, iv.t);
      ok = r1.ec == std::errc() && r1.ptr == m && r2.ec == std::errc() && r2.ptr == e;
    }
    if (!ok) {
      throw ConfigError("report interval '" + item +
                        "' is not \"halves\", \"all-dyadic\", \"segments\" or s:t");
    }
    if (iv.s < 1 || iv.s > iv.t || iv.t > T) {
      throw ConfigError("report interval " + item + " is outside [1, " + std::to_string(T) + "]");
    }
    out.push_back(iv);
    start = comma + 1;
  }
  return out;
}

void apply_seed_env(RunConfig& config) {
  if (config.seeds_explicit) return;
  if (const char* env = std::getenv("SAMUEL_SEED")) {
    std::uint64_t seed = 0;
    const std::string s(env);
    auto r = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw ConfigError("SAMUEL_SEED must be a non-negative integer, got '" + s + "'");
    }
    config.seeds = {seed};
  }
}

}  // namespace samuel::harness
