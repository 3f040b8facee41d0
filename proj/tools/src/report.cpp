#include <cmath>
#include <sstream>

#include "stw_cli/run.hpp"

namespace stw::cli {
namespace {

std::string format_name(Format f) {
  switch (f) {
    case Format::kText: return "text";
    case Format::kJson: return "json";
    case Format::kCsv: return "csv";
  }
  return "text";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Milliseconds with microsecond resolution keeps the JSON short.
double rounded_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

}  // namespace

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  if (!c.action.empty()) j["action"] = c.action;
  j["g"] = c.g ? nlohmann::ordered_json(*c.g) : nlohmann::ordered_json(nullptr);
  j["n"] = c.n ? nlohmann::ordered_json(*c.n) : nlohmann::ordered_json(nullptr);
  j["p"] = c.p ? nlohmann::ordered_json(*c.p) : nlohmann::ordered_json(nullptr);
  j["mode"] = c.extended ? "extended" : "default";
  j["exact"] = c.exact;
  j["primes"] = c.primes;
  j["workers"] = c.workers;
  j["seed"] = std::to_string(c.seed);
  j["samples"] = c.samples;
  j["chain_bases_vanish"] = c.chain_bases_vanish;
  j["cache_dir"] = c.cache_dir;
  j["snapshot_dir"] = c.snapshot_dir;
  j["format"] = format_name(c.format);
  j["out"] = c.out;
  return j;
}

nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["version"] = kArtifactVersion;
  j["timestamp"] = r.timestamp;
  j["config"] = config_json(r.config);
  j["status"] = r.ok() ? "pass" : "fail";
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json x;
    x["name"] = c.name;
    x["anchor"] = c.anchor;
    x["expected"] = c.expected;
    x["computed"] = c.computed;
    x["status"] = status_string(c.status);
    x["wall_ms"] = rounded_ms(c.wall_ms);
    j["checks"].push_back(x);
  }
  for (const auto& [k, v] : r.data.items()) j[k] = v;
  return j;
}

std::string render(const VerificationReport& r, Format format) {
  std::ostringstream out;
  if (format == Format::kJson) {
    out << to_json(r).dump(2) << '\n';
  } else if (format == Format::kCsv) {
    if (!r.csv_rows.empty()) {
      for (const auto& row : r.csv_rows) out << row << '\n';
    } else {
      out << "name,anchor,expected,computed,status,wall_ms\n";
      for (const auto& c : r.checks)
        out << csv_field(c.name) << ',' << csv_field(c.anchor) << ',' << csv_field(c.expected) << ','
            << csv_field(c.computed) << ',' << status_string(c.status) << ',' << rounded_ms(c.wall_ms) << '\n';
    }
  } else {
    out << "stw " << kArtifactVersion << ' ' << r.config.subcommand;
    if (!r.config.action.empty()) out << ' ' << r.config.action;
    if (r.config.n) out << " n=" << *r.config.n;
    if (r.config.g) out << " g=" << *r.config.g;
    if (r.config.p) out << " p=" << *r.config.p;
    if (r.config.extended) out << " extended";
    out << '\n';
    for (const auto& c : r.checks) {
      std::string tag = status_string(c.status);
      for (auto& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      out << '[' << tag << "] " << c.name << ": ";
      if (!c.expected.empty()) out << "expected " << c.expected << ", ";
      out << "computed " << c.computed << "  (" << c.wall_ms << " ms)\n";
    }
    out << (r.ok() ? "PASS" : "FAIL") << '\n';
  }
  return out.str();
}

}  // namespace stw::cli
