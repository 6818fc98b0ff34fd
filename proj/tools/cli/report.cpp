/*
 * Copyright 2026 The mixrobust Authors.
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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "mixrobust/io.hpp"

namespace mixrobust::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Row {
  double estimate = NAN;
  double se = NAN;
  double t = NAN;
  double p = NAN;
};

double number(const json& v) { return v.is_number() ? v.get<double>() : NAN; }

std::string format(const char* fmt, double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string format_p(double p) {
  if (!std::isfinite(p)) return "nan";
  if (p < 0.001) return "<0.001";
  return format("%.3f", p);
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string cells(const Row& r) {
  return pad_left(format("%.4f", r.estimate), 10) + pad_left(format("%.4f", r.se), 9) +
         pad_left(format("%.3f", r.t), 9) + pad_left(format_p(r.p), 8);
}

std::map<std::string, Row> rows_of(const json& entries) {
  std::map<std::string, Row> out;
  for (const auto& e : entries) {
    out[e.at("label").get<std::string>()] =
        Row{number(e.at("estimate")), number(e.at("se")), number(e.at("t")), number(e.at("p"))};
  }
  return out;
}

json load(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing " + path.string() + " (run analyze first)");
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

constexpr std::size_t kLabelWidth = 10;

}  // namespace

std::string build_report(const fs::path& out_dir, std::span<const TestScenario> scenarios) {
  std::ostringstream out;
  out << "mixrobust report\n";
  for (TestScenario s : scenarios) {
    const json mean = load(out_dir / fit_file(Response::kMeanAuc, s));
    const json logsd = load(out_dir / fit_file(Response::kLogSd, s));
    const auto mean_terms = rows_of(mean.at("terms"));
    const auto logsd_terms = rows_of(logsd.at("terms"));
    const auto mean_implied = rows_of(mean.at("implied_effects"));
    const auto logsd_implied = rows_of(logsd.at("implied_effects"));

    out << "\nScenario: " << to_string(s) << "  (n = " << mean.at("n").get<std::size_t>()
        << ", df = " << mean.at("df").get<int>() << ")\n\n";
    const std::string blank(kLabelWidth, ' ');
    out << blank << pad_right("  Mean AUC", 36) << "  Log SD\n";
    const std::string heads = pad_left("Estimate", 10) + pad_left("SE", 9) + pad_left("t", 9) +
                              pad_left("p", 8);
    out << pad_right("Term", kLabelWidth) << heads << "  " << heads << '\n';
    auto line = [&](const std::string& label, const std::map<std::string, Row>& a,
                    const std::map<std::string, Row>& b) {
      const auto ia = a.find(label);
      const auto ib = b.find(label);
      out << pad_right(label, kLabelWidth) << (ia != a.end() ? cells(ia->second) : cells({}))
          << "  " << (ib != b.end() ? cells(ib->second) : cells({})) << '\n';
    };
    for (const auto& label : mean.at("labels")) {
      line(label.get<std::string>(), mean_terms, logsd_terms);
    }
    if (!mean_implied.empty()) {
      out << "Implied effect\n";
      for (const auto& e : mean.at("implied_effects")) {
        line(e.at("label").get<std::string>(), mean_implied, logsd_implied);
      }
    }
    out << pad_right("sigma^2", kLabelWidth) << pad_left(format("%.6g", number(mean.at("sigma2"))), 10)
        << std::string(28, ' ') << pad_left(format("%.6g", number(logsd.at("sigma2"))), 10) << '\n';

    const fs::path shap_mean = out_dir / shap_file(Response::kMeanAuc, s);
    const fs::path shap_logsd = out_dir / shap_file(Response::kLogSd, s);
    if (fs::exists(shap_mean) && fs::exists(shap_logsd)) {
      std::map<std::string, double> a;
      std::map<std::string, double> b;
      const json sa = load(shap_mean);
      const json sb = load(shap_logsd);
      for (const auto& e : sa.at("terms")) a[e.at("label").get<std::string>()] = number(e.at("importance"));
      for (const auto& e : sb.at("terms")) b[e.at("label").get<std::string>()] = number(e.at("importance"));
      out << "\nSHAP importance, mean |phi|\n"
          << pad_right("Term", kLabelWidth) << pad_left("Mean AUC", 10) << pad_left("Log SD", 12)
          << '\n';
      for (const auto& label : mean.at("labels")) {
        const std::string l = label.get<std::string>();
        out << pad_right(l, kLabelWidth) << pad_left(format("%.4f", a.count(l) ? a[l] : NAN), 10)
            << pad_left(format("%.4f", b.count(l) ? b[l] : NAN), 12) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace mixrobust::cli
