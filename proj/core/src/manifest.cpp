#include "gpsim/manifest.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

#include "gpsim/error.hpp"

namespace gpsim {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct CsvLine {
  std::size_t number;  // 1-based physical line
  std::string_view text;
};

std::vector<CsvLine> non_empty_lines(std::string_view text) {
  std::vector<CsvLine> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++number;
    if (!trim(line).empty()) lines.push_back({number, line});
  }
  return lines;
}

std::optional<double> parse_finite(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || end != token.data() + token.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Maps lower-cased header names to column positions.
std::map<std::string, std::size_t> header_columns(std::string_view header) {
  std::map<std::string, std::size_t> columns;
  auto names = split_csv_record(header);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string name;
    for (char c : names[i]) name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    columns.emplace(name, i);
  }
  return columns;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_real(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

Manifest read_manifest(std::string_view text) {
  auto lines = non_empty_lines(text);
  if (lines.empty()) throw ParseError(ErrorKind::Manifest, 0, "manifest is empty");

  auto columns = header_columns(lines.front().text);
  auto require = [&](const char* name) {
    auto it = columns.find(name);
    if (it == columns.end()) {
      throw ParseError(ErrorKind::Manifest, 0, std::string("missing column '") + name + "'");
    }
    return it->second;
  };
  const std::size_t ref_mesh = require("ref_mesh");
  const std::size_t ref_tex = require("ref_tex");
  const std::size_t dist_mesh = require("dist_mesh");
  const std::size_t dist_tex = require("dist_tex");

  Manifest manifest;
  auto mos_it = columns.find("mos");
  auto class_it = columns.find("class");
  manifest.has_mos = mos_it != columns.end();
  manifest.has_class = class_it != columns.end();

  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split_csv_record(lines[r].text);
    if (fields.size() < columns.size()) {
      throw ParseError(ErrorKind::Manifest, r,
                       "expected " + std::to_string(columns.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    ManifestRow row{fields[ref_mesh], fields[ref_tex], fields[dist_mesh], fields[dist_tex],
                    std::nullopt, std::nullopt};
    for (const std::string* path : {&row.ref_mesh, &row.ref_tex, &row.dist_mesh, &row.dist_tex}) {
      if (path->empty()) throw ParseError(ErrorKind::Manifest, r, "empty path");
    }
    if (manifest.has_mos && !fields[mos_it->second].empty()) {
      row.mos = parse_finite(fields[mos_it->second]);
      if (!row.mos) {
        throw ParseError(ErrorKind::Manifest, r,
                         "mos '" + fields[mos_it->second] + "' is not a finite number");
      }
    }
    if (manifest.has_class) row.label = fields[class_it->second];
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

std::string write_scores_csv(std::span<const ScoredRow> rows, bool with_mos, bool with_class) {
  std::string out = "ref_mesh,ref_tex,dist_mesh,dist_tex";
  if (with_mos) out += ",mos";
  if (with_class) out += ",class";
  out += ",score\n";
  for (const ScoredRow& s : rows) {
    out += csv_escape(s.row.ref_mesh) + ',' + csv_escape(s.row.ref_tex) + ',' +
           csv_escape(s.row.dist_mesh) + ',' + csv_escape(s.row.dist_tex);
    if (with_mos) out += ',' + (s.row.mos ? format_real(*s.row.mos) : std::string());
    if (with_class) out += ',' + csv_escape(s.row.label.value_or(""));
    out += ',' + format_real(s.score) + '\n';
  }
  return out;
}

nlohmann::json scores_to_json(std::span<const ScoredRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const ScoredRow& s : rows) {
    nlohmann::json j = {{"ref_mesh", s.row.ref_mesh},
                        {"ref_tex", s.row.ref_tex},
                        {"dist_mesh", s.row.dist_mesh},
                        {"dist_tex", s.row.dist_tex},
                        {"score", s.score}};
    if (s.row.mos) j["mos"] = *s.row.mos;
    if (s.row.label) j["class"] = *s.row.label;
    out.push_back(std::move(j));
  }
  return out;
}

ScoreTable read_score_table(std::string_view text) {
  auto lines = non_empty_lines(text);
  if (lines.empty()) throw ParseError(ErrorKind::Manifest, 0, "score table is empty");
  auto columns = header_columns(lines.front().text);
  auto score_it = columns.find("score");
  auto mos_it = columns.find("mos");
  if (score_it == columns.end() || mos_it == columns.end()) {
    throw ParseError(ErrorKind::Manifest, 0, "score table needs 'score' and 'mos' columns");
  }
  auto class_it = columns.find("class");

  ScoreTable table;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split_csv_record(lines[r].text);
    if (fields.size() < columns.size()) {
      throw ParseError(ErrorKind::Manifest, r, "too few fields");
    }
    auto score = parse_finite(fields[score_it->second]);
    auto mos = parse_finite(fields[mos_it->second]);
    if (!score) throw ParseError(ErrorKind::Manifest, r, "score is not a finite number");
    if (!mos) throw ParseError(ErrorKind::Manifest, r, "mos is not a finite number");
    table.scores.push_back(*score);
    table.mos.push_back(*mos);
    if (class_it != columns.end()) table.labels.push_back(fields[class_it->second]);
  }
  return table;
}

}  // namespace gpsim
