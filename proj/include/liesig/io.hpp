#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "liesig/errors.hpp"
#include "liesig/hall.hpp"
#include "liesig/lie.hpp"
#include "liesig/tensor.hpp"

namespace liesig {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline double parse_cell(std::string_view cell, std::size_t line) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw format_error("'" + std::string(cell) + "' is not a number", line);
  if (!std::isfinite(v)) throw format_error("non-finite coordinate", line);
  return v;
}

inline std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// One point per line, comma-separated coordinates. The dimension is taken
/// from the first row; blank lines are ignored but still counted.
inline PathPoints parse_path_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line = 0, width = 0, pos = 0;
  while (pos <= text.size()) {
    ++line;
    const auto nl = text.find('\n', pos);
    const std::string_view row = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (detail::trim(row).empty()) continue;
    std::vector<double> pt;
    std::size_t start = 0;
    while (true) {
      auto comma = row.find(',', start);
      pt.push_back(detail::parse_cell(row.substr(start, comma - start), line));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) width = pt.size();
    else if (pt.size() != width)
      throw format_error("expected " + std::to_string(width) + " columns, found " + std::to_string(pt.size()), line);
    rows.push_back(std::move(pt));
  }
  if (rows.empty()) throw empty_input_error("path file has no points");
  return PathPoints(static_cast<int>(width), std::move(rows));
}

/// Shortest round-trip decimal text; parse_path_csv restores it exactly.
inline std::string format_path_csv(const PathPoints& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto p = path[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) out += ',';
      out += detail::shortest(p[k]);
    }
    out += '\n';
  }
  return out;
}

using Json = nlohmann::ordered_json;

/// {"dim", "level", "basis", "values"} with basis labels and values aligned.
inline Json coordinates_json(int dim, int level, const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (labels.size() != values.size()) throw std::invalid_argument("labels and values differ in length");
  Json j;
  j["dim"] = dim;
  j["level"] = level;
  j["basis"] = labels;
  j["values"] = values;
  return j;
}

inline std::vector<std::string> lyndon_labels(const LyndonBasis& basis) {
  std::vector<std::string> out;
  out.reserve(basis.size());
  for (const Word& w : basis.words()) out.push_back(to_string(w, basis.dim()));
  return out;
}

inline std::vector<std::string> hall_labels(const HallBasis& basis) {
  std::vector<std::string> out;
  out.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) out.push_back(basis.element(i).render());
  return out;
}

inline Json logsig_json(const LieElement<double>& x) {
  return coordinates_json(x.dim(), x.level(), lyndon_labels(x.basis()), {x.coefficients().begin(), x.coefficients().end()});
}

inline Json hall_logsig_json(const HallCoordinates<double>& c, const HallBasis& basis) {
  std::vector<double> values;
  for (const auto& lvl : c) values.insert(values.end(), lvl.begin(), lvl.end());
  return coordinates_json(basis.dim(), basis.level(), hall_labels(basis), values);
}

/// Signature coefficients for levels 1..m, words in level-then-lexicographic order.
inline Json signature_json(const TensorElement<double>& s) {
  std::vector<std::string> labels;
  std::vector<double> values;
  for (int n = 1; n <= s.level(); ++n) {
    auto lvl = s.level_coefficients(n);
    for (std::size_t i = 0; i < lvl.size(); ++i) {
      labels.push_back(to_string(word_at(n, i, s.dim()), s.dim()));
      values.push_back(lvl[i]);
    }
  }
  return coordinates_json(s.dim(), s.level(), labels, values);
}

inline Json points_json(const PathPoints& path) {
  Json out = Json::array();
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto p = path[i];
    out.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return out;
}

inline std::string format_logsig_json(const LieElement<double>& x) { return logsig_json(x).dump(); }

}  // namespace liesig
