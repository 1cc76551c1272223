#pragma once

// JSON system definition:
//   {"order": 2, "A": [row-major n*n], "b": [n], "c": [n],
//    "schedule": [...], "x0": [n],
//    "tolerances": {"cluster_tol": .., "rank_tol": .., "residual_tol": .., "singular_tol": ..}}
// schedule, x0 and tolerances are optional.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nureach/criterion.hpp"
#include "nureach/numerics.hpp"
#include "nureach/system_model.hpp"

namespace nureach {

class DocumentError : public InvalidArgument {
 public:
  DocumentError(std::string field, std::string message, std::optional<int> line)
      : InvalidArgument(format(field, message, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  std::optional<int> line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message,
                            std::optional<int> line) {
    std::string out = field.empty() ? message : "field " + field + ": " + message;
    if (line) out += " (line " + std::to_string(*line) + ")";
    return out;
  }

  std::string field_;
  std::optional<int> line_;
};

struct ToleranceRecord {
  std::optional<double> cluster;
  std::optional<double> rank;
  std::optional<double> residual;
  std::optional<double> singular;

  bool operator==(const ToleranceRecord&) const = default;
};

struct SystemDocument {
  int order = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::optional<std::vector<double>> schedule;
  std::optional<std::vector<double>> x0;
  std::optional<ToleranceRecord> tolerances;

  bool operator==(const SystemDocument&) const = default;
};

namespace detail {

inline std::optional<int> line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  if (pos == std::string_view::npos) return std::nullopt;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

inline std::optional<int> line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

inline std::vector<double> number_array(const nlohmann::json& root, std::string_view text,
                                        const std::string& key,
                                        std::optional<std::size_t> expected) {
  const auto fail = [&](const std::string& msg) {
    throw DocumentError(key, msg, line_of_key(text, key));
  };
  if (!root.contains(key)) fail("missing");
  const auto& node = root.at(key);
  if (!node.is_array()) fail("expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) fail("entry " + std::to_string(i) + " is not a number");
    const double v = node[i].get<double>();
    if (!std::isfinite(v)) fail("entry " + std::to_string(i) + " is not finite");
    out.push_back(v);
  }
  if (expected && out.size() != *expected)
    fail("expected " + std::to_string(*expected) + " entries, found " + std::to_string(out.size()));
  return out;
}

}  // namespace detail

inline SystemDocument parse_system_document(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError("", std::string("malformed JSON: ") + e.what(),
                        detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!root.is_object()) throw DocumentError("", "top level must be a JSON object", 1);

  SystemDocument doc;
  const auto line = [&](const char* key) { return detail::line_of_key(text, key); };
  if (!root.contains("order")) throw DocumentError("order", "missing", std::nullopt);
  const auto& order = root.at("order");
  if (!order.is_number_integer() || order.get<long>() < 1 || order.get<long>() > kMaxOrder)
    throw DocumentError("order", "expected an integer in 1.." + std::to_string(kMaxOrder),
                        line("order"));
  doc.order = order.get<int>();
  const auto n = static_cast<std::size_t>(doc.order);
  doc.a = detail::number_array(root, text, "A", n * n);
  doc.b = detail::number_array(root, text, "b", n);
  doc.c = detail::number_array(root, text, "c", n);
  if (root.contains("schedule")) {
    doc.schedule = detail::number_array(root, text, "schedule", std::nullopt);
    if (doc.schedule->empty())
      throw DocumentError("schedule", "expected at least one instant", line("schedule"));
    for (std::size_t i = 1; i < doc.schedule->size(); ++i)
      if (!((*doc.schedule)[i] > (*doc.schedule)[i - 1]))
        throw DocumentError("schedule", "instants must be strictly increasing (entry " +
                                            std::to_string(i) + ")",
                            line("schedule"));
  }
  if (root.contains("x0")) doc.x0 = detail::number_array(root, text, "x0", n);
  if (root.contains("tolerances")) {
    const auto& t = root.at("tolerances");
    if (!t.is_object())
      throw DocumentError("tolerances", "expected an object", line("tolerances"));
    ToleranceRecord rec;
    const auto read = [&](const char* key, std::optional<double>& slot) {
      if (!t.contains(key)) return;
      if (!t.at(key).is_number() || !(t.at(key).get<double>() >= 0.0))
        throw DocumentError(std::string("tolerances.") + key, "expected a nonnegative number",
                            line(key));
      slot = t.at(key).get<double>();
    };
    read("cluster_tol", rec.cluster);
    read("rank_tol", rec.rank);
    read("residual_tol", rec.residual);
    read("singular_tol", rec.singular);
    doc.tolerances = rec;
  }
  return doc;
}

inline nlohmann::json to_json(const SystemDocument& doc) {
  nlohmann::json out;
  out["order"] = doc.order;
  out["A"] = doc.a;
  out["b"] = doc.b;
  out["c"] = doc.c;
  if (doc.schedule) out["schedule"] = *doc.schedule;
  if (doc.x0) out["x0"] = *doc.x0;
  if (doc.tolerances) {
    nlohmann::json t = nlohmann::json::object();
    if (doc.tolerances->cluster) t["cluster_tol"] = *doc.tolerances->cluster;
    if (doc.tolerances->rank) t["rank_tol"] = *doc.tolerances->rank;
    if (doc.tolerances->residual) t["residual_tol"] = *doc.tolerances->residual;
    if (doc.tolerances->singular) t["singular_tol"] = *doc.tolerances->singular;
    out["tolerances"] = t;
  }
  return out;
}

inline std::string print_system_document(const SystemDocument& doc) {
  return to_json(doc).dump(2) + "\n";
}

inline Realization to_realization(const SystemDocument& doc) {
  const int n = doc.order;
  RealMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = doc.a[static_cast<std::size_t>(i * n + j)];
  return Realization::make(a, Eigen::Map<const RealVector>(doc.b.data(), n),
                           Eigen::Map<const RealRowVector>(doc.c.data(), n));
}

inline SystemDocument to_document(const Realization& r) {
  SystemDocument doc;
  doc.order = r.order();
  for (int i = 0; i < r.order(); ++i) {
    for (int j = 0; j < r.order(); ++j) doc.a.push_back(r.a()(i, j));
    doc.b.push_back(r.b()(i));
    doc.c.push_back(r.c()(i));
  }
  return doc;
}

/// Defaults overridden by the document's tolerance record.
inline Tolerances document_tolerances(const SystemDocument& doc, Tolerances base = {}) {
  if (!doc.tolerances) return base;
  if (doc.tolerances->cluster) base.cluster = *doc.tolerances->cluster;
  if (doc.tolerances->rank) base.rank = *doc.tolerances->rank;
  if (doc.tolerances->residual) base.residual = *doc.tolerances->residual;
  if (doc.tolerances->singular) base.singular = *doc.tolerances->singular;
  return base;
}

}  // namespace nureach
