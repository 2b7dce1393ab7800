#pragma once

// JSON readers and writers for models, vectors, path lists, length
// functions and reports. Every malformed input surfaces as Error(BadInput).
//
//   graph   {"vertices": [...], "edges": [{"u", "v", "q_uv", "q_vu"}]}
//           or {"vertices": [...], "edges": [{"u", "v"}], "laplacian": true}
//   vector  {"label": value, ...} or [value, ...] in vertex order
//   paths   {"paths": [{"from", "to", "vertices": [...]}]}
//   lengths {"lengths": [{"u", "v", "w"}]}
// Vertex references are labels (strings) or zero-based indices (integers).

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pathineq/bounds.hpp"
#include "pathineq/error.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/metric_paths.hpp"
#include "pathineq/transport.hpp"

namespace pathineq::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::BadInput, std::string(what) + " is not valid JSON: " + e.what());
  }
}

/// Inline JSON when the argument starts with '[' or '{', otherwise a file path.
inline json load(const std::string& arg, std::string_view what) {
  if (!arg.empty() && (arg.front() == '[' || arg.front() == '{')) return parse(arg, what);
  return parse(read_file(arg), what);
}

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

namespace detail {

inline double number(const json& j, std::string_view what) {
  if (!j.is_number()) throw Error(ErrorKind::BadInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline const json& field(const json& obj, const char* key, std::string_view what) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(ErrorKind::BadInput, std::string(what) + " is missing '" + key + "'");
  return obj.at(key);
}

inline std::string label_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorKind::BadInput, "vertex labels must be strings or integers");
}

template <class Lookup>
Vertex vertex_ref(const json& j, std::size_t n, Lookup lookup) {
  if (j.is_string()) {
    const auto v = lookup(j.get<std::string>());
    if (!v) throw Error(ErrorKind::BadInput, "unknown vertex '" + j.get<std::string>() + "'");
    return *v;
  }
  if (j.is_number_integer()) {
    const auto i = j.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= n) throw Error(ErrorKind::BadInput, "vertex index out of range");
    return static_cast<Vertex>(i);
  }
  throw Error(ErrorKind::BadInput, "vertex references must be labels or indices");
}

inline Vertex vertex_ref(const json& j, const ReversibleModel& model) {
  return vertex_ref(j, model.vertex_count(), [&](const std::string& s) { return model.index_of(s); });
}

}  // namespace detail

inline ReversibleModel model_from_json(const json& j) {
  const json& vs = detail::field(j, "vertices", "graph");
  const json& es = detail::field(j, "edges", "graph");
  if (!vs.is_array() || !es.is_array()) throw Error(ErrorKind::BadInput, "graph vertices and edges must be arrays");
  std::vector<std::string> labels;
  for (const auto& v : vs) labels.push_back(detail::label_of(v));
  auto lookup = [&](const std::string& s) -> std::optional<Vertex> {
    for (Vertex i = 0; i < labels.size(); ++i)
      if (labels[i] == s) return i;
    return std::nullopt;
  };
  const bool laplacian = j.value("laplacian", false);
  if (laplacian) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& e : es)
      edges.emplace_back(detail::vertex_ref(detail::field(e, "u", "edge"), labels.size(), lookup),
                         detail::vertex_ref(detail::field(e, "v", "edge"), labels.size(), lookup));
    return laplacian_model(std::move(labels), edges);
  }
  RateGraph g;
  g.vertices = labels;
  for (const auto& e : es) {
    const Vertex u = detail::vertex_ref(detail::field(e, "u", "edge"), labels.size(), lookup);
    const Vertex v = detail::vertex_ref(detail::field(e, "v", "edge"), labels.size(), lookup);
    g.add_edge(u, v, detail::number(detail::field(e, "q_uv", "edge"), "q_uv"),
               detail::number(detail::field(e, "q_vu", "edge"), "q_vu"));
  }
  return build_model(g);
}

inline json model_to_json(const ReversibleModel& model) {
  json j;
  j["vertices"] = model.labels();
  json edges = json::array();
  for (EdgeId e = 0; e < model.edge_count(); e += 2)
    edges.push_back({{"u", model.label(model.from(e))},
                     {"v", model.label(model.to(e))},
                     {"q_uv", model.rate(e)},
                     {"q_vu", model.rate(e + 1)}});
  j["edges"] = edges;
  return j;
}

/// Parses "gallery:NAME:P1[:P2]" (parameters may also be comma separated).
inline ReversibleModel gallery_from_uri(std::string_view uri) {
  constexpr std::string_view prefix = "gallery:";
  if (uri.substr(0, prefix.size()) != prefix) throw Error(ErrorKind::BadInput, "not a gallery URI");
  std::string rest(uri.substr(prefix.size()));
  const auto colon = rest.find(':');
  const std::string family = rest.substr(0, colon);
  std::vector<long> params;
  if (colon != std::string::npos) {
    std::string p = rest.substr(colon + 1);
    for (char& c : p)
      if (c == ',') c = ':';
    std::stringstream ss(p);
    std::string item;
    while (std::getline(ss, item, ':')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stol(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error(ErrorKind::BadInput, "gallery parameter '" + item + "' is not an integer");
      }
    }
  }
  try {
    return gallery(family, params);
  } catch (const Error& e) {
    throw Error(ErrorKind::BadInput, e.message());
  }
}

inline bool is_gallery_uri(std::string_view s) { return s.substr(0, 8) == "gallery:"; }

/// One value per vertex from either a label-keyed object or an array.
inline std::vector<double> vector_from_json(const json& j, const ReversibleModel& model, std::string_view what) {
  const std::size_t n = model.vertex_count();
  std::vector<double> out(n, 0.0);
  if (j.is_array()) {
    if (j.size() != n)
      throw Error(ErrorKind::BadInput, std::string(what) + " has " + std::to_string(j.size()) + " entries, expected " +
                                           std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::number(j[i], what);
    return out;
  }
  if (!j.is_object()) throw Error(ErrorKind::BadInput, std::string(what) + " must be an object or an array");
  if (j.size() != n)
    throw Error(ErrorKind::BadInput, std::string(what) + " has " + std::to_string(j.size()) + " entries, expected " +
                                         std::to_string(n));
  for (const auto& [key, value] : j.items()) {
    const auto x = model.index_of(key);
    if (!x) throw Error(ErrorKind::BadInput, std::string(what) + " names unknown vertex '" + key + "'");
    out[*x] = detail::number(value, what);
  }
  return out;
}

inline ProbabilityVector probability_from_json(const json& j, const ReversibleModel& model, std::string_view what) {
  return ProbabilityVector(vector_from_json(j, model, what));
}

inline std::vector<PathSpec> paths_from_json(const json& j, const ReversibleModel& model) {
  const json& ps = detail::field(j, "paths", "path file");
  if (!ps.is_array()) throw Error(ErrorKind::BadInput, "'paths' must be an array");
  std::vector<PathSpec> out;
  for (const auto& p : ps) {
    PathSpec spec{detail::vertex_ref(detail::field(p, "from", "path"), model),
                  detail::vertex_ref(detail::field(p, "to", "path"), model), {}};
    const json& vs = detail::field(p, "vertices", "path");
    if (!vs.is_array()) throw Error(ErrorKind::BadInput, "path vertices must be an array");
    for (const auto& v : vs) spec.vertices.push_back(detail::vertex_ref(v, model));
    out.push_back(std::move(spec));
  }
  return out;
}

inline LengthFunction lengths_from_json(const json& j, const ReversibleModel& model) {
  const json& ls = detail::field(j, "lengths", "length file");
  if (!ls.is_array()) throw Error(ErrorKind::BadInput, "'lengths' must be an array");
  std::vector<double> w(model.undirected_count(), 0.0);
  std::vector<char> seen(w.size(), 0);
  for (const auto& l : ls) {
    const Vertex u = detail::vertex_ref(detail::field(l, "u", "length"), model);
    const Vertex v = detail::vertex_ref(detail::field(l, "v", "length"), model);
    const auto e = model.find_edge(u, v);
    if (!e) throw Error(ErrorKind::BadInput, "length given for a non-edge");
    const std::size_t k = ReversibleModel::undirected(*e);
    if (seen[k]) throw Error(ErrorKind::BadInput, "length given twice for one edge");
    seen[k] = 1;
    w[k] = detail::number(detail::field(l, "w", "length"), "w");
  }
  for (char s : seen)
    if (!s) throw Error(ErrorKind::BadInput, "length file does not cover every edge");
  try {
    return LengthFunction(std::move(w));
  } catch (const Error& e) {
    throw Error(ErrorKind::BadInput, e.message());
  }
}

inline json lengths_to_json(const LengthFunction& w, const ReversibleModel& model) {
  json ls = json::array();
  for (EdgeId e = 0; e < model.edge_count(); e += 2)
    ls.push_back({{"u", model.label(model.from(e))}, {"v", model.label(model.to(e))}, {"w", w(e)}});
  return {{"lengths", ls}};
}

inline json vertex_map(const ReversibleModel& model, std::span<const double> f) {
  json j = json::object();
  for (Vertex x = 0; x < model.vertex_count(); ++x) j[model.label(x)] = f[x];
  return j;
}

inline json to_json(const BoundReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries())
    entries.push_back({{"name", e.name}, {"value", e.value}, {"formula", e.formula}, {"inputs", e.inputs}});
  return {{"entries", entries}};
}

}  // namespace pathineq::io
