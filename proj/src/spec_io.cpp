#include "pergraph/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "pergraph/errors.hpp"

namespace pergraph {

namespace {

using json = nlohmann::json;

/// Line numbers of the values in a syntactically valid JSON text, keyed by JSON pointer.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : text_(text) {
    skip_ws();
    value("");
  }

  int line(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
      const auto it = lines_.find(p);
      if (it != lines_.end()) return it->second;
      const auto cut = p.rfind('/');
      if (cut == std::string::npos) return 1;
      p.erase(cut);
    }
  }

  const std::vector<std::pair<std::string, int>>& duplicates() const { return duplicates_; }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                    text_[pos_] == '\r')) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        out += text_[pos_++];
      }
      out += text_[pos_++];
    }
    ++pos_;
    return json::parse("\"" + out + "\"").get<std::string>();
  }

  void value(const std::string& pointer) {
    lines_.emplace(pointer, line_);
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      std::set<std::string> seen;
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const int keyLine = line_;
        const std::string key = string_token();
        const std::string child = pointer + "/" + key;
        if (!seen.insert(key).second) duplicates_.emplace_back(child, keyLine);
        skip_ws();
        ++pos_;  // colon
        skip_ws();
        value(child);
        skip_ws();
        if (text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      std::size_t index = 0;
      while (pos_ < text_.size() && text_[pos_] != ']') {
        value(pointer + "/" + std::to_string(index++));
        skip_ws();
        if (text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && std::string_view(",}] \t\r\n").find(text_[pos_]) == std::string_view::npos) {
        ++pos_;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
  std::vector<std::pair<std::string, int>> duplicates_;
};

struct Problems {
  const std::string& source;
  const LineIndex& index;
  std::vector<std::string> list;

  void add(const std::string& pointer, const std::string& message) {
    list.push_back(source + ":" + std::to_string(index.line(pointer)) + ": " + message);
  }
};

const std::vector<std::string> kTopFields = {"name", "vertices", "edges", "donors", "receivers", "sigma"};

void check_fields(const json& obj, const std::string& pointer, const std::vector<std::string>& allowed,
                  Problems& out) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      out.add(pointer + "/" + key, "unknown field \"" + key + "\"");
    }
  }
  for (const auto& key : allowed) {
    if (!obj.contains(key)) out.add(pointer, "missing field \"" + key + "\"");
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PeriodicSpec parse_spec(const std::string& path) { return parse_spec_text(read_file(path), path); }

PeriodicSpec parse_spec_text(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Byte offset to line.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw InputError(source + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  const LineIndex index(text);
  Problems out{source, index, {}};
  for (const auto& [pointer, line] : index.duplicates()) {
    out.list.push_back(source + ":" + std::to_string(line) + ": duplicate key at " + pointer);
  }
  if (!doc.is_object()) {
    out.add("", "top level must be an object");
    throw InputError(out.list.front());
  }
  check_fields(doc, "", kTopFields, out);

  PeriodicSpec s;
  if (doc.contains("name")) {
    if (doc["name"].is_string()) s.name = doc["name"].get<std::string>();
    else out.add("/name", "name must be a string");
  }

  const auto string_list = [&](const char* key) {
    std::vector<std::pair<std::string, std::string>> items;  // (pointer, value)
    if (!doc.contains(key)) return items;
    const json& arr = doc[key];
    const std::string base = std::string("/") + key;
    if (!arr.is_array()) {
      out.add(base, std::string(key) + " must be an array");
      return items;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ptr = base + "/" + std::to_string(i);
      if (!arr[i].is_string()) out.add(ptr, std::string(key) + " entries must be strings");
      else items.emplace_back(ptr, arr[i].get<std::string>());
    }
    return items;
  };

  for (const auto& [ptr, label] : string_list("vertices")) {
    if (s.cell.find_vertex(label)) out.add(ptr, "duplicate vertex \"" + label + "\"");
    else s.cell.add_vertex(label);
  }
  const auto vertex = [&](const std::string& ptr, const json& v, const char* what) -> std::optional<VertexIndex> {
    if (!v.is_string()) {
      out.add(ptr, std::string(what) + " must be a vertex label");
      return std::nullopt;
    }
    const auto idx = s.cell.find_vertex(v.get<std::string>());
    if (!idx) out.add(ptr, std::string(what) + " refers to unknown vertex \"" + v.get<std::string>() + "\"");
    return idx;
  };

  if (doc.contains("edges")) {
    const json& edges = doc["edges"];
    if (!edges.is_array()) {
      out.add("/edges", "edges must be an array");
    } else {
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string ptr = "/edges/" + std::to_string(i);
        const json& e = edges[i];
        if (!e.is_object()) {
          out.add(ptr, "edge must be an object");
          continue;
        }
        const std::size_t before = out.list.size();
        check_fields(e, ptr, {"id", "from", "to", "length"}, out);
        if (out.list.size() != before) continue;
        std::string id;
        if (!e["id"].is_string()) out.add(ptr + "/id", "edge id must be a string");
        else id = e["id"].get<std::string>();
        const auto from = vertex(ptr + "/from", e["from"], "edge endpoint");
        const auto to = vertex(ptr + "/to", e["to"], "edge endpoint");
        double length = 0.0;
        if (!e["length"].is_number()) {
          out.add(ptr + "/length", "edge length must be a number");
        } else {
          length = e["length"].get<double>();
          if (!(length > 0.0) || !std::isfinite(length)) {
            std::ostringstream msg;
            msg << "edge \"" << id << "\" has nonpositive length " << length;
            out.add(ptr + "/length", msg.str());
          }
        }
        if (!id.empty() && s.cell.find_edge(id)) {
          out.add(ptr + "/id", "duplicate edge id \"" + id + "\"");
          continue;
        }
        if (out.list.size() == before) s.cell.add_edge(id, *from, *to, length);
      }
    }
  }

  const auto vertex_set = [&](const char* key, std::vector<VertexIndex>& into) {
    std::set<VertexIndex> seen;
    for (const auto& [ptr, label] : string_list(key)) {
      const auto idx = s.cell.find_vertex(label);
      if (!idx) out.add(ptr, std::string(key) + " entry refers to unknown vertex \"" + label + "\"");
      else if (!seen.insert(*idx).second) out.add(ptr, std::string("duplicate entry \"") + label + "\" in " + key);
      else into.push_back(*idx);
    }
  };
  vertex_set("donors", s.donors);
  vertex_set("receivers", s.receivers);

  if (doc.contains("sigma")) {
    const json& sigma = doc["sigma"];
    if (!sigma.is_array()) {
      out.add("/sigma", "sigma must be an array");
    } else {
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        const std::string ptr = "/sigma/" + std::to_string(i);
        const json& m = sigma[i];
        if (!m.is_object()) {
          out.add(ptr, "sigma entry must be an object");
          continue;
        }
        const std::size_t before = out.list.size();
        check_fields(m, ptr, {"donor", "receiver"}, out);
        if (out.list.size() != before) continue;
        const auto d = vertex(ptr + "/donor", m["donor"], "sigma donor");
        const auto r = vertex(ptr + "/receiver", m["receiver"], "sigma receiver");
        if (!d || !r) continue;
        if (!s.sigma.emplace(*d, *r).second) {
          out.add(ptr, "sigma defined twice for donor \"" + s.cell.vertex_label(*d) + "\"");
        }
      }
    }
  }

  if (!out.list.empty()) {
    std::string msg;
    for (const auto& p : out.list) msg += (msg.empty() ? "" : "\n") + p;
    throw InputError(msg);
  }
  return s;
}

std::string serialize_spec(const PeriodicSpec& s) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["name"] = s.name;
  doc["vertices"] = ojson::array();
  for (VertexIndex v = 0; v < s.cell.vertex_count(); ++v) doc["vertices"].push_back(s.cell.vertex_label(v));
  doc["edges"] = ojson::array();
  for (EdgeIndex e = 0; e < s.cell.edge_count(); ++e) {
    const Edge& ed = s.cell.edge(e);
    ojson item;
    item["id"] = ed.id;
    item["from"] = s.cell.vertex_label(ed.v);
    item["to"] = s.cell.vertex_label(ed.w);
    item["length"] = ed.length;
    doc["edges"].push_back(item);
  }
  doc["donors"] = ojson::array();
  for (VertexIndex v : s.donors) doc["donors"].push_back(s.cell.vertex_label(v));
  doc["receivers"] = ojson::array();
  for (VertexIndex v : s.receivers) doc["receivers"].push_back(s.cell.vertex_label(v));
  doc["sigma"] = ojson::array();
  for (const auto& [d, r] : s.sigma) {
    ojson item;
    item["donor"] = s.cell.vertex_label(d);
    item["receiver"] = s.cell.vertex_label(r);
    doc["sigma"].push_back(item);
  }
  return doc.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace pergraph
