#pragma once

#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "khor/base.hpp"

namespace khor {

// One crossing, four incident arc labels listed counterclockwise starting
// from the incoming under-strand (slot 0). Slot 2 is the outgoing
// under-strand; slots 1 and 3 carry the over-strand.
struct PdTuple {
  std::array<int, 4> arc;
};

struct PdCode {
  std::vector<PdTuple> crossings;
  std::vector<bool> unknot_ccw;  // closed 0-crossing components, true = ccw
  std::optional<int> outer_face;

  int component_count() const;
  std::string canonical_text() const;
};

namespace pd_detail {

inline void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline bool eat(const std::string& s, size_t& i, char c) {
  skip_ws(s, i);
  if (i < s.size() && s[i] == c) {
    ++i;
    return true;
  }
  return false;
}

inline void expect(const std::string& s, size_t& i, char c) {
  if (!eat(s, i, c))
    throw input_error("PD parse error at position " + std::to_string(i) +
                      ": expected '" + std::string(1, c) + "'");
}

inline int parse_int(const std::string& s, size_t& i) {
  skip_ws(s, i);
  size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == start)
    throw input_error("PD parse error at position " + std::to_string(i) +
                      ": expected arc label");
  return std::stoi(s.substr(start, i - start));
}

// Port of a crossing: (crossing index, slot 0..3).
struct Port {
  int c, s;
  bool operator<(const Port& o) const { return c != o.c ? c < o.c : s < o.s; }
  bool operator==(const Port& o) const { return c == o.c && s == o.s; }
};

// Counts faces of the rotation system per connected component and runs the
// spherical Euler check V - E + F = 2 on each.
inline void euler_check(const PdCode& pd) {
  int n = static_cast<int>(pd.crossings.size());
  if (n == 0) return;

  // The two ports of each arc label.
  std::map<int, std::vector<Port>> ends;
  for (int c = 0; c < n; ++c)
    for (int s = 0; s < 4; ++s) ends[pd.crossings[c].arc[s]].push_back({c, s});

  // Directed half-edges: (arc occurrence from port a to port b). Encode as
  // index 2*k + d over the sorted arc list.
  std::vector<int> labels;
  for (auto& [l, _] : ends) labels.push_back(l);
  int m = static_cast<int>(labels.size());

  auto port_id = [](const Port& p) { return 4 * p.c + p.s; };
  // half-edge h: arc k traversed from ends[k][d] to ends[k][1-d]
  auto target_port = [&](int h) {
    return ends[labels[h / 2]][1 - (h % 2)];
  };
  // h arrives at port p; the face continues from port (p-1) mod 4, leaving
  // along that port's arc.
  std::vector<int> leave_from(4 * n, -1);  // port id -> half-edge leaving it
  for (int k = 0; k < m; ++k)
    for (int d = 0; d < 2; ++d) leave_from[port_id(ends[labels[k]][d])] = 2 * k + d;

  auto next_he = [&](int h) {
    Port p = target_port(h);
    Port q{p.c, (p.s + 3) % 4};
    return leave_from[port_id(q)];
  };

  // Connected components of the crossing graph.
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int c0 = 0; c0 < n; ++c0) {
    if (comp[c0] >= 0) continue;
    std::vector<int> stack{c0};
    comp[c0] = ncomp;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      for (int s = 0; s < 4; ++s)
        for (const Port& p : ends[pd.crossings[c].arc[s]])
          if (comp[p.c] < 0) {
            comp[p.c] = ncomp;
            stack.push_back(p.c);
          }
    }
    ++ncomp;
  }

  std::vector<int> V(ncomp, 0), E(ncomp, 0), F(ncomp, 0);
  for (int c = 0; c < n; ++c) ++V[comp[c]];
  for (int k = 0; k < m; ++k) ++E[comp[ends[labels[k]][0].c]];

  std::vector<bool> seen(2 * m, false);
  for (int h0 = 0; h0 < 2 * m; ++h0) {
    if (seen[h0]) continue;
    int h = h0;
    do {
      seen[h] = true;
      h = next_he(h);
    } while (h != h0);
    ++F[comp[target_port(h0).c]];
  }
  for (int k = 0; k < ncomp; ++k)
    if (V[k] - E[k] + F[k] != 2)
      throw input_error("PD code is not a planar rotation system (Euler check: V-E+F = " +
                        std::to_string(V[k] - E[k] + F[k]) + " != 2)");
}

inline void validate_and_normalize(PdCode& pd) {
  std::map<int, int> count;
  for (const auto& t : pd.crossings)
    for (int s = 0; s < 4; ++s) ++count[t.arc[s]];
  for (auto& [label, c] : count)
    if (c != 2)
      throw input_error("arc label " + std::to_string(label) + " occurs " +
                        std::to_string(c) + " times, expected 2");

  // Normalize labels to 1..2n, preserving relative order.
  std::map<int, int> remap;
  int next = 1;
  for (auto& [label, _] : count) remap[label] = next++;
  for (auto& t : pd.crossings)
    for (int s = 0; s < 4; ++s) t.arc[s] = remap[t.arc[s]];

  euler_check(pd);
}

}  // namespace pd_detail

inline int PdCode::component_count() const {
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& t : crossings)
    for (int s = 0; s < 4; ++s) parent.emplace(t.arc[s], t.arc[s]);
  for (const auto& t : crossings) {
    unite(t.arc[0], t.arc[2]);
    unite(t.arc[1], t.arc[3]);
  }
  std::set<int> roots;
  for (auto& [a, _] : parent) roots.insert(find(a));
  return static_cast<int>(roots.size() + unknot_ccw.size());
}

inline std::string PdCode::canonical_text() const {
  std::string out = "PD[";
  for (size_t k = 0; k < crossings.size(); ++k) {
    if (k) out += ",";
    out += "X[";
    for (int s = 0; s < 4; ++s) {
      if (s) out += ",";
      out += std::to_string(crossings[k].arc[s]);
    }
    out += "]";
  }
  out += "]";
  for (bool ccw : unknot_ccw) out += ccw ? ";O[ccw]" : ";O[cw]";
  return out;
}

// Grammar: PD[X[a,b,c,d],...] with optional ;O[cw] / ;O[ccw] suffix entries.
inline PdCode parse_pd_text(const std::string& text) {
  PdCode pd;
  size_t i = 0;
  pd_detail::skip_ws(text, i);
  if (text.compare(i, 3, "PD[") != 0)
    throw input_error("PD parse error: input must start with PD[");
  i += 3;
  if (!pd_detail::eat(text, i, ']')) {
    for (;;) {
      pd_detail::skip_ws(text, i);
      if (text.compare(i, 2, "X[") != 0)
        throw input_error("PD parse error at position " + std::to_string(i) +
                          ": expected X[");
      i += 2;
      PdTuple t{};
      for (int s = 0; s < 4; ++s) {
        t.arc[s] = pd_detail::parse_int(text, i);
        if (t.arc[s] <= 0) throw input_error("arc labels must be positive");
        if (s < 3) pd_detail::expect(text, i, ',');
      }
      pd_detail::expect(text, i, ']');
      pd.crossings.push_back(t);
      if (pd_detail::eat(text, i, ']')) break;
      pd_detail::expect(text, i, ',');
    }
  }
  while (pd_detail::eat(text, i, ';')) {
    pd_detail::skip_ws(text, i);
    if (text.compare(i, 2, "O[") != 0)
      throw input_error("PD parse error: expected O[cw] or O[ccw]");
    i += 2;
    if (text.compare(i, 3, "cw]") == 0) {
      pd.unknot_ccw.push_back(false);
      i += 3;
    } else if (text.compare(i, 4, "ccw]") == 0) {
      pd.unknot_ccw.push_back(true);
      i += 4;
    } else {
      throw input_error("PD parse error: orientation token must be cw or ccw");
    }
  }
  pd_detail::skip_ws(text, i);
  if (i != text.size())
    throw input_error("PD parse error: trailing input at position " +
                      std::to_string(i));
  pd_detail::validate_and_normalize(pd);
  return pd;
}

// {"crossings":[[a,b,c,d],...],"unknots":["cw","ccw"],"outer_face":k}
inline PdCode parse_pd_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("PD JSON parse error: ") + e.what());
  }
  PdCode pd;
  if (!j.is_object() || !j.contains("crossings"))
    throw input_error("PD JSON must be an object with a \"crossings\" array");
  for (const auto& row : j["crossings"]) {
    if (!row.is_array() || row.size() != 4)
      throw input_error("each crossing must be an array of 4 arc labels");
    PdTuple t{};
    for (int s = 0; s < 4; ++s) {
      t.arc[s] = row[s].get<int>();
      if (t.arc[s] <= 0) throw input_error("arc labels must be positive");
    }
    pd.crossings.push_back(t);
  }
  if (j.contains("unknots"))
    for (const auto& o : j["unknots"]) {
      std::string tok = o.get<std::string>();
      if (tok == "cw")
        pd.unknot_ccw.push_back(false);
      else if (tok == "ccw")
        pd.unknot_ccw.push_back(true);
      else
        throw input_error("unknot orientation must be \"cw\" or \"ccw\"");
    }
  if (j.contains("outer_face")) pd.outer_face = j["outer_face"].get<int>();
  pd_detail::validate_and_normalize(pd);
  return pd;
}

// Accepts either the PD[...] text grammar or the JSON equivalent.
inline PdCode parse_pd(const std::string& text) {
  size_t i = 0;
  pd_detail::skip_ws(text, i);
  if (i < text.size() && text[i] == '{') return parse_pd_json(text);
  return parse_pd_text(text);
}

}  // namespace khor
