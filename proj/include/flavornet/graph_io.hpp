#pragma once

// Text formats for bipartite edge lists, weighted networks and degree
// histograms.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"

namespace flavornet {

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

/// Reads `ingredient<TAB>compound` rows. Lines starting with '#' and blank
/// lines are skipped.
inline BipartiteGraph load_bipartite(std::istream& in) {
  BipartiteGraph g;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "expected 'ingredient<TAB>compound'");
    }
    try {
      g.add_edge(std::string(fields[0]), std::string(fields[1]));
    } catch (const IntegrityError& e) {
      throw IntegrityError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return g;
}

inline BipartiteGraph load_bipartite_file(const std::string& path) {
  auto in = detail::open_input(path);
  return load_bipartite(in);
}

inline void write_bipartite(std::ostream& out, const BipartiteGraph& g) {
  out << "#ingredient\tcompound\n";
  for (const auto& [ing, comp] : g.edges()) out << ing << '\t' << comp << '\n';
}

/// `#nodes<TAB>n`, then one `#node<TAB>id` per isolated node, then
/// `a<TAB>b<TAB>weight` per edge.
inline void write_network(std::ostream& out, const Network& n) {
  out << "#nodes\t" << n.node_count() << '\n';
  for (const auto& id : n.nodes()) {
    if (n.degree(id) == 0) out << "#node\t" << id << '\n';
  }
  n.for_each_edge([&](const NodeId& a, const NodeId& b, double w) {
    out << a << '\t' << b << '\t' << format_number(w) << '\n';
  });
}

inline Network read_network(std::istream& in) {
  Network n;
  std::string raw;
  std::size_t line_no = 0;
  long long declared = -1;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty()) continue;
    auto fields = detail::split(line, '\t');
    if (line.front() == '#') {
      if (fields[0] == "#nodes" && fields.size() == 2) {
        declared = static_cast<long long>(detail::parse_double(fields[1], line_no));
      } else if (fields[0] == "#node" && fields.size() == 2 && !fields[1].empty()) {
        n.add_node(std::string(fields[1]));
      }
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "expected 'node_a<TAB>node_b<TAB>weight'");
    }
    double w = detail::parse_double(fields[2], line_no);
    if (!(w > 0.0)) throw ParseError(line_no, "edge weight must be positive");
    if (fields[0] == fields[1]) throw ParseError(line_no, "self-loop");
    n.set_edge(std::string(fields[0]), std::string(fields[1]), w);
  }
  if (declared >= 0 && static_cast<std::size_t>(declared) != n.node_count()) {
    throw IntegrityError("network declares " + std::to_string(declared) + " nodes but lists " +
                         std::to_string(n.node_count()));
  }
  return n;
}

inline Network read_network_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_network(in);
}

inline void write_network_file(const std::string& path, const Network& n) {
  auto out = detail::open_output(path);
  write_network(out, n);
}

inline void write_histogram_csv(std::ostream& out, const DegreeHistogram& h) {
  out << "degree,count\n";
  for (const auto& [deg, count] : h.counts) out << deg << ',' << count << '\n';
}

inline nlohmann::json histogram_summary_json(const DegreeHistogram& h) {
  return {{"nodes", h.nodes},
          {"edges", h.edges},
          {"mean_degree", h.mean_degree},
          {"density", h.density}};
}

}  // namespace flavornet
