#include "emtr/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>

namespace emtr {

double characteristic_impedance(const LineParams& p) {
  return std::sqrt(p.inductance_per_m / p.capacitance_per_m);
}

double propagation_speed(const LineParams& p) {
  return 1.0 / std::sqrt(p.inductance_per_m * p.capacitance_per_m);
}

namespace {

std::string locate(const std::string& what, int line, int column) {
  if (line <= 0) return what;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}

struct Token {
  std::string_view text;
  int column = 0;
};

struct Statement {
  int line = 0;
  std::vector<Token> tokens;
};

std::vector<Statement> tokenize(std::string_view text) {
  std::vector<Statement> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Statement st{line_no, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      const auto start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      st.tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    if (!st.tokens.empty()) out.push_back(std::move(st));
    pos = end + 1;
  }
  return out;
}

double parse_number(std::string_view s, int line, int column) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(locate("invalid number '" + std::string(s) + "'", line, column), line, column);
  }
  return v;
}

double parse_length(std::string_view s, int line, int column) {
  double scale = 0.0;
  std::string_view digits;
  if (s.size() > 2 && s.substr(s.size() - 2) == "km") {
    scale = 1000.0;
    digits = s.substr(0, s.size() - 2);
  } else if (s.size() > 1 && s.back() == 'm') {
    scale = 1.0;
    digits = s.substr(0, s.size() - 1);
  } else {
    throw ConfigError(locate("length '" + std::string(s) + "' needs a unit suffix (m or km)", line, column),
                      line, column);
  }
  return parse_number(digits, line, column) * scale;
}

// key=value arguments of one statement, with the column of each value.
class KeyValues {
 public:
  KeyValues(const Statement& st, std::size_t first) : line_(st.line) {
    for (std::size_t i = first; i < st.tokens.size(); ++i) {
      const auto& tok = st.tokens[i];
      const auto eq = tok.text.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError(locate("expected key=value, got '" + std::string(tok.text) + "'", line_, tok.column),
                          line_, tok.column);
      }
      const auto key = std::string(tok.text.substr(0, eq));
      if (values_.count(key) != 0) {
        throw ConfigError(locate("duplicate key '" + key + "'", line_, tok.column), line_, tok.column);
      }
      values_[key] = {tok.text.substr(eq + 1), tok.column + static_cast<int>(eq) + 1};
    }
  }

  Token take(const std::string& key, int stmt_column) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      throw ConfigError(locate("missing " + key + "=", line_, stmt_column), line_, stmt_column);
    }
    auto tok = it->second;
    values_.erase(it);
    return tok;
  }

  double number(const std::string& key, int stmt_column) {
    const auto tok = take(key, stmt_column);
    return parse_number(tok.text, line_, tok.column);
  }

  void expect_empty() const {
    if (!values_.empty()) {
      const auto& [key, tok] = *values_.begin();
      throw ConfigError(locate("unknown key '" + key + "'", line_, tok.column - static_cast<int>(key.size()) - 1),
                        line_, tok.column);
    }
  }

 private:
  int line_;
  std::map<std::string, Token> values_;
};

struct NodeRef {
  std::string id;
  int line = 0;
  int column = 0;
};

struct RawEdge {
  std::string id;
  NodeRef a, b;
  double length = 0.0;
  NodeRef params;  // params set name, reusing NodeRef for its position
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(const std::string& what, int line, int column)
    : std::runtime_error(what), line_(line), column_(column) {}

std::size_t NetworkTopology::node_index(std::string_view id) const {
  const auto it = std::find(node_ids.begin(), node_ids.end(), id);
  if (it == node_ids.end()) throw ConfigError("unknown node '" + std::string(id) + "'");
  return static_cast<std::size_t>(it - node_ids.begin());
}

std::size_t NetworkTopology::edge_index(std::string_view id) const {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].id == id) return e;
  }
  throw ConfigError("unknown edge '" + std::string(id) + "'");
}

std::size_t NetworkTopology::degree(std::size_t node) const {
  std::size_t d = 0;
  for (const auto& e : edges) d += static_cast<std::size_t>(e.a == node) + static_cast<std::size_t>(e.b == node);
  return d;
}

MultiGraph NetworkTopology::graph() const {
  std::vector<MultiGraph::EdgeEnds> ends;
  ends.reserve(edges.size());
  for (const auto& e : edges) ends.emplace_back(e.a, e.b);
  return MultiGraph(node_ids.size(), std::move(ends));
}

double NetworkTopology::termination_at(std::size_t node) const {
  for (const auto& t : terminations) {
    if (t.node == node) return t.impedance;
  }
  return 0.0;
}

void NetworkTopology::validate() const {
  const auto n = node_ids.size();
  if (n == 0) throw ConfigError("network has no nodes");
  for (const auto& e : edges) {
    if (e.a >= n || e.b >= n) throw ConfigError("edge '" + e.id + "' references an unknown node");
    if (e.a == e.b) throw ConfigError("edge '" + e.id + "' is a self-loop");
    if (!(e.length > 0.0)) throw ConfigError("edge '" + e.id + "' must have positive length");
    const auto& p = e.params;
    if (!(p.inductance_per_m > 0.0) || !(p.capacitance_per_m > 0.0) || !(p.resistance_per_m >= 0.0)) {
      throw ConfigError("edge '" + e.id + "' has invalid line parameters (need L>0, C>0, R>=0)");
    }
  }
  if (edges.empty() || !graph().is_connected()) throw ConfigError("disconnected graph");

  std::vector<int> terminated(n, 0);
  for (const auto& t : terminations) {
    if (t.node >= n) throw ConfigError("termination references an unknown node");
    if (!(t.impedance > 0.0)) throw ConfigError("termination at node '" + node_ids[t.node] + "' must be > 0");
    if (++terminated[t.node] > 1) throw ConfigError("node '" + node_ids[t.node] + "' has more than one termination");
  }
  for (std::size_t v = 0; v < n; ++v) {
    // The source's series resistance terminates the node it feeds.
    if (degree(v) == 1 && terminated[v] == 0 && v != source.node) {
      throw ConfigError("degree-1 node '" + node_ids[v] + "' has no termination");
    }
  }
  if (source.node >= n) throw ConfigError("source references an unknown node");
  if (!(source.amplitude >= 0.0)) throw ConfigError("source amplitude must be >= 0");
  if (!(source.frequency > 0.0)) throw ConfigError("source frequency must be > 0");
  if (!(source.series_impedance > 0.0)) throw ConfigError("source series_R must be > 0");
  if (observation_node >= n) throw ConfigError("observation node is unknown");
}

NetworkTopology parse_network(std::string_view text) {
  NetworkTopology net;
  std::map<std::string, LineParams> params;
  std::vector<RawEdge> raw_edges;
  std::vector<std::pair<NodeRef, double>> raw_terms;
  std::optional<std::pair<NodeRef, SourceSpec>> raw_source;
  std::optional<NodeRef> raw_observe;

  auto need = [](const Statement& st, std::size_t count, const char* usage) {
    if (st.tokens.size() < count) {
      const auto col = st.tokens.back().column + static_cast<int>(st.tokens.back().text.size());
      throw ConfigError(locate(std::string("expected ") + usage, st.line, col), st.line, col);
    }
  };
  auto ref = [](const Statement& st, std::size_t i) {
    return NodeRef{std::string(st.tokens[i].text), st.line, st.tokens[i].column};
  };

  for (const auto& st : tokenize(text)) {
    const auto kw = st.tokens[0].text;
    const int kw_col = st.tokens[0].column;
    if (kw == "node") {
      need(st, 2, "node <id>");
      if (st.tokens.size() > 2) {
        throw ConfigError(locate("unexpected token", st.line, st.tokens[2].column), st.line, st.tokens[2].column);
      }
      const auto id = std::string(st.tokens[1].text);
      if (std::find(net.node_ids.begin(), net.node_ids.end(), id) != net.node_ids.end()) {
        throw ConfigError(locate("duplicate node '" + id + "'", st.line, st.tokens[1].column), st.line,
                          st.tokens[1].column);
      }
      net.node_ids.push_back(id);
    } else if (kw == "params") {
      need(st, 2, "params <name> L=<H/m> C=<F/m> R=<ohm/m>");
      const auto name = std::string(st.tokens[1].text);
      if (params.count(name) != 0) {
        throw ConfigError(locate("duplicate params set '" + name + "'", st.line, st.tokens[1].column), st.line,
                          st.tokens[1].column);
      }
      KeyValues kv(st, 2);
      LineParams p{kv.number("L", kw_col), kv.number("C", kw_col), kv.number("R", kw_col)};
      kv.expect_empty();
      if (!(p.inductance_per_m > 0.0) || !(p.capacitance_per_m > 0.0) || !(p.resistance_per_m >= 0.0)) {
        throw ConfigError(locate("params '" + name + "' need L>0, C>0, R>=0", st.line, kw_col), st.line, kw_col);
      }
      params[name] = p;
    } else if (kw == "edge") {
      need(st, 4, "edge <id> <nodeA> <nodeB> length=<len><unit> params=<name>");
      RawEdge e;
      e.id = std::string(st.tokens[1].text);
      for (const auto& other : raw_edges) {
        if (other.id == e.id) {
          throw ConfigError(locate("duplicate edge '" + e.id + "'", st.line, st.tokens[1].column), st.line,
                            st.tokens[1].column);
        }
      }
      e.a = ref(st, 2);
      e.b = ref(st, 3);
      if (e.a.id == e.b.id) {
        throw ConfigError(locate("edge '" + e.id + "' is a self-loop", st.line, st.tokens[3].column), st.line,
                          st.tokens[3].column);
      }
      KeyValues kv(st, 4);
      const auto len = kv.take("length", kw_col);
      e.length = parse_length(len.text, st.line, len.column);
      if (!(e.length > 0.0)) {
        throw ConfigError(locate("length must be positive", st.line, len.column), st.line, len.column);
      }
      const auto p = kv.take("params", kw_col);
      e.params = NodeRef{std::string(p.text), st.line, p.column};
      kv.expect_empty();
      raw_edges.push_back(std::move(e));
    } else if (kw == "termination") {
      need(st, 3, "termination <node> R=<ohm>");
      KeyValues kv(st, 2);
      const auto r = kv.take("R", kw_col);
      const double value = parse_number(r.text, st.line, r.column);
      kv.expect_empty();
      if (!(value > 0.0)) {
        throw ConfigError(locate("termination impedance must be > 0", st.line, r.column), st.line, r.column);
      }
      raw_terms.emplace_back(ref(st, 1), value);
    } else if (kw == "source") {
      need(st, 2, "source <node> amplitude=<V> frequency=<Hz> series_R=<ohm>");
      if (raw_source) throw ConfigError(locate("second source", st.line, kw_col), st.line, kw_col);
      KeyValues kv(st, 2);
      SourceSpec s;
      s.amplitude = kv.number("amplitude", kw_col);
      s.frequency = kv.number("frequency", kw_col);
      s.series_impedance = kv.number("series_R", kw_col);
      kv.expect_empty();
      raw_source = std::make_pair(ref(st, 1), s);
    } else if (kw == "observe") {
      need(st, 2, "observe <node>");
      if (raw_observe) throw ConfigError(locate("second observe", st.line, kw_col), st.line, kw_col);
      raw_observe = ref(st, 1);
    } else {
      throw ConfigError(locate("unknown statement '" + std::string(kw) + "'", st.line, kw_col), st.line, kw_col);
    }
  }

  auto resolve = [&](const NodeRef& r) {
    const auto it = std::find(net.node_ids.begin(), net.node_ids.end(), r.id);
    if (it == net.node_ids.end()) {
      throw ConfigError(locate("unknown node '" + r.id + "'", r.line, r.column), r.line, r.column);
    }
    return static_cast<std::size_t>(it - net.node_ids.begin());
  };

  for (const auto& re : raw_edges) {
    Edge e;
    e.id = re.id;
    e.a = resolve(re.a);
    e.b = resolve(re.b);
    e.length = re.length;
    e.params_name = re.params.id;
    const auto it = params.find(re.params.id);
    if (it == params.end()) {
      throw ConfigError(locate("unknown params set '" + re.params.id + "'", re.params.line, re.params.column),
                        re.params.line, re.params.column);
    }
    e.params = it->second;
    net.edges.push_back(std::move(e));
  }
  for (const auto& [r, z] : raw_terms) net.terminations.push_back({resolve(r), z});
  if (!raw_source) throw ConfigError("missing source statement");
  net.source = raw_source->second;
  net.source.node = resolve(raw_source->first);
  if (!raw_observe) throw ConfigError("missing observe statement");
  net.observation_node = resolve(*raw_observe);

  net.validate();
  return net;
}

NetworkTopology load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_network(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.line(), e.column());
  }
}

std::string serialize_network(const NetworkTopology& net) {
  std::ostringstream os;
  std::vector<std::string> written;
  for (const auto& e : net.edges) {
    if (std::find(written.begin(), written.end(), e.params_name) != written.end()) continue;
    written.push_back(e.params_name);
    os << "params " << e.params_name << " L=" << format_double(e.params.inductance_per_m)
       << " C=" << format_double(e.params.capacitance_per_m) << " R=" << format_double(e.params.resistance_per_m)
       << '\n';
  }
  for (const auto& id : net.node_ids) os << "node " << id << '\n';
  for (const auto& e : net.edges) {
    os << "edge " << e.id << ' ' << net.node_ids[e.a] << ' ' << net.node_ids[e.b]
       << " length=" << format_double(e.length) << "m params=" << e.params_name << '\n';
  }
  for (const auto& t : net.terminations) {
    os << "termination " << net.node_ids[t.node] << " R=" << format_double(t.impedance) << '\n';
  }
  os << "source " << net.node_ids[net.source.node] << " amplitude=" << format_double(net.source.amplitude)
     << " frequency=" << format_double(net.source.frequency)
     << " series_R=" << format_double(net.source.series_impedance) << '\n';
  os << "observe " << net.node_ids[net.observation_node] << '\n';
  return os.str();
}

double path_length(const NetworkTopology& net, const Path& path) {
  double total = 0.0;
  for (auto e : path.edges) total += net.edges.at(e).length;
  return total;
}

EdgePosition path_to_edge_position(const NetworkTopology& net, const Path& path, double s) {
  const double total = path_length(net, path);
  if (path.edges.empty() || s < 0.0 || s > total) {
    throw std::out_of_range("path coordinate " + std::to_string(s) + " outside [0, " + std::to_string(total) + "]");
  }
  double start = 0.0;
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    const auto& edge = net.edges[path.edges[i]];
    const double end = start + edge.length;
    if (s <= end || i + 1 == path.edges.size()) {
      const double along = std::clamp(s - start, 0.0, edge.length);
      const bool forward = path.nodes[i] == edge.a;
      return {path.edges[i], forward ? along : edge.length - along};
    }
    start = end;
  }
  return {};  // unreachable
}

double edge_position_to_path(const NetworkTopology& net, const Path& path, const EdgePosition& pos) {
  double start = 0.0;
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    const auto& edge = net.edges[path.edges[i]];
    if (path.edges[i] == pos.edge) {
      const bool forward = path.nodes[i] == edge.a;
      return start + (forward ? pos.offset : edge.length - pos.offset);
    }
    start += edge.length;
  }
  throw std::invalid_argument("edge is not on the path");
}

double network_distance(const NetworkTopology& net, const EdgePosition& p, const EdgePosition& q) {
  const auto n = net.node_ids.size();
  const double inf = std::numeric_limits<double>::infinity();
  // Dijkstra from both ends of p's edge.
  auto from = [&](std::size_t src) {
    std::vector<double> dist(n, inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      const auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      for (const auto& e : net.edges) {
        if (e.a != v && e.b != v) continue;
        const auto w = e.a == v ? e.b : e.a;
        if (d + e.length < dist[w]) {
          dist[w] = d + e.length;
          pq.emplace(dist[w], w);
        }
      }
    }
    return dist;
  };
  const auto& ep = net.edges.at(p.edge);
  const auto& eq = net.edges.at(q.edge);
  double best = p.edge == q.edge ? std::abs(p.offset - q.offset) : inf;
  const auto da = from(ep.a);
  const auto db = from(ep.b);
  for (const auto& [to_node, dist] : {std::pair{ep.a, p.offset}, std::pair{ep.b, ep.length - p.offset}}) {
    const auto& table = to_node == ep.a ? da : db;
    best = std::min(best, dist + table[eq.a] + q.offset);
    best = std::min(best, dist + table[eq.b] + (eq.length - q.offset));
  }
  return best;
}

}  // namespace emtr
