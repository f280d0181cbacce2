#include "qmst/instances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <locale>
#include <ostream>
#include <sstream>

namespace qmst {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 8> kFamilyNames{{
    {Family::CP1, "CP1"},
    {Family::CP2, "CP2"},
    {Family::CP3, "CP3"},
    {Family::CP4, "CP4"},
    {Family::OPsym, "OPsym"},
    {Family::OPvsym, "OPvsym"},
    {Family::OPesym, "OPesym"},
    {Family::SV, "SV"},
}};

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  // Closed interval [lo, hi].
  return std::uniform_real_distribution<double>(lo, std::nextafter(hi, hi + 1.0))(rng);
}

void fill_symmetric(Matrix& q, auto&& entry) {
  for (int e = 0; e < q.rows(); ++e) {
    for (int f = e; f < q.cols(); ++f) {
      q(e, f) = entry(e, f);
      q(f, e) = q(e, f);
    }
  }
}

}  // namespace

std::string_view family_name(Family f) {
  for (const auto& [family, name] : kFamilyNames) {
    if (family == f) return name;
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (const auto& [family, label] : kFamilyNames) {
    if (label == name) return family;
  }
  throw InvalidArgument("unknown instance family '" + std::string(name) + "'");
}

bool family_requires_complete_graph(Family f) {
  return f == Family::OPsym || f == Family::OPvsym || f == Family::OPesym;
}

ParseError::ParseError(int line, int column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

void validate_costs(const Graph& g, const Matrix& q) {
  if (q.rows() != g.m() || q.cols() != g.m()) {
    throw InvalidArgument("cost matrix must be " + std::to_string(g.m()) + "x" +
                          std::to_string(g.m()));
  }
  if (!q.allFinite()) throw InvalidArgument("cost matrix has non-finite entries");
  for (int e = 0; e < q.rows(); ++e) {
    for (int f = e + 1; f < q.cols(); ++f) {
      const double scale = std::max({1.0, std::abs(q(e, f)), std::abs(q(f, e))});
      if (std::abs(q(e, f) - q(f, e)) > 1e-12 * scale) {
        throw InvalidArgument("cost matrix is not symmetric at (" + std::to_string(e + 1) + "," +
                              std::to_string(f + 1) + ")");
      }
    }
  }
}

Graph random_connected_graph(int n, int density, std::mt19937_64& rng, int max_attempts) {
  if (n < 3) throw InvalidArgument("random graph needs n >= 3");
  if (density < 1 || density > 100) throw InvalidArgument("density must be in 1..100 percent");
  std::vector<Edge> all;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) all.push_back({u, v});
  }
  const auto count = static_cast<size_t>(std::lround(density / 100.0 * static_cast<double>(all.size())));
  if (count < static_cast<size_t>(n - 1)) {
    throw InvalidArgument("density " + std::to_string(density) + "% gives " + std::to_string(count) +
                          " edges, fewer than n-1; no connected graph exists");
  }
  if (count == all.size()) return Graph(n, std::move(all));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Edge> pool = all;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(count);
    Graph g = Graph::lexicographic(n, std::move(pool));
    if (g.is_connected()) return g;
  }
  throw Error("no connected graph found after " + std::to_string(max_attempts) + " attempts");
}

Instance generate(const InstanceSpec& spec) {
  if (spec.n < 3) throw InvalidArgument("instances need n >= 3");
  if (family_requires_complete_graph(spec.family) && spec.density != 100) {
    throw InvalidArgument(std::string(family_name(spec.family)) + " instances are complete graphs; density must be 100");
  }
  std::mt19937_64 rng(spec.seed);
  Instance inst;
  inst.meta = spec;
  inst.graph = random_connected_graph(spec.n, spec.density, rng);
  const Graph& g = inst.graph;
  const int m = g.m();
  inst.q = Matrix::Zero(m, m);

  auto cp = [&](int diag_max, int off_max) {
    fill_symmetric(inst.q, [&](int e, int f) {
      return static_cast<double>(uniform_int(rng, 1, e == f ? diag_max : off_max));
    });
  };

  switch (spec.family) {
    case Family::CP1: cp(10, 10); break;
    case Family::CP2: cp(10, 100); break;
    case Family::CP3: cp(100, 10); break;
    case Family::CP4: cp(100, 100); break;
    case Family::OPsym: cp(100, 20); break;
    case Family::OPvsym: {
      auto& w = inst.info.vertex_weights;
      for (int i = 0; i < spec.n; ++i) w.push_back(uniform_int(rng, 1, 10));
      fill_symmetric(inst.q, [&](int e, int f) {
        if (e == f) return static_cast<double>(uniform_int(rng, 1, 10000));
        const Edge& a = g.edge(e);
        const Edge& b = g.edge(f);
        return w[a.u] * w[a.v] * w[b.u] * w[b.v];
      });
      break;
    }
    case Family::OPesym: {
      auto& xy = inst.info.coordinates;
      for (int i = 0; i < spec.n; ++i) xy.push_back({uniform_real(rng, 0, 100), uniform_real(rng, 0, 100)});
      auto midpoint = [&](int k) {
        const Edge& e = g.edge(k);
        return std::array<double, 2>{(xy[e.u][0] + xy[e.v][0]) / 2, (xy[e.u][1] + xy[e.v][1]) / 2};
      };
      fill_symmetric(inst.q, [&](int e, int f) {
        if (e == f) {
          const Edge& a = g.edge(e);
          return std::hypot(xy[a.u][0] - xy[a.v][0], xy[a.u][1] - xy[a.v][1]);
        }
        const auto p = midpoint(e);
        const auto r = midpoint(f);
        return std::hypot(p[0] - r[0], p[1] - r[1]);
      });
      break;
    }
    case Family::SV: {
      const int high = std::max(1, static_cast<int>(std::lround(0.1 * m)));
      std::vector<int> ids(m);
      for (int k = 0; k < m; ++k) ids[k] = k;
      std::shuffle(ids.begin(), ids.end(), rng);
      std::vector<char> is_high(m, 0);
      for (int k = 0; k < high; ++k) is_high[ids[k]] = 1;
      for (int k = 0; k < m; ++k) {
        if (is_high[k]) inst.info.high_edges.push_back(k);
      }
      fill_symmetric(inst.q, [&](int e, int f) {
        if (e == f) return uniform_real(rng, 0.0, 0.2) * spec.cmax_diag;
        if (is_high[e] && is_high[f]) return uniform_real(rng, 0.9, 1.0) * spec.cmax_off;
        if (is_high[e] || is_high[f]) return uniform_real(rng, 0.2, 0.4) * spec.cmax_off;
        return uniform_real(rng, 0.5, 0.7) * spec.cmax_off;
      });
      break;
    }
  }
  return inst;
}

void write_instance(const Instance& inst, std::ostream& out) {
  const Graph& g = inst.graph;
  validate_costs(g, inst.q);
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "QMST 1\n";
  if (inst.meta) {
    out << "# family " << family_name(inst.meta->family) << " n " << inst.meta->n << " density "
        << inst.meta->density << " seed " << inst.meta->seed << "\n";
  }
  out << g.n() << ' ' << g.m();
  if (inst.ub) out << ' ' << *inst.ub;
  out << '\n';
  for (const Edge& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
  for (int e = 0; e < g.m(); ++e) {
    for (int f = 0; f < g.m(); ++f) {
      if (f) out << ' ';
      out << inst.q(e, f);
    }
    out << '\n';
  }
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_instance(inst, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

struct Token {
  std::string_view text;
  int column;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-comment, non-blank line split into tokens; false at EOF.
  bool next(std::vector<Token>& tokens) {
    while (std::getline(in_, line_)) {
      ++number_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      const auto first = line_.find_first_not_of(" \t");
      if (first == std::string::npos || line_[first] == '#') continue;
      tokens.clear();
      size_t pos = 0;
      while (pos < line_.size()) {
        pos = line_.find_first_not_of(" \t", pos);
        if (pos == std::string::npos) break;
        size_t end = line_.find_first_of(" \t", pos);
        if (end == std::string::npos) end = line_.size();
        tokens.push_back({std::string_view(line_).substr(pos, end - pos), static_cast<int>(pos) + 1});
        pos = end;
      }
      return true;
    }
    return false;
  }

  int line() const { return number_; }
  int end_column() const { return static_cast<int>(line_.size()) + 1; }

 private:
  std::istream& in_;
  std::string line_;
  int number_ = 0;
};

template <typename T>
T parse_number(const Token& tok, int line, const char* what) {
  T value{};
  const char* begin = tok.text.data();
  const char* end = begin + tok.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, tok.column, std::string("expected ") + what + ", got '" + std::string(tok.text) + "'");
  }
  return value;
}

}  // namespace

Instance read_instance(std::istream& in) {
  LineReader reader(in);
  std::vector<Token> tok;
  if (!reader.next(tok)) throw ParseError(reader.line() + 1, 1, "empty input, expected 'QMST 1'");
  if (tok.size() != 2 || tok[0].text != "QMST") {
    throw ParseError(reader.line(), tok.empty() ? 1 : tok[0].column, "bad header, expected 'QMST 1'");
  }
  if (tok[1].text != "1") throw ParseError(reader.line(), tok[1].column, "unsupported format version");

  if (!reader.next(tok)) throw ParseError(reader.line() + 1, 1, "missing 'n m [ub]' line");
  if (tok.size() < 2 || tok.size() > 3) {
    throw ParseError(reader.line(), tok.empty() ? 1 : tok[0].column, "expected 'n m [ub]'");
  }
  const int n = parse_number<int>(tok[0], reader.line(), "vertex count");
  const int m = parse_number<int>(tok[1], reader.line(), "edge count");
  if (n < 1) throw ParseError(reader.line(), tok[0].column, "vertex count must be positive");
  if (m < 0 || m > n * (n - 1) / 2) throw ParseError(reader.line(), tok[1].column, "edge count out of range");
  Instance inst;
  if (tok.size() == 3) inst.ub = parse_number<double>(tok[2], reader.line(), "upper bound");

  std::vector<Edge> edges;
  for (int k = 0; k < m; ++k) {
    if (!reader.next(tok)) throw ParseError(reader.line() + 1, 1, "missing edge line " + std::to_string(k + 1));
    if (tok.size() != 2) throw ParseError(reader.line(), tok[0].column, "expected 'i j'");
    const int i = parse_number<int>(tok[0], reader.line(), "vertex id");
    const int j = parse_number<int>(tok[1], reader.line(), "vertex id");
    if (i < 1 || i > n) throw ParseError(reader.line(), tok[0].column, "vertex id out of range");
    if (j < 1 || j > n) throw ParseError(reader.line(), tok[1].column, "vertex id out of range");
    edges.push_back({i - 1, j - 1});
  }
  try {
    inst.graph = Graph(n, std::move(edges));
  } catch (const InvalidArgument& e) {
    throw ParseError(reader.line(), 1, e.what());
  }

  inst.q.resize(m, m);
  for (int e = 0; e < m; ++e) {
    if (!reader.next(tok)) throw ParseError(reader.line() + 1, 1, "missing cost row " + std::to_string(e + 1));
    if (static_cast<int>(tok.size()) != m) {
      const int col = static_cast<int>(tok.size()) > m ? tok[m].column : reader.end_column();
      throw ParseError(reader.line(), col, "expected " + std::to_string(m) + " costs in row " + std::to_string(e + 1));
    }
    for (int f = 0; f < m; ++f) inst.q(e, f) = parse_number<double>(tok[f], reader.line(), "real cost");
  }
  if (reader.next(tok)) throw ParseError(reader.line(), tok[0].column, "trailing data after cost matrix");
  try {
    validate_costs(inst.graph, inst.q);
  } catch (const InvalidArgument& e) {
    throw ParseError(reader.line(), 1, e.what());
  }
  inst.q = 0.5 * (inst.q + inst.q.transpose()).eval();
  return inst;
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_instance(in);
}

Matrix pad_cost(const Matrix& q) {
  if (q.rows() != q.cols()) throw InvalidArgument("cost matrix must be square");
  const Eigen::Index m = q.rows();
  Matrix out = Matrix::Zero(m + 1, m + 1);
  out.topLeftCorner(m, m) = q;
  return out;
}

double tree_cost(const Matrix& q, const Vector& x) {
  return x.dot(q * x);
}

}  // namespace qmst
