#pragma once

#include "qmst/graph.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qmst {

enum class Family { CP1, CP2, CP3, CP4, OPsym, OPvsym, OPesym, SV };

std::string_view family_name(Family f);
/// Case-sensitive match against family_name(); throws InvalidArgument.
Family parse_family(std::string_view name);
/// OP families are defined on complete graphs only.
bool family_requires_complete_graph(Family f);

struct InstanceSpec {
  Family family = Family::CP1;
  int n = 10;
  int density = 100;  // percent of the n(n-1)/2 possible edges
  std::uint64_t seed = 0;
  // Maximum diagonal / off-diagonal costs for the SV family.
  double cmax_diag = 100.0;
  double cmax_off = 100.0;
};

/// Side data recorded by the generators. Not serialized.
struct GenerationInfo {
  std::vector<std::array<double, 2>> coordinates;  // OPesym vertex positions
  std::vector<double> vertex_weights;              // OPvsym w(i)
  std::vector<int> high_edges;                     // SV edges with high mutual interaction
};

struct Instance {
  Graph graph;
  Matrix q;  // symmetric m x m, diagonal = linear edge costs
  std::optional<double> ub;
  std::optional<InstanceSpec> meta;
  GenerationInfo info;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Checks that q is a finite symmetric m x m matrix for g.
void validate_costs(const Graph& g, const Matrix& q);

/// Uniform edge set of size round(d * n(n-1)/2), resampled until connected.
Graph random_connected_graph(int n, int density, std::mt19937_64& rng, int max_attempts = 1000);

/// Deterministic in (family, n, density, seed, cmax_*).
Instance generate(const InstanceSpec& spec);

/// Canonical text format:
///   QMST 1
///   n m [ub]
///   m lines "i j"        (1-based endpoints, define the edge order)
///   m lines of m reals   (rows of Q)
/// Lines starting with '#' are comments.
void write_instance(const Instance& inst, std::ostream& out);
void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(std::istream& in);
Instance read_instance(const std::filesystem::path& path);

/// [[Q, 0], [0, 0]] of size (m+1) x (m+1).
Matrix pad_cost(const Matrix& q);

/// x^T Q x for an edge incidence vector.
double tree_cost(const Matrix& q, const Vector& x);

}  // namespace qmst
