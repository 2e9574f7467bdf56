#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "zofd/directions.hpp"
#include "zofd/errors.hpp"

namespace zofd {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_direction_csv(std::ostream& out, const DirectionMatrix& p, std::uint64_t seed) {
  out << "d,ell,kind,seed\n";
  out << p.dim() << ',' << p.ell() << ',' << to_string(p.kind()) << ',' << seed << '\n';
  for (Eigen::Index j = 0; j < p.ell(); ++j) {
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
      if (i != 0) out << ',';
      out << format_value(p.matrix()(i, j));
    }
    out << '\n';
  }
}

DirectionDump read_direction_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "d,ell,kind,seed") {
    throw ParameterError("direction dump: missing `d,ell,kind,seed` header");
  }
  if (!std::getline(in, line)) throw ParameterError("direction dump: missing metadata line");
  const auto meta = split_line(line);
  if (meta.size() != 4) throw ParameterError("direction dump: malformed metadata line");
  const int d = std::stoi(meta[0]);
  const int ell = std::stoi(meta[1]);
  const DirectionKind kind = parse_direction_kind(meta[2]);
  const std::uint64_t seed = std::stoull(meta[3]);
  if (d < 1 || ell < 1 || ell > d) throw DimensionError("direction dump: invalid d/ell");

  Eigen::MatrixXd m(d, ell);
  for (int j = 0; j < ell; ++j) {
    if (!std::getline(in, line)) throw ParameterError("direction dump: missing column line");
    const auto values = split_line(line);
    if (values.size() != static_cast<std::size_t>(d)) {
      throw DimensionError("direction dump: column " + std::to_string(j) + " has wrong length");
    }
    for (int i = 0; i < d; ++i) m(i, j) = std::stod(values[static_cast<std::size_t>(i)]);
  }
  return DirectionDump{DirectionMatrix(std::move(m), kind), seed};
}

}  // namespace zofd
