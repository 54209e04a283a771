#include "tilefuse/matrix_market.hpp"

#include <cctype>
#include <sstream>

namespace tilefuse::detail {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

}  // namespace

MmTriplets parse_matrix_market(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) fail(origin, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(origin, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail(origin, "unsupported object '" + object + "'");
  if (format != "coordinate") fail(origin, "only coordinate format is supported");
  const bool pattern = field == "pattern";
  if (field != "real" && field != "integer" && !pattern)
    fail(origin, "unsupported field '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (symmetry != "general" && !symmetric)
    fail(origin, "unsupported symmetry '" + symmetry + "'");

  // Skip comments and blank lines up to the size line.
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    break;
  }
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, declared = -1;
  size_line >> rows >> cols >> declared;
  if (!size_line || rows < 0 || cols < 0 || declared < 0)
    fail(origin, "malformed size line '" + line + "'");
  if (rows > std::numeric_limits<index_t>::max() ||
      cols > std::numeric_limits<index_t>::max())
    fail(origin, "matrix dimensions exceed index range");

  MmTriplets out;
  out.n_rows = static_cast<index_t>(rows);
  out.n_cols = static_cast<index_t>(cols);
  out.entries.reserve(static_cast<std::size_t>(declared) * (symmetric ? 2 : 1));

  long long seen = 0;
  while (seen < declared) {
    if (!std::getline(in, line)) fail(origin, "unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 1.0;
    entry >> i >> j;
    if (!entry) fail(origin, "malformed entry '" + line + "'");
    if (!pattern) {
      entry >> v;
      if (!entry) fail(origin, "missing value in entry '" + line + "'");
    }
    if (i < 1 || i > rows || j < 1 || j > cols)
      fail(origin, "index out of range in entry '" + line + "'");
    const auto r = static_cast<index_t>(i - 1);
    const auto c = static_cast<index_t>(j - 1);
    out.entries.push_back({r, c, v});
    if (symmetric && r != c) out.entries.push_back({c, r, v});
    ++seen;
  }
  return out;
}

}  // namespace tilefuse::detail
