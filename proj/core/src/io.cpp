#include "gtlab/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gtlab {

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    return true;
  }
  return false;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

}  // namespace

Instance parse_instance(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw std::invalid_argument("instance: missing 'T n' header");
  std::istringstream header(line);
  long long T = -1;
  long long n = -1;
  if (!(header >> T >> n) || T < 0 || n < 1)
    throw std::invalid_argument("instance: malformed 'T n' header: " + line);

  std::vector<std::string> rows;
  rows.reserve(static_cast<std::size_t>(T));
  for (long long t = 0; t < T; ++t) {
    if (!next_content_line(in, line))
      throw std::invalid_argument("instance: expected " + std::to_string(T) + " rows, got " +
                                  std::to_string(t));
    std::string row;
    for (char c : line)
      if (c != ' ' && c != '\t') row.push_back(c);
    if (row.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("instance: row " + std::to_string(t) + " has length " +
                                  std::to_string(row.size()) + ", expected " + std::to_string(n));
    rows.push_back(std::move(row));
  }

  Instance inst;
  if (T == 0) {
    inst.X = std::move(TestMatrixBuilder(0, static_cast<std::size_t>(n))).build();
  } else {
    inst.X = TestMatrix::from_rows(rows);
  }
  if (next_content_line(in, line)) {
    auto y = parse_outcomes(line);
    if (y.size() != static_cast<std::size_t>(T))
      throw std::invalid_argument("instance: outcome line has " + std::to_string(y.size()) +
                                  " entries, expected " + std::to_string(T));
    inst.y = std::move(y);
  }
  return inst;
}

Instance read_instance(const std::string& path) {
  auto in = open_or_throw(path);
  try {
    return parse_instance(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_instance(std::ostream& out, const TestMatrix& X, const OutcomeVector* y) {
  out << X.num_tests() << ' ' << X.num_items() << '\n';
  for (std::size_t t = 0; t < X.num_tests(); ++t) out << X.row_string(t) << '\n';
  if (y) out << format_outcomes(*y) << '\n';
}

OutcomeVector parse_outcomes(const std::string& text) {
  OutcomeVector y;
  for (char c : text) {
    switch (c) {
      case '0': y.push_back(Outcome::negative); break;
      case '1': y.push_back(Outcome::positive); break;
      case '?': y.push_back(Outcome::erased); break;
      case ' ': case '\t': case ',': case '\n': case '\r': break;
      default:
        throw std::invalid_argument(std::string("outcomes: unexpected character '") + c + "'");
    }
  }
  return y;
}

OutcomeVector read_outcomes(const std::string& path) {
  auto in = open_or_throw(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_outcomes(ss.str());
}

std::string format_outcomes(const OutcomeVector& y) {
  std::string s;
  s.reserve(y.size());
  for (Outcome o : y) s.push_back(o == Outcome::negative ? '0' : o == Outcome::positive ? '1' : '?');
  return s;
}

}  // namespace gtlab
