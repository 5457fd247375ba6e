#include "stackelberg/fisher_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace stackelberg {

namespace {

std::string Format(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

[[noreturn]] void Fail(int line, const std::string& msg) {
  std::ostringstream os;
  os << "market line " << line << ": " << msg;
  throw Error(ErrorKind::kIo, os.str());
}

// Next non-blank, non-comment line split into tokens.
std::vector<std::string> NextRow(std::istream& in, int& line) {
  std::string text;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    std::istringstream fields(text);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    return tokens;
  }
  Fail(line + 1, "unexpected end of input");
}

double ParseNumber(const std::string& tok, int line) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || errno == ERANGE) Fail(line, "bad number '" + tok + "'");
  return value;
}

int ParseCount(const std::string& tok, int line) {
  char* end = nullptr;
  const long value = std::strtol(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || value < 1 || value > 1'000'000) {
    Fail(line, "bad count '" + tok + "'");
  }
  return static_cast<int>(value);
}

void ExpectFields(const std::vector<std::string>& row, std::size_t n, int line) {
  if (row.size() != n) {
    std::ostringstream os;
    os << "expected " << n << " fields, found " << row.size();
    Fail(line, os.str());
  }
}

}  // namespace

void WriteMarket(std::ostream& out, const FisherMarket& market) {
  out << market.buyers() << ' ' << market.goods() << ' ' << ToString(market.kind()) << '\n';
  for (int i = 0; i < market.buyers(); ++i) {
    out << Format(market.budgets()[i]);
    for (int j = 0; j < market.goods(); ++j) out << ' ' << Format(market.valuations()(i, j));
    out << '\n';
  }
  for (int j = 0; j < market.goods(); ++j) {
    out << (j ? " " : "") << Format(market.supplies()[j]);
  }
  out << '\n';
}

FisherMarket ReadMarket(std::istream& in) {
  int line = 0;
  const auto header = NextRow(in, line);
  ExpectFields(header, 3, line);
  const int n = ParseCount(header[0], line);
  const int m = ParseCount(header[1], line);
  UtilityKind kind;
  try {
    kind = ParseUtilityKind(header[2]);
  } catch (const Error& e) {
    Fail(line, e.what());
  }
  Mat v(n, m);
  Vec b(n);
  for (int i = 0; i < n; ++i) {
    const auto row = NextRow(in, line);
    ExpectFields(row, m + 1, line);
    b[i] = ParseNumber(row[0], line);
    for (int j = 0; j < m; ++j) v(i, j) = ParseNumber(row[j + 1], line);
  }
  const auto supply = NextRow(in, line);
  ExpectFields(supply, m, line);
  Vec s(m);
  for (int j = 0; j < m; ++j) s[j] = ParseNumber(supply[j], line);
  try {
    return FisherMarket(kind, std::move(v), std::move(b), std::move(s));
  } catch (const Error& e) {
    throw Error(ErrorKind::kIo, std::string("invalid market: ") + e.what());
  }
}

void SaveMarket(const std::string& path, const FisherMarket& market) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  WriteMarket(out, market);
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

FisherMarket LoadMarket(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return ReadMarket(in);
}

}  // namespace stackelberg
