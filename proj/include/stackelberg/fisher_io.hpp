#pragma once

#include <iosfwd>
#include <string>

#include "stackelberg/fisher.hpp"

namespace stackelberg {

// Plain-text market format:
//
//   <n> <m> <kind>
//   <b_1> <v_11> ... <v_1m>
//   ...
//   <b_n> <v_n1> ... <v_nm>
//   <s_1> ... <s_m>
//
// Numbers are written with 17 significant digits, so reading a written market
// reproduces it bit for bit. Blank lines and lines starting with '#' are
// skipped on input.
void WriteMarket(std::ostream& out, const FisherMarket& market);
FisherMarket ReadMarket(std::istream& in);

void SaveMarket(const std::string& path, const FisherMarket& market);
FisherMarket LoadMarket(const std::string& path);

}  // namespace stackelberg
