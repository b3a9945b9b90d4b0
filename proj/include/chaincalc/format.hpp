#pragma once

#include <iosfwd>

#include "chaincalc/normalize.hpp"

namespace chaincalc {

// Versioned UTF-8 text formats ("chaincalc/1 <kind>" header line).
void write_object(std::ostream& os, const ChainConfig& cfg, const DerivedObject& d);
DerivedObject read_object(std::istream& is, ChainConfig* cfg_out);

void write_sheaf(std::ostream& os, const LinkedSheaf& e);
LinkedSheaf read_sheaf(std::istream& is);

std::string object_to_string(const ChainConfig& cfg, const DerivedObject& d);
DerivedObject object_from_string(const std::string& text, ChainConfig* cfg_out);

std::string sheaf_to_string(const LinkedSheaf& e);
LinkedSheaf sheaf_from_string(const std::string& text);

// Human-readable reduction trace table.
void write_trace(std::ostream& os, const ReductionTrace& tr);

}  // namespace chaincalc
