#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "skconf/core.hpp"

namespace skconf {

// Matrix text format (comma-delimited, '#' comment lines ignored):
//
//   activity,e1,e2,e3
//   a,0.5,0.3,0.1
//   b,0.5,0.7,0.9
//
// Without an alphabet the row labels define one in file order. With an
// alphabet the rows must name exactly its labels (any order) and are reordered
// to it.
StochasticTrace parse_matrix(std::istream& input, AlphabetPtr alphabet = nullptr);
StochasticTrace parse_matrix(const std::string& text, AlphabetPtr alphabet = nullptr);

// Entries are rounded per column so the printed values sum to exactly 1 in
// the last decimal place; every entry is within 10^-precision of the input.
// Exact zeros and ones print as "0" and "1". Event ids are e1..em.
std::string write_matrix(const StochasticTrace& sk, int precision = 6);

// Log/model text format:
//
//   alphabet: a b c d
//   trace: a b c d x20
//   trace: b a c d x10
//
// A trailing token xN is the frequency (default 1). Duplicate traces merge.
EventLog parse_log(std::istream& input);
EventLog parse_log(const std::string& text);

std::string write_log(const EventLog& log);

// Minimal XES reader: one trace per <trace>, activities from the event
// "concept:name" string attribute, alphabet in order of first appearance.
EventLog parse_xes(std::istream& input);

// File helpers. Throw Error(IoError) naming the path when it cannot be read.
// load_log dispatches on the .xes extension.
StochasticTrace load_matrix(const std::filesystem::path& path, AlphabetPtr alphabet = nullptr);
EventLog load_log(const std::filesystem::path& path);

}  // namespace skconf
