#include "skconf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "skconf/error.hpp"

namespace skconf {

namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

// Reads lines, dropping a leading UTF-8 byte-order mark, blank lines and
// '#' comment lines. Line numbers are 1-based positions in the input.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (number_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto content = trim(line);
      if (content.empty() || content.front() == '#') continue;
      return true;
    }
    if (in_.bad()) throw Error(ErrorKind::IoError, "read failure");
    return false;
  }

  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

struct Cell {
  std::string_view text;  // trimmed
  std::size_t column;     // 1-based character offset of the raw cell
};

std::vector<Cell> split_cells(std::string_view line) {
  std::vector<Cell> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto raw = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    cells.push_back({trim(raw), start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_probability(const Cell& cell, std::size_t line) {
  double value = 0.0;
  const char* first = cell.text.data();
  const char* last = first + cell.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.text.empty() || ec != std::errc{} || ptr != last) {
    throw Error(ErrorKind::SyntaxError, "'" + std::string(cell.text) + "' is not a number", line,
                cell.column);
  }
  return value;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string token; in >> token;) out.push_back(token);
  return out;
}

// "x20" -> 20
std::optional<std::string_view> frequency_digits(std::string_view token) {
  if (token.size() < 2 || token.front() != 'x') return std::nullopt;
  const auto digits = token.substr(1);
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  return digits;
}

AlphabetPtr alphabet_at(std::vector<std::string> labels, std::size_t line) {
  try {
    return make_alphabet(std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorKind::SyntaxError, e.what(), line, 0);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix format

StochasticTrace parse_matrix(std::istream& input, AlphabetPtr alphabet) {
  LineReader reader(input);
  std::string line;
  if (!reader.next(line)) throw Error(ErrorKind::SyntaxError, "empty matrix file", 1, 0);

  const auto header = split_cells(line);
  if (header.front().text != "activity") {
    throw Error(ErrorKind::SyntaxError, "header must start with 'activity'", reader.number(), 1);
  }
  const std::size_t events = header.size() - 1;
  if (events == 0) throw Error(ErrorKind::SyntaxError, "header names no events", reader.number(), 0);
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].text.empty()) {
      throw Error(ErrorKind::SyntaxError, "empty event identifier", reader.number(), header[c].column);
    }
  }

  std::vector<std::string> labels;
  std::vector<std::size_t> label_lines;
  std::vector<std::vector<double>> rows;
  while (reader.next(line)) {
    const auto cells = split_cells(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::SyntaxError,
                  "row has " + std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()),
                  reader.number(), 0);
    }
    const std::string label(cells.front().text);
    if (label.empty()) throw Error(ErrorKind::SyntaxError, "empty activity label", reader.number(), 1);
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
      throw Error(ErrorKind::SyntaxError, "duplicate activity row '" + label + "'", reader.number(), 1);
    }
    std::vector<double> row(events);
    for (std::size_t j = 0; j < events; ++j) row[j] = parse_probability(cells[j + 1], reader.number());
    labels.push_back(label);
    label_lines.push_back(reader.number());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::SyntaxError, "matrix has no activity rows", reader.number(), 0);

  std::vector<std::size_t> row_of;  // alphabet position -> row
  if (!alphabet) {
    alphabet = alphabet_at(labels, label_lines.front());
    row_of.resize(labels.size());
    std::iota(row_of.begin(), row_of.end(), 0);
  } else {
    row_of.assign(alphabet->size(), rows.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
      const auto index = alphabet->find(labels[r]);
      if (!index) {
        throw Error(ErrorKind::UnknownLabel, "activity '" + labels[r] + "' is not in the alphabet",
                    label_lines[r], 1);
      }
      row_of[*index] = r;
    }
    if (labels.size() != alphabet->size()) {
      throw Error(ErrorKind::DimensionMismatch, "matrix has " + std::to_string(labels.size()) +
                                                    " activity rows, alphabet has " +
                                                    std::to_string(alphabet->size()));
    }
  }

  const std::size_t n = alphabet->size();
  std::vector<double> column_major(n * events);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < events; ++j) column_major[j * n + i] = rows[row_of[i]][j];
  }
  return validate_stochastic_trace(column_major, events, std::move(alphabet));
}

StochasticTrace parse_matrix(const std::string& text, AlphabetPtr alphabet) {
  std::istringstream in(text);
  return parse_matrix(in, std::move(alphabet));
}

namespace {

// Exact decimal rendering of units / 10^precision.
std::string render_units(std::uint64_t units, std::uint64_t scale, int precision) {
  if (units == 0) return "0";
  if (units == scale) return "1";
  std::string digits = std::to_string(units);
  digits.insert(0, static_cast<std::size_t>(precision) - digits.size(), '0');
  return "0." + digits;
}

}  // namespace

std::string write_matrix(const StochasticTrace& sk, int precision) {
  if (precision < 1 || precision > 15) {
    throw Error(ErrorKind::InvalidArgument, "precision must lie in [1, 15]");
  }
  std::uint64_t scale = 1;
  for (int k = 0; k < precision; ++k) scale *= 10;
  const std::size_t n = sk.activities();
  const std::size_t m = sk.events();

  // Largest-remainder rounding per column.
  std::vector<std::uint64_t> units(n * m);
  std::vector<double> remainder(n);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = sk.column(j);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double scaled = col[i] * static_cast<double>(scale);
      const double whole = std::floor(scaled);
      units[j * n + i] = static_cast<std::uint64_t>(whole);
      remainder[i] = scaled - whole;
      assigned += units[j * n + i];
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    std::uint64_t deficit = assigned < scale ? scale - assigned : 0;
    for (std::size_t k = 0; k < n && deficit > 0; ++k, --deficit) {
      if (remainder[order[k]] <= 0.0) break;
      ++units[j * n + order[k]];
    }
  }

  std::string out = "activity";
  for (std::size_t j = 0; j < m; ++j) out += ",e" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += sk.alphabet()->label(static_cast<ActivityIndex>(i));
    for (std::size_t j = 0; j < m; ++j) {
      out += ',';
      out += render_units(units[j * n + i], scale, precision);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Log format

EventLog parse_log(std::istream& input) {
  LineReader reader(input);
  std::string line;
  AlphabetPtr alphabet;
  std::optional<EventLog> log;

  while (reader.next(line)) {
    const auto content = trim(line);
    if (content.rfind("alphabet:", 0) == 0) {
      if (alphabet) throw Error(ErrorKind::SyntaxError, "alphabet declared twice", reader.number(), 1);
      auto labels = split_tokens(content.substr(9));
      if (labels.empty()) throw Error(ErrorKind::SyntaxError, "alphabet declares no labels", reader.number(), 1);
      alphabet = alphabet_at(std::move(labels), reader.number());
      log.emplace(alphabet);
      continue;
    }
    if (content.rfind("trace:", 0) == 0) {
      if (!alphabet) {
        throw Error(ErrorKind::SyntaxError, "trace before alphabet declaration", reader.number(), 1);
      }
      auto tokens = split_tokens(content.substr(6));
      std::uint64_t frequency = 1;
      if (!tokens.empty()) {
        if (auto digits = frequency_digits(tokens.back())) {
          const auto [ptr, ec] = std::from_chars(digits->data(), digits->data() + digits->size(), frequency);
          if (ec != std::errc{}) {
            throw Error(ErrorKind::SyntaxError, "frequency '" + tokens.back() + "' out of range", reader.number(), 0);
          }
          if (frequency == 0) {
            throw Error(ErrorKind::ZeroFrequency, "trace frequency must be positive", reader.number(), 0);
          }
          tokens.pop_back();
        }
      }
      std::vector<ActivityIndex> activities;
      activities.reserve(tokens.size());
      for (const auto& token : tokens) {
        const auto index = alphabet->find(token);
        if (!index) {
          throw Error(ErrorKind::UnknownLabel, "activity '" + token + "' is not in the alphabet",
                      reader.number(), 0);
        }
        activities.push_back(*index);
      }
      log->add(DeterministicTrace(alphabet, std::move(activities)), frequency);
      continue;
    }
    throw Error(ErrorKind::SyntaxError, "expected 'alphabet:' or 'trace:'", reader.number(), 1);
  }
  if (!log) throw Error(ErrorKind::SyntaxError, "missing alphabet declaration", reader.number(), 0);
  return std::move(*log);
}

EventLog parse_log(const std::string& text) {
  std::istringstream in(text);
  return parse_log(in);
}

std::string write_log(const EventLog& log) {
  std::string out = "alphabet:";
  for (const auto& label : log.alphabet()->labels()) out += ' ' + label;
  out += '\n';
  for (const auto& entry : log.entries()) {
    out += "trace:";
    for (const auto& label : entry.trace.labels()) out += ' ' + label;
    out += " x" + std::to_string(entry.frequency) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// XES

EventLog parse_xes(std::istream& input) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(input, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::SyntaxError, e.message(), e.line(), 0);
  }
  const auto log_node = tree.get_child_optional("log");
  if (!log_node) throw Error(ErrorKind::SyntaxError, "XES document has no <log> element");

  std::vector<std::string> labels;
  std::unordered_map<std::string, ActivityIndex> index;
  std::vector<std::vector<ActivityIndex>> traces;
  for (const auto& [tag, trace_node] : *log_node) {
    if (tag != "trace") continue;
    auto& activities = traces.emplace_back();
    for (const auto& [event_tag, event_node] : trace_node) {
      if (event_tag != "event") continue;
      std::optional<std::string> name;
      for (const auto& [attr_tag, attr_node] : event_node) {
        if (attr_tag == "string" && attr_node.get<std::string>("<xmlattr>.key", "") == "concept:name") {
          name = attr_node.get<std::string>("<xmlattr>.value", "");
        }
      }
      if (!name || name->empty()) {
        throw Error(ErrorKind::SyntaxError, "event without a concept:name attribute");
      }
      auto [it, inserted] = index.try_emplace(*name, static_cast<ActivityIndex>(labels.size()));
      if (inserted) labels.push_back(*name);
      activities.push_back(it->second);
    }
  }
  if (labels.empty()) throw Error(ErrorKind::SyntaxError, "XES log contains no events");

  AlphabetPtr alphabet;
  try {
    alphabet = make_alphabet(std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorKind::SyntaxError, e.what());
  }
  EventLog log(alphabet);
  for (auto& activities : traces) log.add(DeterministicTrace(alphabet, std::move(activities)));
  return log;
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return in;
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoError) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace

StochasticTrace load_matrix(const std::filesystem::path& path, AlphabetPtr alphabet) {
  auto in = open_input(path);
  return with_path(path, [&] { return parse_matrix(in, std::move(alphabet)); });
}

EventLog load_log(const std::filesystem::path& path) {
  auto in = open_input(path);
  if (path.extension() == ".xes") return with_path(path, [&] { return parse_xes(in); });
  return with_path(path, [&] { return parse_log(in); });
}

}  // namespace skconf
