#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "solvency/dataset.hpp"
#include "solvency/errors.hpp"
#include "text.hpp"

namespace solvency {

namespace {

// RFC 4180 field splitting; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field += ch;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

struct Columns {
  std::optional<std::size_t> company_id, year, tca, tcr, car, label;
  std::vector<std::pair<std::size_t, std::size_t>> attributes;  // (attribute index, column)
  std::vector<std::string> names;
};

Columns read_header(const std::string& line) {
  Columns cols;
  cols.names = split_csv_line(line, 1);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < cols.names.size(); ++i) {
    auto name = std::string(text::trim(cols.names[i]));
    cols.names[i] = name;
    if (!seen.insert(name).second) throw ParseError("duplicate column", 1, name);
    if (name == "company_id") cols.company_id = i;
    else if (name == "year") cols.year = i;
    else if (name == "tca") cols.tca = i;
    else if (name == "tcr") cols.tcr = i;
    else if (name == "car") cols.car = i;
    else if (name == "class") cols.label = i;
    else if (auto attr = parse_attribute_name(name)) cols.attributes.emplace_back(*attr, i);
    else throw ParseError("unknown column", 1, name);
  }
  if (!cols.company_id) throw ParseError("missing column", 1, "company_id");
  if (!cols.year) throw ParseError("missing column", 1, "year");
  if (!cols.car && !(cols.tca && cols.tcr)) throw ParseError("missing column", 1, cols.tca ? "tcr" : "car");
  if (cols.attributes.empty()) throw ParseError("no attribute columns (V1..V11)", 1);
  std::sort(cols.attributes.begin(), cols.attributes.end());
  return cols;
}

class RowReader {
 public:
  RowReader(const Columns& cols, std::vector<std::string> cells, std::size_t line)
      : cols_(cols), cells_(std::move(cells)), line_(line) {
    if (cells_.size() != cols_.names.size()) {
      throw ParseError("expected " + std::to_string(cols_.names.size()) + " fields, found " +
                           std::to_string(cells_.size()),
                       line_);
    }
  }

  std::string_view raw(std::optional<std::size_t> col) const {
    return col ? text::trim(cells_[*col]) : std::string_view{};
  }

  std::optional<double> number(std::optional<std::size_t> col) const {
    auto cell = raw(col);
    if (cell.empty()) return std::nullopt;
    auto value = text::parse_double(cell);
    if (!value) throw ParseError("non-numeric value '" + std::string(cell) + "'", line_, cols_.names[*col]);
    return value;
  }

  double required_number(std::size_t col) const {
    auto value = number(col);
    if (!value) throw ParseError("missing value", line_, cols_.names[col]);
    return *value;
  }

  [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> col = {}) const {
    throw ParseError(what, line_, col ? cols_.names[*col] : std::string{});
  }

 private:
  const Columns& cols_;
  std::vector<std::string> cells_;
  std::size_t line_;
};

CompanyRecord read_record(const RowReader& row, const Columns& cols, const LoadOptions& options) {
  CompanyRecord rec;
  rec.company_id = std::string(row.raw(cols.company_id));
  auto year_cell = row.raw(cols.year);
  if (!year_cell.empty()) {
    auto year = text::parse_int<int>(year_cell);
    if (!year) row.fail("non-integer year '" + std::string(year_cell) + "'", cols.year);
    rec.year = *year;
  }
  if (rec.company_id.empty() && rec.year) row.fail("missing value", cols.company_id);
  if (!rec.company_id.empty() && !rec.year) row.fail("missing value", cols.year);

  rec.tca = row.number(cols.tca);
  rec.tcr = row.number(cols.tcr);
  auto car = row.number(cols.car);
  if (rec.tca && *rec.tca < 0.0) row.fail("tca must be non-negative", cols.tca);
  if (rec.tcr && *rec.tcr <= 0.0) row.fail("tcr must be positive", cols.tcr);
  if (rec.tca.has_value() != rec.tcr.has_value() && !car) {
    row.fail("missing value", rec.tca ? cols.tcr : cols.tca);
  }
  if (rec.tca && rec.tcr) {
    const double ratio = 100.0 * *rec.tca / *rec.tcr;
    if (car && std::abs(*car - ratio) > 1e-9 * std::max(std::abs(ratio), 1.0)) {
      row.fail("car disagrees with 100*tca/tcr", cols.car);
    }
    rec.car = car.value_or(ratio);
  } else if (car) {
    rec.car = *car;
  } else {
    row.fail("missing value", cols.car ? cols.car : cols.tca);
  }

  for (auto [attr, col] : cols.attributes) rec.v[attr] = row.required_number(col);

  auto class_cell = row.raw(cols.label);
  if (!class_cell.empty()) {
    try {
      rec.label = parse_class(class_cell);
    } catch (const InvalidValue& e) {
      row.fail(e.what(), cols.label);
    }
  } else if (options.expect_labels) {
    rec.label = label_from_car(rec.car);
  }
  return rec;
}

}  // namespace

Dataset load_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Columns> cols;
  std::vector<CompanyRecord> records;
  std::set<std::pair<std::string, int>> keys;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (!cols) {
      if (line_no != 1) throw ParseError("header must be the first line", line_no);
      cols = read_header(line);
      continue;
    }
    RowReader row(*cols, split_csv_line(line, line_no), line_no);
    auto rec = read_record(row, *cols, options);
    if (!rec.synthetic() && !options.allow_duplicate_keys &&
        !keys.emplace(rec.company_id, *rec.year).second) {
      row.fail("duplicate (company_id, year) = (" + rec.company_id + ", " + std::to_string(*rec.year) + ")");
    }
    records.push_back(std::move(rec));
  }
  if (!cols) throw ParseError("empty input: header row required", 1);
  std::vector<std::size_t> schema;
  for (auto [attr, col] : cols->attributes) schema.push_back(attr);
  return Dataset(std::move(schema), std::move(records));
}

Dataset load_csv_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  out << "company_id,year,tca,tcr,car";
  for (const auto& name : ds.schema_names()) out << ',' << name;
  out << ",class\n";
  auto opt = [](const std::optional<double>& x) { return x ? text::shortest(*x) : std::string{}; };
  for (const auto& rec : ds.records()) {
    out << quote_if_needed(rec.company_id) << ',' << (rec.year ? std::to_string(*rec.year) : "") << ','
        << opt(rec.tca) << ',' << opt(rec.tcr) << ',' << text::shortest(rec.car);
    for (auto j : ds.schema()) out << ',' << text::shortest(rec.v[j]);
    out << ',' << (rec.label ? to_string(*rec.label) : "") << '\n';
  }
}

void write_csv_file(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, ds);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace solvency
