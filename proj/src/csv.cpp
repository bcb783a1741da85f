#include "mpl/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mpl {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    fail(Errc::InvalidInput, "cannot parse number '" + s + "' " + where);
  return v;
}

}  // namespace

std::vector<Record> read_records(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line))
    fail(Errc::InvalidInput, source_name + ": empty input");
  if (!line.empty() && line.front() == '\xEF') line = line.substr(3);  // strip UTF-8 BOM
  const auto header = split_line(line);
  if (header.size() != 4 || header[0] != "entity" || header[1] != "period" ||
      header[2] != "quantity" || header[3] != "value")
    fail(Errc::InvalidInput, source_name + ": header must be entity,period,quantity,value");

  std::vector<Record> records;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    const std::string where = "at " + source_name + ":" + std::to_string(lineno);
    if (fields.size() != 4) fail(Errc::InvalidInput, "expected 4 fields " + where);
    records.push_back({fields[0], fields[1], parse_number(fields[2], where),
                       parse_number(fields[3], where)});
  }
  if (records.empty()) fail(Errc::InvalidInput, source_name + ": no data rows");
  return records;
}

std::vector<Record> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::InvalidInput, "cannot open " + path);
  return read_records(in, path);
}

void write_records(std::ostream& out, const std::vector<Record>& records) {
  out << "entity,period,quantity,value\n";
  char buf[64];
  for (const auto& r : records) {
    out << r.entity << ',' << r.period << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.quantity);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.value);
    out << buf << '\n';
  }
}

Panel read_panel_file(const std::string& path, const std::vector<std::string>* period_order) {
  return build_panel(read_records_file(path), period_order);
}

}  // namespace mpl
