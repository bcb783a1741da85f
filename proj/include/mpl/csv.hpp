#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mpl/panel.hpp"

namespace mpl {

/// Reads the long format `entity,period,quantity,value` (UTF-8, '.' decimal).
std::vector<Record> read_records(std::istream& in, const std::string& source_name = "<stream>");
std::vector<Record> read_records_file(const std::string& path);

void write_records(std::ostream& out, const std::vector<Record>& records);

Panel read_panel_file(const std::string& path,
                      const std::vector<std::string>* period_order = nullptr);

}  // namespace mpl
