#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "citest/citests.hpp"
#include "citest/dataset.hpp"
#include "citest/smoothness.hpp"

namespace citest {

struct CsvReadOptions {
    XYKind kind = XYKind::categorical;
    /// Category counts; inferred from the largest code present when unset.
    std::optional<std::size_t> ell1;
    std::optional<std::size_t> ell2;
};

/// Reads a header `x,y,z` or `x,y,z1,z2` followed by one observation per line.
/// Categorical x/y are 1-based integers in the file and 0-based in memory.
/// Malformed content raises DataError with the 1-based data row (header
/// excluded) and column.
TripleDataset read_csv(std::istream& in, const CsvReadOptions& options = {});
TripleDataset read_csv_file(const std::string& path, const CsvReadOptions& options = {});

/// Writes reals with 17 significant digits so a round trip is exact.
void write_csv(std::ostream& out, const TripleDataset& data);
void write_csv_file(const std::string& path, const TripleDataset& data);

nlohmann::ordered_json to_json(const BinPlan& plan);
nlohmann::ordered_json to_json(const TestConfig& config);
nlohmann::ordered_json to_json(const TestReport& report);
nlohmann::ordered_json to_json(const SmoothnessReport& report);

}  // namespace citest
