#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bullbear/model.hpp"

namespace bullbear::cli {

using Json = nlohmann::json;

std::string tool_version();

// JSON <-> ModelParams, {"groups":[{"factor":f,"count":c},...],"total_investors":N}
Json params_to_json(const ModelParams& params);
ModelParams params_from_json(const Json& j);

struct PriceRow {
  std::int64_t t = 0;
  double price = 0.0;
};

/// CSV with header "t,price"; t strictly increasing integers.
std::vector<PriceRow> parse_prices_csv(std::istream& in);

/// Raw moments of log returns over non-overlapping windows of `stride` steps.
struct IngestResult {
  std::vector<double> moments;
  std::uint64_t windows = 0;
};
IngestResult ingest(const std::vector<double>& prices, std::uint64_t stride, unsigned max_order);

/// Runs a fully resolved request (the same object a report echoes as its
/// inputs) and returns the report.
Json execute(const Json& request);

/// argv-style entry point. Writes the report to --out (or `out` when the
/// flag is absent), diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace bullbear::cli
