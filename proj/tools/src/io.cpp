#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "bullbear/cli.hpp"
#include "bullbear/error.hpp"

namespace bullbear::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& field, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": cannot parse '" + field + "'");
  }
  return value;
}

}  // namespace

Json params_to_json(const ModelParams& params) {
  Json groups = Json::array();
  for (const auto& g : params.groups()) groups.push_back({{"factor", g.factor}, {"count", g.initial_count}});
  return {{"groups", groups}, {"total_investors", params.total_investors()}};
}

ModelParams params_from_json(const Json& j) {
  try {
    std::vector<GroupSpec> groups;
    for (const auto& g : j.at("groups")) {
      groups.push_back({g.at("factor").get<double>(), g.at("count").get<std::uint64_t>()});
    }
    return ModelParams(std::move(groups), j.at("total_investors").get<std::uint64_t>());
  } catch (const Json::exception& e) {
    throw Error(Errc::parse_error, std::string("params: ") + e.what());
  }
}

std::vector<PriceRow> parse_prices_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t,price") {
    throw Error(Errc::parse_error, "prices CSV must start with the header 't,price'");
  }
  std::vector<PriceRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error(Errc::parse_error, "line " + std::to_string(number) + ": expected two fields");
    }
    PriceRow row{parse_number<std::int64_t>(trim(line.substr(0, comma)), number),
                 parse_number<double>(trim(line.substr(comma + 1)), number)};
    if (!rows.empty() && row.t <= rows.back().t) {
      throw Error(Errc::parse_error, "line " + std::to_string(number) + ": t must be strictly increasing");
    }
    rows.push_back(row);
  }
  return rows;
}

IngestResult ingest(const std::vector<double>& prices, std::uint64_t stride, unsigned max_order) {
  if (stride == 0) throw Error(Errc::invalid_argument, "stride must be positive");
  if (max_order == 0) throw Error(Errc::invalid_argument, "n-max must be positive");
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
      throw Error(Errc::non_positive_price, "price #" + std::to_string(i) + " is not a positive number");
    }
  }
  const std::uint64_t windows = prices.empty() ? 0 : (prices.size() - 1) / stride;
  if (windows < 2) {
    throw Error(Errc::insufficient_data, std::to_string(prices.size()) + " prices give " + std::to_string(windows) +
                                             " windows at stride " + std::to_string(stride) + ", need 2");
  }
  IngestResult result{std::vector<double>(max_order, 0.0), windows};
  for (std::uint64_t i = 1; i <= windows; ++i) {
    const double x = std::log(prices[i * stride] / prices[(i - 1) * stride]);
    double power = 1.0;
    for (unsigned n = 0; n < max_order; ++n) {
      power *= x;
      result.moments[n] += power;
    }
  }
  for (auto& m : result.moments) m /= static_cast<double>(windows);
  return result;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::io_error, "write failed for " + path);
}

}  // namespace bullbear::cli
