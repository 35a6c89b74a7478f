#include <chrono>
#include <ctime>
#include <sstream>

#include "rpc/cli.hpp"

namespace rpc::cli {

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest RunManifest::now(std::string subcommand, std::uint64_t seed) {
  RunManifest m;
  m.subcommand = std::move(subcommand);
  m.seed = seed;
  m.timestamp = utc_timestamp();
  return m;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json opts = nlohmann::ordered_json::object();
  for (const auto& [k, v] : options) opts[k] = v;
  return {{"subcommand", subcommand},
          {"options", opts},
          {"seed", seed},
          {"version", version},
          {"timestamp", timestamp}};
}

std::string RunManifest::comment_block() const {
  std::ostringstream os;
  os << "# rpcsim " << version << ' ' << subcommand << '\n';
  os << "# seed: " << seed << '\n';
  for (const auto& [k, v] : options) os << "# " << k << ": " << v << '\n';
  os << "# timestamp: " << timestamp << '\n';
  return os.str();
}

}  // namespace rpc::cli
