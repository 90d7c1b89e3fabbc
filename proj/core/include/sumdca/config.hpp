#pragma once

#include <map>
#include <string>
#include <string_view>

#include "sumdca/training.hpp"

namespace sumdca {

/// Parses `key = value` lines; `#` starts a comment. Duplicate keys: last wins.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies entries onto `config`. Unknown keys and unparsable values throw
/// ContractError naming the key.
void apply_config(TrainConfig& config, const std::map<std::string, std::string>& entries);

/// Every key, values printed losslessly, in a stable order.
std::string format_config(const TrainConfig& config);

TrainConfig load_config_file(const std::string& path);

}  // namespace sumdca
