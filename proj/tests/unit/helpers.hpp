#pragma once

#include <map>
#include <string>

#include "kirchdelay/config.hpp"

namespace testing {

/// The shipped scenario with selected keys overridden.
inline kirchdelay::RunConfig scenario(const std::map<std::string, std::string>& overrides = {}) {
  kirchdelay::KeyValues kv;
  kv.source = "test";
  for (const auto& [k, v] : overrides) kv.set(k, v);
  return kirchdelay::build_run_config(kv);
}

}  // namespace testing
