#pragma once

#include <string_view>
#include <vector>

namespace medsec::cli {

struct Fixture {
  std::string_view name;
  std::string_view json;
};

/// Configs compiled in from tools/fixtures, sorted by name.
const std::vector<Fixture>& bundled_fixtures();

}  // namespace medsec::cli
